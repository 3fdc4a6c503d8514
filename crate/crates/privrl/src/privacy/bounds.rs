//! High-probability norm bounds for sums of `count` i.i.d. noise draws at
//! scale `sigma`. Each holds with probability at least `1 − alpha`.
//!
//! `alpha = 1` is accepted as a degenerate input for which the log terms of
//! the Gaussian bounds vanish.

/// Operator-norm bound for symmetric Gaussian matrices:
/// `σ·√count·(4√d + 2 ln(1/α))`.
pub fn gauss_matrix_eigen_bound(d: usize, sigma: f64, count: usize, alpha: f64) -> f64 {
    sigma * (count as f64).sqrt() * (4.0 * (d as f64).sqrt() + 2.0 * (1.0 / alpha).ln())
}

/// Euclidean-norm bound for Gaussian vectors: `σ·√count·(√d + 2√ln(1/α))`.
pub fn gauss_vector_bound(d: usize, sigma: f64, count: usize, alpha: f64) -> f64 {
    sigma * (count as f64).sqrt() * ((d as f64).sqrt() + 2.0 * (1.0 / alpha).ln().max(0.0).sqrt())
}

/// Operator-norm bound for symmetric Laplace matrices:
/// `σ·√count·(2d + 2√(d ln(d/α)) + ln(d/α))`.
pub fn laplace_matrix_eigen_bound(d: usize, sigma: f64, count: usize, alpha: f64) -> f64 {
    let df = d as f64;
    let l = (df / alpha).ln();
    sigma * (count as f64).sqrt() * (2.0 * df + 2.0 * (df * l).max(0.0).sqrt() + l)
}

/// Euclidean-norm bound for Laplace vectors: `σ·√count·√d·ln(d/α)`.
pub fn laplace_vector_bound(d: usize, sigma: f64, count: usize, alpha: f64) -> f64 {
    let df = d as f64;
    sigma * (count as f64).sqrt() * df.sqrt() * (df / alpha).ln()
}

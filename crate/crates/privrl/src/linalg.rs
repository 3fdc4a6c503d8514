//! Dense small-matrix primitives: symmetric matrices, PSD solves,
//! Mahalanobis norms and extreme eigenvalues.
//!
//! Every matrix here is desk-scale (d ≤ 64) and stored densely. Loops run in
//! a fixed order so that results are bit-reproducible for identical inputs.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Dense real vector.
pub type Vector = DVector<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (Cholesky factorization failed)")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense symmetric `d × d` matrix.
///
/// Symmetry is exact: every constructor and update writes `(i, j)` and
/// `(j, i)` with the same bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    m: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { m: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self { m: DMatrix::from_diagonal_element(dim, dim, c) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self { m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)) }
    }

    /// Build from the lower triangle produced by `f(i, j)` with `j ≤ i`.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self { m }
    }

    /// Build from row-major entries; the input must already be symmetric.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, got: r.len() });
            }
        }
        Ok(Self::from_lower_fn(dim, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Symmetrize an arbitrary square matrix as `(M + Mᵀ)/2`.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        Self::from_lower_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &SymmetricMatrix) {
        debug_assert_eq!(self.dim(), other.dim());
        self.m += &other.m;
    }

    /// `self += c·I`.
    pub fn add_diagonal(&mut self, c: f64) {
        for i in 0..self.dim() {
            self.m[(i, i)] += c;
        }
    }

    /// `self += weight · x xᵀ`.
    pub fn rank1_update(&mut self, x: &Vector, weight: f64) {
        let d = self.dim();
        debug_assert_eq!(x.len(), d);
        for i in 0..d {
            let xi = weight * x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..=i {
                let v = xi * x[j];
                self.m[(i, j)] += v;
                if i != j {
                    self.m[(j, i)] += v;
                }
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.m *= c;
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { m: &self.m * c }
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        &self.m * x
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quad_form(&self, x: &Vector) -> f64 {
        x.dot(&(&self.m * x))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        let (lo, hi) = eigen_range(self);
        lo.abs().max(hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }
}

/// Cholesky factor `A = L Lᵀ` of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct PsdFactor {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl PsdFactor {
    pub fn new(a: &SymmetricMatrix) -> Result<Self, LinalgError> {
        if !a.is_finite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        nalgebra::Cholesky::new(a.m.clone())
            .map(|chol| Self { chol })
            .ok_or(LinalgError::NotPositiveDefinite)
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &Vector) -> Result<Vector, LinalgError> {
        self.check_dim(b.len())?;
        Ok(self.chol.solve(b))
    }

    /// `‖x‖_{A⁻¹} = √(xᵀ A⁻¹ x)`, computed as `‖L⁻¹ x‖₂`.
    pub fn inv_norm(&self, x: &Vector) -> Result<f64, LinalgError> {
        self.check_dim(x.len())?;
        let l = self.chol.l_dirty();
        let d = x.len();
        let mut y = vec![0.0; d];
        let mut acc = 0.0;
        for i in 0..d {
            let mut s = x[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                s -= l[(i, j)] * yj;
            }
            let yi = s / l[(i, i)];
            y[i] = yi;
            acc += yi * yi;
        }
        Ok(acc.sqrt())
    }

    fn check_dim(&self, got: usize) -> Result<(), LinalgError> {
        let expected = self.dim();
        if got != expected {
            return Err(LinalgError::DimensionMismatch { expected, got });
        }
        Ok(())
    }
}

/// Solve `A x = b` for positive definite `A`.
pub fn psd_solve(a: &SymmetricMatrix, b: &Vector) -> Result<Vector, LinalgError> {
    PsdFactor::new(a)?.solve(b)
}

/// `√(xᵀ A⁻¹ x)` for positive definite `A`.
pub fn mahalanobis_inv_norm(a: &SymmetricMatrix, x: &Vector) -> Result<f64, LinalgError> {
    PsdFactor::new(a)?.inv_norm(x)
}

/// `√(xᵀ A x)` for positive semidefinite `A`; negative quadratic forms clamp to 0.
pub fn mahalanobis_norm(a: &SymmetricMatrix, x: &Vector) -> f64 {
    a.quad_form(x).max(0.0).sqrt()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &SymmetricMatrix) -> f64 {
    eigen_range(a).0
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(a: &SymmetricMatrix) -> f64 {
    eigen_range(a).1
}

fn eigen_range(a: &SymmetricMatrix) -> (f64, f64) {
    if a.dim() == 0 {
        return (0.0, 0.0);
    }
    let eig = a.m.clone().symmetric_eigen();
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank1_keeps_exact_symmetry() {
        let mut a = SymmetricMatrix::identity(3);
        a.rank1_update(&Vector::from_vec(vec![0.1, -0.3, 0.7]), 1.7);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j).to_bits(), a.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn factor_rejects_indefinite() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(PsdFactor::new(&a).unwrap_err(), LinalgError::NotPositiveDefinite);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = PsdFactor::new(&SymmetricMatrix::identity(2)).unwrap();
        assert!(matches!(f.solve(&Vector::zeros(3)), Err(LinalgError::DimensionMismatch { .. })));
    }
}

//! Differential-privacy toolbox.
//!
//! - [`PrivacyBudget`] and the Gaussian / Laplace calibrations,
//! - composition splits (advanced and simple),
//! - noise samplers and the [`NoiseProfile`] attached to an agent,
//! - the binary-tree mechanism for continual release ([`NoiseTree`]),
//! - high-probability norm bounds for the injected noise ([`bounds`]).

pub mod bounds;
mod noise;
mod tree;

pub use bounds::{
    gauss_matrix_eigen_bound, gauss_vector_bound, laplace_matrix_eigen_bound, laplace_vector_bound,
};
pub use noise::{
    sample_scalar, sample_symmetric, sample_symmetric_gaussian, sample_vector, NoiseDist,
    NoiseProfile, Regime,
};
pub use tree::{dyadic_nodes, max_nodes, NodeId, NoiseTree, TreePayload};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrivacyError {
    #[error("invalid privacy budget: {0}")]
    InvalidBudget(String),
    #[error("advanced composition needs delta > 0; use simple composition for pure DP")]
    PureDpUnsupported,
    #[error("prefix {k} out of range for a tree with {n} leaves")]
    OutOfRange { k: usize, n: usize },
}

/// Privacy level `(ε, δ)`; `δ = 0` selects pure DP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, PrivacyError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(PrivacyError::InvalidBudget(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(PrivacyError::InvalidBudget(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }

    /// Check `ε, δ ∈ (0, 1)`, the range required by the approximate-DP calibrations.
    pub fn require_approx(&self) -> Result<(), PrivacyError> {
        if self.delta == 0.0 {
            return Err(PrivacyError::PureDpUnsupported);
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(PrivacyError::InvalidBudget(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(PrivacyError::InvalidBudget(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Gaussian mechanism scale `σ = Δ₂·√(2 ln(2/δ))/ε`.
pub fn gaussian_sigma(sensitivity: f64, budget: PrivacyBudget) -> Result<f64, PrivacyError> {
    budget.require_approx()?;
    check_sensitivity(sensitivity)?;
    Ok(sensitivity * (2.0 * (2.0 / budget.delta).ln()).sqrt() / budget.epsilon)
}

/// Laplace mechanism scale `b = Δ₁/ε`.
pub fn laplace_scale(sensitivity_l1: f64, epsilon: f64) -> Result<f64, PrivacyError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(PrivacyError::InvalidBudget(format!("epsilon must be positive, got {epsilon}")));
    }
    check_sensitivity(sensitivity_l1)?;
    Ok(sensitivity_l1 / epsilon)
}

/// Per-mechanism budget `(ε/√(8k ln(2/δ)), δ/(2k))` so that the k-fold
/// adaptive composition is `(ε, δ)`-DP.
pub fn advanced_composition_split(budget: PrivacyBudget, k: usize) -> Result<PrivacyBudget, PrivacyError> {
    budget.require_approx()?;
    if k == 0 {
        return Err(PrivacyError::InvalidBudget("composition count must be at least 1".into()));
    }
    let kf = k as f64;
    Ok(PrivacyBudget {
        epsilon: budget.epsilon / (8.0 * kf * (2.0 / budget.delta).ln()).sqrt(),
        delta: budget.delta / (2.0 * kf),
    })
}

/// Per-mechanism budget `(ε/k, δ/k)` under simple composition.
pub fn simple_composition_split(budget: PrivacyBudget, k: usize) -> Result<PrivacyBudget, PrivacyError> {
    if k == 0 {
        return Err(PrivacyError::InvalidBudget("composition count must be at least 1".into()));
    }
    let kf = k as f64;
    Ok(PrivacyBudget { epsilon: budget.epsilon / kf, delta: budget.delta / kf })
}

fn check_sensitivity(s: f64) -> Result<(), PrivacyError> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(PrivacyError::InvalidBudget(format!("sensitivity must be non-negative, got {s}")));
    }
    Ok(())
}

/// `⌈x⌉` with values within `1e-12` (relative) above an integer snapped down,
/// so that round-off never bumps an exact integer to the next one.
pub fn stable_ceil(x: f64) -> usize {
    let nudged = x - 1e-12 * x.abs().max(1.0);
    nudged.ceil().max(0.0) as usize
}

/// `⌈log₂ n + 1⌉`, the depth of a binary tree over `n` leaves.
pub fn tree_depth(n: usize) -> usize {
    stable_ceil((n.max(1) as f64).log2() + 1.0)
}

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::Laplace;

use super::PrivacyError;
use crate::linalg::{SymmetricMatrix, Vector};
use crate::rng::{stream, Role};

/// Perturbation regime of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    None,
    Jdp,
    Ldp,
}

/// Noise family: Gaussian for `(ε, δ)`-DP, Laplace for pure DP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDist {
    #[default]
    Gaussian,
    Laplace,
}

/// Noise attached to one statistic stream of an agent.
///
/// `sigma_*` and `shift` are the calibrated values; the `effective_*`
/// accessors multiply them by `scale_override`, which is how every consumer
/// reads them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub regime: Regime,
    pub dist: NoiseDist,
    pub sigma_matrix: f64,
    pub sigma_vector: f64,
    pub shift: f64,
    pub scale_override: f64,
}

impl NoiseProfile {
    pub fn none() -> Self {
        Self {
            regime: Regime::None,
            dist: NoiseDist::Gaussian,
            sigma_matrix: 0.0,
            sigma_vector: 0.0,
            shift: 0.0,
            scale_override: 1.0,
        }
    }

    pub fn new(
        regime: Regime,
        dist: NoiseDist,
        sigma_matrix: f64,
        sigma_vector: f64,
        shift: f64,
        scale_override: f64,
    ) -> Result<Self, PrivacyError> {
        if !(scale_override.is_finite() && scale_override > 0.0) {
            return Err(PrivacyError::InvalidBudget(format!(
                "scale_override must be positive, got {scale_override}"
            )));
        }
        for (name, v) in [("sigma_matrix", sigma_matrix), ("sigma_vector", sigma_vector), ("shift", shift)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PrivacyError::InvalidBudget(format!("{name} must be non-negative, got {v}")));
            }
        }
        if regime == Regime::None && (sigma_matrix != 0.0 || sigma_vector != 0.0 || shift != 0.0) {
            return Err(PrivacyError::InvalidBudget("regime none carries no noise".into()));
        }
        Ok(Self { regime, dist, sigma_matrix, sigma_vector, shift, scale_override })
    }

    pub fn effective_sigma_matrix(&self) -> f64 {
        self.sigma_matrix * self.scale_override
    }

    pub fn effective_sigma_vector(&self) -> f64 {
        self.sigma_vector * self.scale_override
    }

    pub fn effective_shift(&self) -> f64 {
        self.shift * self.scale_override
    }
}

/// One draw with scale `scale` (standard deviation for Gaussian, `b` for Laplace).
pub fn sample_scalar<R: Rng + ?Sized>(dist: NoiseDist, scale: f64, rng: &mut R) -> f64 {
    match dist {
        NoiseDist::Gaussian => {
            let z: f64 = rng.sample(StandardNormal);
            scale * z
        }
        NoiseDist::Laplace => {
            let std = Laplace::new(0.0, 1.0).expect("unit Laplace");
            let z: f64 = rng.sample(std);
            scale * z
        }
    }
}

/// Vector with i.i.d. entries.
pub fn sample_vector<R: Rng + ?Sized>(d: usize, scale: f64, dist: NoiseDist, rng: &mut R) -> Vector {
    Vector::from_iterator(d, (0..d).map(|_| sample_scalar(dist, scale, rng)))
}

/// Symmetric noise matrix.
///
/// Gaussian: `(Z' + Z'ᵀ)/√2` with `Z'` i.i.d. `N(0, σ²)` drawn row-major, so
/// off-diagonal entries keep variance `σ²`. Laplace: upper triangle i.i.d.
/// `Lap(b)` drawn row-major and mirrored.
pub fn sample_symmetric<R: Rng + ?Sized>(d: usize, scale: f64, dist: NoiseDist, rng: &mut R) -> SymmetricMatrix {
    match dist {
        NoiseDist::Gaussian => {
            let z: Vec<f64> = (0..d * d).map(|_| sample_scalar(dist, scale, rng)).collect();
            let r2 = std::f64::consts::SQRT_2;
            SymmetricMatrix::from_lower_fn(d, |i, j| (z[i * d + j] + z[j * d + i]) / r2)
        }
        NoiseDist::Laplace => {
            let mut upper = vec![0.0; d * d];
            for i in 0..d {
                for j in i..d {
                    upper[i * d + j] = sample_scalar(dist, scale, rng);
                }
            }
            SymmetricMatrix::from_lower_fn(d, |i, j| upper[j * d + i])
        }
    }
}

/// Symmetric Gaussian noise matrix drawn from the auxiliary stream of `seed`.
pub fn sample_symmetric_gaussian(d: usize, sigma: f64, seed: u64) -> SymmetricMatrix {
    let mut rng = stream(seed, Role::Aux, 0, 0);
    sample_symmetric(d, sigma, NoiseDist::Gaussian, &mut rng)
}

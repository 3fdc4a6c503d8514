use serde::{Deserialize, Serialize};

use super::LinearError;
use crate::privacy::{
    gauss_matrix_eigen_bound, gauss_vector_bound, laplace_matrix_eigen_bound, laplace_vector_bound, stable_ceil,
    tree_depth, NoiseDist, PrivacyBudget, PrivacyError, Regime,
};

/// Batching and noise family of the linear agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LsviVariant {
    /// Gaussian noise, `B = ⌈(Kε)^{2/5}/(d^{3/5}H^{1/5})⌉`.
    #[default]
    ApproxJdp,
    /// Laplace noise, `B = ⌈(Kε)^{1/3}/(d^{2/3}H^{1/3})⌉`.
    PureJdp,
    /// Gaussian noise, one batch per episode.
    NonBatched,
}

/// Derived parameters of batched LSVI-UCB.
///
/// `sigma_lambda` and `sigma_u` are the calibrated scales; `upsilon`, `c_k`,
/// `c_j`, `u_k`, `chi` and `beta` are computed from the scales multiplied by
/// `scale_override`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsviParams {
    pub variant: LsviVariant,
    pub regime: Regime,
    pub dist: NoiseDist,
    pub k: usize,
    pub h: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
    pub scale_override: f64,
    pub lambda: f64,
    pub b: usize,
    pub b0: usize,
    /// `⌈K/B⌉`; batch `i` starts at episode `i·batch_len + 1`.
    pub batch_len: usize,
    pub sigma_lambda: f64,
    pub sigma_u: f64,
    pub upsilon: f64,
    pub c_k: f64,
    pub c_j: f64,
    pub u_k: f64,
    pub chi: f64,
    pub beta: f64,
}

/// Number of batches for `variant`, clamped to `[1, K]`.
pub fn batch_count(k: usize, h: usize, d: usize, epsilon: f64, variant: LsviVariant) -> usize {
    let (kf, hf, df) = (k as f64, h as f64, d as f64);
    let raw = match variant {
        LsviVariant::ApproxJdp => (kf * epsilon).powf(0.4) / (df.powf(0.6) * hf.powf(0.2)),
        LsviVariant::PureJdp => (kf * epsilon).cbrt() / (df.powf(2.0 / 3.0) * hf.cbrt()),
        LsviVariant::NonBatched => return k.max(1),
    };
    stable_ceil(raw).clamp(1, k.max(1))
}

/// Gaussian scales `(σ_Λ, σ_u)`:
/// `(128/ε)·√(BHB₀)·ln²(32HB₀B/δ)` and `(128/ε)·H√(HB)·ln²(32HB₀B/δ)`.
pub fn gaussian_scales(epsilon: f64, delta: f64, h: usize, b: usize, b0: usize) -> (f64, f64) {
    let (hf, bf, b0f) = (h as f64, b as f64, b0 as f64);
    let l2 = (32.0 * hf * b0f * bf / delta).ln().powi(2);
    (128.0 / epsilon * (bf * hf * b0f).sqrt() * l2, 128.0 / epsilon * hf * (hf * bf).sqrt() * l2)
}

/// Laplace scales `(σ_Λ, σ_u) = (4HBB₀/ε, 8H²B/ε)`: simple composition over
/// `2H` statistics, `B` releases and `B₀` nodes, with L1 sensitivities 2 and
/// `2(H+1) ≤ 4H`.
pub fn laplace_scales(epsilon: f64, h: usize, b: usize, b0: usize) -> (f64, f64) {
    let (hf, bf, b0f) = (h as f64, b as f64, b0 as f64);
    (4.0 * hf * bf * b0f / epsilon, 8.0 * hf * hf * bf / epsilon)
}

impl LsviParams {
    /// Parameters under JDP noise (`regime = Jdp`) or none (`regime = None`).
    ///
    /// `ε ∈ (0, 1]` and `δ ∈ (0, 1)` for the Gaussian variants, `δ = 0` for
    /// the pure variant.
    pub fn new(
        k: usize,
        h: usize,
        d: usize,
        budget: PrivacyBudget,
        p: f64,
        variant: LsviVariant,
        regime: Regime,
    ) -> Result<Self, LinearError> {
        if k == 0 || h == 0 || d == 0 {
            return Err(LinearError::Config(format!("K={k}, H={h}, d={d} must all be positive")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(LinearError::Config(format!("failure probability p must lie in (0, 1), got {p}")));
        }
        if regime == Regime::Ldp {
            return Err(LinearError::Config("the linear agent supports only JDP or no noise".into()));
        }
        let (epsilon, delta) = (budget.epsilon, budget.delta);
        let dist = if variant == LsviVariant::PureJdp { NoiseDist::Laplace } else { NoiseDist::Gaussian };
        if regime == Regime::Jdp {
            match dist {
                NoiseDist::Gaussian => {
                    if budget.is_pure() {
                        return Err(PrivacyError::PureDpUnsupported.into());
                    }
                    if epsilon > 1.0 {
                        return Err(PrivacyError::InvalidBudget(format!("epsilon must lie in (0, 1], got {epsilon}")).into());
                    }
                }
                NoiseDist::Laplace => {
                    if !budget.is_pure() {
                        return Err(LinearError::Config("the pure variant needs delta = 0".into()));
                    }
                }
            }
        }
        let b = batch_count(k, h, d, epsilon, variant);
        let b0 = tree_depth(b);
        let (sigma_lambda, sigma_u) = match (regime, dist) {
            (Regime::Jdp, NoiseDist::Gaussian) => gaussian_scales(epsilon, delta, h, b, b0),
            (Regime::Jdp, NoiseDist::Laplace) => laplace_scales(epsilon, h, b, b0),
            _ => (0.0, 0.0),
        };
        let mut out = Self {
            variant,
            regime,
            dist,
            k,
            h,
            d,
            epsilon,
            delta,
            p,
            scale_override: 1.0,
            lambda: d as f64,
            b,
            b0,
            batch_len: stable_ceil(k as f64 / b as f64),
            sigma_lambda,
            sigma_u,
            upsilon: 0.0,
            c_k: 0.0,
            c_j: 0.0,
            u_k: 0.0,
            chi: 0.0,
            beta: 0.0,
        };
        out.derive();
        Ok(out)
    }

    /// Same parameters with every noise scale multiplied by `scale`.
    pub fn with_scale(mut self, scale: f64) -> Result<Self, LinearError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(LinearError::Config(format!("scale_override must be positive, got {scale}")));
        }
        self.scale_override = scale;
        self.derive();
        Ok(self)
    }

    pub fn effective_sigma_lambda(&self) -> f64 {
        self.sigma_lambda * self.scale_override
    }

    pub fn effective_sigma_u(&self) -> f64 {
        self.sigma_u * self.scale_override
    }

    /// Deterministic shift `(c_K + Υ)` added to every released design.
    pub fn shift(&self) -> f64 {
        self.c_k + self.upsilon
    }

    /// First episode (1-based) of batch `i`.
    pub fn batch_start(&self, i: usize) -> usize {
        i * self.batch_len + 1
    }

    /// Batch that episode `k` (1-based) belongs to.
    pub fn batch_of(&self, k: usize) -> usize {
        ((k - 1) / self.batch_len).min(self.b - 1)
    }

    /// `Some(b + 1)` when the server refreshes its output after episode `k`.
    pub fn boundary_after(&self, k: usize) -> Option<usize> {
        if k.is_multiple_of(self.batch_len) {
            let next = k / self.batch_len;
            if next < self.b {
                return Some(next);
            }
        }
        None
    }

    fn derive(&mut self) {
        let (kf, hf, df) = (self.k as f64, self.h as f64, self.d as f64);
        let alpha = self.p / (6.0 * kf * hf);
        let (sl, su) = (self.effective_sigma_lambda(), self.effective_sigma_u());
        let (upsilon, c_j) = if self.regime == Regime::None {
            (0.0, 0.0)
        } else {
            match self.dist {
                NoiseDist::Gaussian => (
                    self.b0 as f64 * gauss_matrix_eigen_bound(self.d, sl, 1, alpha),
                    gauss_vector_bound(self.d, su, 1, alpha / df),
                ),
                NoiseDist::Laplace => (
                    self.b0 as f64 * laplace_matrix_eigen_bound(self.d, sl, 1, alpha),
                    laplace_vector_bound(self.d, su, 1, alpha),
                ),
            }
        };
        self.upsilon = upsilon;
        self.c_k = df * upsilon;
        self.c_j = c_j;
        let floor = self.lambda + self.c_k;
        self.u_k = (2.0 * hf * (df * kf / floor).sqrt() + c_j / floor).max(1.0);
        self.chi = 24.0f64.powi(2) * 18.0 * kf * kf * df * self.u_k * hf / self.p;
        self.beta = 24.0 * hf * (df * floor).sqrt() * self.chi.ln();
    }
}

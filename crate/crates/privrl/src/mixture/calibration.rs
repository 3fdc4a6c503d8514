//! Noise scales and confidence widths for the linear-mixture agents.

use serde::{Deserialize, Serialize};

use super::MixtureError;
use crate::privacy::{
    gauss_matrix_eigen_bound, gauss_vector_bound, laplace_matrix_eigen_bound, laplace_scale,
    laplace_vector_bound, simple_composition_split, tree_depth, NoiseDist, NoiseProfile,
    PrivacyBudget, Regime,
};

/// `K₀ = ⌈log₂ K + 1⌉`.
pub fn k0(k: usize) -> usize {
    tree_depth(k)
}

/// JDP tree-node scale for UCRL-VTR:
/// `σ_B = (32H²/ε)·√(2HK₀ ln(8H/δ) ln(4/δ) ln(16HK₀/δ))`.
pub fn vtr_jdp_sigma(budget: PrivacyBudget, h: usize, k: usize) -> f64 {
    let (e, dl) = (budget.epsilon, budget.delta);
    let hf = h as f64;
    let k0 = k0(k) as f64;
    32.0 * hf * hf / e
        * (2.0 * hf * k0 * (8.0 * hf / dl).ln() * (4.0 / dl).ln() * (16.0 * hf * k0 / dl).ln()).sqrt()
}

/// LDP user-noise scale for UCRL-VTR: `σ_B = (4H³/ε)·√(2 ln(4H/δ))`.
pub fn vtr_ldp_sigma(budget: PrivacyBudget, h: usize) -> f64 {
    let hf = h as f64;
    4.0 * hf.powi(3) / budget.epsilon * (2.0 * (4.0 * hf / budget.delta).ln()).sqrt()
}

/// L1 sensitivities `(2dH², 2√d·H²)` of the upper triangle of `XXᵀ` and of
/// `Xy` when `‖X‖₂ ≤ H`, `|y| ≤ H`.
pub fn vtr_l1_sensitivities(d: usize, h: usize) -> (f64, f64) {
    let hh = (h * h) as f64;
    (2.0 * d as f64 * hh, 2.0 * (d as f64).sqrt() * hh)
}

/// Pure-JDP Laplace scales `(b_matrix, b_vector)`: the budget is split by
/// simple composition over two streams, `H` stages and `K₀` tree nodes.
pub fn vtr_pure_jdp_scales(budget: PrivacyBudget, d: usize, h: usize, k: usize) -> Result<(f64, f64), MixtureError> {
    let per_node = simple_composition_split(budget, 2 * h * k0(k))?;
    let (sm, sv) = vtr_l1_sensitivities(d, h);
    Ok((laplace_scale(sm, per_node.epsilon)?, laplace_scale(sv, per_node.epsilon)?))
}

/// Pure-LDP Laplace scales: simple composition over `2H` releases per user.
pub fn vtr_pure_ldp_scales(budget: PrivacyBudget, d: usize, h: usize) -> Result<(f64, f64), MixtureError> {
    let per_release = simple_composition_split(budget, 2 * h)?;
    let (sm, sv) = vtr_l1_sensitivities(d, h);
    Ok((laplace_scale(sm, per_release.epsilon)?, laplace_scale(sv, per_release.epsilon)?))
}

/// Inputs of the UCRL-VTR width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub c_w: f64,
    pub lambda: f64,
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub p: f64,
    pub upsilon_low: f64,
    pub upsilon_high: f64,
    pub c_k: f64,
}

/// `√(2H² ln(3H(1+KH)^{d/2}/p))`, evaluated in log space.
pub fn self_normalized_term(h: usize, k: usize, d: usize, p: f64) -> f64 {
    let hf = h as f64;
    let log_arg = (3.0 * hf / p).ln() + d as f64 / 2.0 * (k as f64 * hf).ln_1p();
    (2.0 * hf * hf * log_arg).sqrt()
}

/// Closed-form width `3(C_w+1)√(λ+Υ_low) + √(2H² ln(3H(1+KH)^{d/2}/p))`.
pub fn corollary_beta(p: &BetaParams) -> f64 {
    3.0 * (p.c_w + 1.0) * (p.lambda + p.upsilon_low).sqrt() + self_normalized_term(p.h, p.k, p.d, p.p)
}

/// Smallest width admitted by the generic condition:
/// `((λ+Υ_high)C_w + C_k)/√(λ+Υ_low) + √(2H² ln(3H(1+KH)^{d/2}/p))`.
pub fn generic_beta_lower_bound(p: &BetaParams) -> f64 {
    ((p.lambda + p.upsilon_high) * p.c_w + p.c_k) / (p.lambda + p.upsilon_low).sqrt()
        + self_normalized_term(p.h, p.k, p.d, p.p)
}

/// Accept `beta` if it satisfies the generic condition.
pub fn check_generic_beta(beta: f64, p: &BetaParams) -> Result<f64, MixtureError> {
    let required = generic_beta_lower_bound(p);
    if beta >= required {
        Ok(beta)
    } else {
        Err(MixtureError::BetaTooSmall { beta, required })
    }
}

/// Agent block shared by the mixture agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSettings {
    pub regime: Regime,
    #[serde(default)]
    pub dist: NoiseDist,
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
    #[serde(default = "one")]
    pub scale_override: f64,
}

fn one() -> f64 {
    1.0
}

impl MixtureSettings {
    pub fn non_private(p: f64) -> Self {
        Self { regime: Regime::None, dist: NoiseDist::Gaussian, epsilon: 0.5, delta: 0.1, p, scale_override: 1.0 }
    }

    pub fn budget(&self) -> Result<PrivacyBudget, MixtureError> {
        let budget = PrivacyBudget::new(self.epsilon, self.delta)?;
        match (self.regime, self.dist) {
            (Regime::None, _) => {}
            (_, NoiseDist::Gaussian) => budget.require_approx()?,
            (_, NoiseDist::Laplace) => {
                if !budget.is_pure() {
                    return Err(MixtureError::Config("Laplace noise calibrates pure DP; set delta = 0".into()));
                }
            }
        }
        Ok(budget)
    }

    fn validate_p(&self) -> Result<(), MixtureError> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(MixtureError::Config(format!("failure probability p must lie in (0, 1), got {}", self.p)));
        }
        if !(self.scale_override.is_finite() && self.scale_override > 0.0) {
            return Err(MixtureError::Config(format!(
                "scale_override must be positive, got {}",
                self.scale_override
            )));
        }
        Ok(())
    }
}

/// Derived quantities of UCRL-VTR for one configuration.
///
/// `sigma_*` and `shift` are the calibrated values; `upsilon`, `c_k` and
/// `beta` already include `scale_override`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VtrCalibration {
    pub settings: MixtureSettings,
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub c_w: f64,
    pub lambda: f64,
    pub k0: usize,
    /// Number of noise draws summed into one released statistic (`K₀` or `K`).
    pub noise_count: usize,
    pub sigma_matrix: f64,
    pub sigma_vector: f64,
    pub upsilon: f64,
    pub c_k: f64,
    pub shift: f64,
    pub beta: f64,
    pub profile: NoiseProfile,
}

impl VtrCalibration {
    pub fn new(settings: MixtureSettings, d: usize, h: usize, k: usize, c_w: f64) -> Result<Self, MixtureError> {
        settings.validate_p()?;
        let budget = settings.budget()?;
        let lambda = (h * h) as f64;
        let k0 = k0(k);
        let alpha = settings.p / (6.0 * k as f64 * h as f64);
        let (noise_count, sigma_matrix, sigma_vector) = match (settings.regime, settings.dist) {
            (Regime::None, _) => (0, 0.0, 0.0),
            (Regime::Jdp, NoiseDist::Gaussian) => {
                let s = vtr_jdp_sigma(budget, h, k);
                (k0, s, s)
            }
            (Regime::Ldp, NoiseDist::Gaussian) => {
                let s = vtr_ldp_sigma(budget, h);
                (k, s, s)
            }
            (Regime::Jdp, NoiseDist::Laplace) => {
                let (m, v) = vtr_pure_jdp_scales(budget, d, h, k)?;
                (k0, m, v)
            }
            (Regime::Ldp, NoiseDist::Laplace) => {
                let (m, v) = vtr_pure_ldp_scales(budget, d, h)?;
                (k, m, v)
            }
        };
        let (upsilon_base, c_base) = noise_bounds(settings.dist, d, sigma_matrix, sigma_vector, noise_count, alpha);
        let s = settings.scale_override;
        let profile = if settings.regime == Regime::None {
            NoiseProfile::none()
        } else {
            NoiseProfile::new(settings.regime, settings.dist, sigma_matrix, sigma_vector, 2.0 * upsilon_base, s)?
        };
        let upsilon = upsilon_base * s;
        let c_k = c_base * s;
        let params = BetaParams {
            c_w,
            lambda,
            d,
            h,
            k,
            p: settings.p,
            upsilon_low: upsilon,
            upsilon_high: 3.0 * upsilon,
            c_k,
        };
        let beta = check_generic_beta(corollary_beta(&params), &params)?;
        Ok(Self {
            settings,
            d,
            h,
            k,
            c_w,
            lambda,
            k0,
            noise_count,
            sigma_matrix,
            sigma_vector,
            upsilon,
            c_k,
            shift: profile.effective_shift(),
            beta,
            profile,
        })
    }

    pub fn beta_params(&self) -> BetaParams {
        BetaParams {
            c_w: self.c_w,
            lambda: self.lambda,
            d: self.d,
            h: self.h,
            k: self.k,
            p: self.settings.p,
            upsilon_low: self.upsilon,
            upsilon_high: 3.0 * self.upsilon,
            c_k: self.c_k,
        }
    }
}

/// `(Υ, C)` for sums of `count` draws at failure level `alpha`; Laplace
/// bounds are queried at `alpha` so that `ln(d/α)` matches the pure-DP forms.
fn noise_bounds(dist: NoiseDist, d: usize, sm: f64, sv: f64, count: usize, alpha: f64) -> (f64, f64) {
    if count == 0 {
        return (0.0, 0.0);
    }
    match dist {
        NoiseDist::Gaussian => (
            gauss_matrix_eigen_bound(d, sm, count, alpha),
            gauss_vector_bound(d, sv, count, alpha),
        ),
        NoiseDist::Laplace => (
            laplace_matrix_eigen_bound(d, sm, count, alpha),
            laplace_vector_bound(d, sv, count, alpha),
        ),
    }
}

/// JDP tree-node scales `(σ_{B,1}, σ_{B,2})` for UCRL-VTR+:
/// `(64d/ε)·R` and `(64H⁴/ε)·R` with
/// `R = √(2HK₀ ln(16H/δ) ln(8/δ) ln(32HK₀/δ))`.
pub fn vtrplus_jdp_sigmas(budget: PrivacyBudget, d: usize, h: usize, k: usize) -> (f64, f64) {
    let (e, dl) = (budget.epsilon, budget.delta);
    let hf = h as f64;
    let k0 = k0(k) as f64;
    let root = (2.0 * hf * k0 * (16.0 * hf / dl).ln() * (8.0 / dl).ln() * (32.0 * hf * k0 / dl).ln()).sqrt();
    (64.0 * d as f64 / e * root, 64.0 * hf.powi(4) / e * root)
}

/// LDP user-noise scales `(σ_{B,1}, σ_{B,2}) = (8dH/ε, 8H⁵/ε)·√(2 ln(8H/δ))`.
pub fn vtrplus_ldp_sigmas(budget: PrivacyBudget, d: usize, h: usize) -> (f64, f64) {
    let hf = h as f64;
    let root = (2.0 * (8.0 * hf / budget.delta).ln()).sqrt();
    (8.0 * d as f64 * hf / budget.epsilon * root, 8.0 * hf.powi(5) / budget.epsilon * root)
}

/// L1 sensitivities for the two UCRL-VTR+ streams: `(2d², 2d^{3/2})` for the
/// weighted first moment and `(2dH⁴, 2√d·H⁴)` for the second moment.
pub fn vtrplus_l1_sensitivities(d: usize, h: usize) -> [(f64, f64); 2] {
    let df = d as f64;
    let h4 = (h as f64).powi(4);
    [(2.0 * df * df, 2.0 * df * df.sqrt()), (2.0 * df * h4, 2.0 * df.sqrt() * h4)]
}

/// Derived quantities of UCRL-VTR+ (stream 1: variance-weighted first
/// moment; stream 2: second moment). Bounds include `scale_override`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VtrPlusCalibration {
    pub settings: MixtureSettings,
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub c_w: f64,
    pub lambda: f64,
    pub k0: usize,
    pub noise_count: usize,
    pub sigma: [(f64, f64); 2],
    pub upsilon: [f64; 2],
    pub c: [f64; 2],
    pub profiles: [NoiseProfile; 2],
}

impl VtrPlusCalibration {
    pub fn new(settings: MixtureSettings, d: usize, h: usize, k: usize, c_w: f64) -> Result<Self, MixtureError> {
        settings.validate_p()?;
        let budget = settings.budget()?;
        let k0 = k0(k);
        let alpha = settings.p / (24.0 * k as f64 * h as f64);
        let (noise_count, sigma) = match (settings.regime, settings.dist) {
            (Regime::None, _) => (0, [(0.0, 0.0); 2]),
            (Regime::Jdp, NoiseDist::Gaussian) => {
                let (a, b) = vtrplus_jdp_sigmas(budget, d, h, k);
                (k0, [(a, a), (b, b)])
            }
            (Regime::Ldp, NoiseDist::Gaussian) => {
                let (a, b) = vtrplus_ldp_sigmas(budget, d, h);
                (k, [(a, a), (b, b)])
            }
            (regime, NoiseDist::Laplace) => {
                let count = if regime == Regime::Jdp { 4 * h * k0 } else { 4 * h };
                let per = simple_composition_split(budget, count)?;
                let sens = vtrplus_l1_sensitivities(d, h);
                let scales = [
                    (laplace_scale(sens[0].0, per.epsilon)?, laplace_scale(sens[0].1, per.epsilon)?),
                    (laplace_scale(sens[1].0, per.epsilon)?, laplace_scale(sens[1].1, per.epsilon)?),
                ];
                (if regime == Regime::Jdp { k0 } else { k }, scales)
            }
        };
        let s = settings.scale_override;
        let mut upsilon = [0.0; 2];
        let mut c = [0.0; 2];
        let mut profiles = [NoiseProfile::none(); 2];
        for i in 0..2 {
            let (u, cc) = noise_bounds(settings.dist, d, sigma[i].0, sigma[i].1, noise_count, alpha);
            if settings.regime != Regime::None {
                profiles[i] = NoiseProfile::new(settings.regime, settings.dist, sigma[i].0, sigma[i].1, 2.0 * u, s)?;
            }
            upsilon[i] = u * s;
            c[i] = cc * s;
        }
        Ok(Self { settings, d, h, k, c_w, lambda: 1.0, k0, noise_count, sigma, upsilon, c, profiles })
    }

    fn log_term(&self, episode: usize) -> f64 {
        let kk = episode.max(1) as f64;
        (24.0 * kk * kk * self.h as f64 / self.settings.p).ln()
    }

    /// `β̌_k`.
    pub fn beta_check(&self, episode: usize) -> f64 {
        let l = self.log_term(episode);
        let d = self.d as f64;
        3.0 * (self.c_w + 1.0) * (self.lambda + self.upsilon[0]).sqrt()
            + 8.0 * d * ((self.k as f64 / self.lambda).ln_1p() * l).sqrt()
            + 4.0 * d.sqrt() * l
    }

    /// `β̂_k`.
    pub fn beta_hat(&self, episode: usize) -> f64 {
        let l = self.log_term(episode);
        let d = self.d as f64;
        3.0 * (self.c_w + 1.0) * (self.lambda + self.upsilon[0]).sqrt()
            + 8.0 * (d * (self.k as f64 / self.lambda).ln_1p() * l).sqrt()
            + 4.0 * d.sqrt() * l
    }

    /// `β̃_k`.
    pub fn beta_tilde(&self, episode: usize) -> f64 {
        let l = self.log_term(episode);
        let d = self.d as f64;
        let h2 = (self.h * self.h) as f64;
        3.0 * (self.c_w + 1.0) * (self.lambda + self.upsilon[1]).sqrt()
            + 8.0 * (d * h2 * h2 * (self.k as f64 * h2 * h2 / (d * self.lambda)).ln_1p() * l).sqrt()
            + 4.0 * h2 * l
    }
}

use serde::{Deserialize, Serialize};

use super::{regime_name, Algorithm, AgentSpec, ExperimentConfig, HarnessError};
use crate::linear::{LsviParams, LsviVariant};
use crate::mixture::calibration::{vtr_l1_sensitivities, vtrplus_l1_sensitivities};
use crate::mixture::{VtrCalibration, VtrPlusCalibration};
use crate::privacy::{
    advanced_composition_split, gaussian_sigma, laplace_scale, simple_composition_split, NoiseDist,
    PrivacyBudget, Regime,
};

/// Relative slack when comparing configured and required scales.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// One mechanism of an agent's pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub mechanism: String,
    /// Per-invocation budget after the composition splits.
    pub epsilon: f64,
    pub delta: f64,
    /// L2 sensitivity (Gaussian) or L1 sensitivity (Laplace).
    pub sensitivity: f64,
    /// Minimal scale from the Gaussian / Laplace calibration.
    pub required: f64,
    /// Scale the agent actually uses, `scale_override` included.
    pub configured: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub algorithm: Algorithm,
    pub regime: String,
    pub dist: NoiseDist,
    pub epsilon: f64,
    pub delta: f64,
    pub scale_override: f64,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    /// Every mechanism passes; an empty (non-private) report passes.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.ratio).reduce(f64::min)
    }

    /// Fixed-width table, one mechanism per line, then an overall verdict.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} regime={} dist={:?} epsilon={} delta={} scale_override={}\n",
            self.algorithm.name(),
            self.regime,
            self.dist,
            self.epsilon,
            self.delta,
            self.scale_override
        );
        out.push_str(&format!(
            "{:<28} {:>12} {:>12} {:>10} {:>14} {:>14} {:>10}  verdict\n",
            "mechanism", "eps'", "delta'", "sens", "required", "configured", "ratio"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>12.5e} {:>12.5e} {:>10.4} {:>14.6e} {:>14.6e} {:>10.6}  {}\n",
                r.mechanism,
                r.epsilon,
                r.delta,
                r.sensitivity,
                r.required,
                r.configured,
                r.ratio,
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        if self.rows.is_empty() {
            out.push_str("no private mechanisms\n");
        }
        out.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

fn row(mechanism: &str, budget: PrivacyBudget, sensitivity: f64, required: f64, configured: f64) -> AuditRow {
    let ratio = configured / required;
    AuditRow {
        mechanism: mechanism.to_string(),
        epsilon: budget.epsilon,
        delta: budget.delta,
        sensitivity,
        required,
        configured,
        ratio,
        pass: ratio >= 1.0 - AUDIT_TOLERANCE,
    }
}

fn gaussian_row(mechanism: &str, budget: PrivacyBudget, sensitivity: f64, configured: f64) -> Result<AuditRow, HarnessError> {
    Ok(row(mechanism, budget, sensitivity, gaussian_sigma(sensitivity, budget)?, configured))
}

fn laplace_row(mechanism: &str, budget: PrivacyBudget, sensitivity: f64, configured: f64) -> Result<AuditRow, HarnessError> {
    Ok(row(mechanism, budget, sensitivity, laplace_scale(sensitivity, budget.epsilon)?, configured))
}

/// Re-derive, for every mechanism of the configured agent, the per-invocation
/// budget and the minimal noise scale, and compare it with the scale the agent
/// is configured to use.
pub fn audit_privacy_arithmetic(config: &ExperimentConfig) -> Result<AuditReport, HarnessError> {
    let agent = &config.agent;
    let budget = PrivacyBudget::new(agent.epsilon, agent.delta)?;
    let rows = if agent.regime == Regime::None {
        Vec::new()
    } else {
        let (s, a, h) = (config.env.s, config.env.a, config.env.h);
        let c_w = s as f64 * (a as f64).sqrt();
        let d = config.dim();
        match agent.algorithm {
            Algorithm::UcrlVtr => {
                let cal = VtrCalibration::new(agent.mixture_settings(), d, h, config.k, c_w)?;
                vtr_rows(&cal, budget)?
            }
            Algorithm::UcrlVtrPlus => {
                let cal = VtrPlusCalibration::new(agent.mixture_settings(), d, h, config.k, c_w)?;
                vtrplus_rows(&cal, budget)?
            }
            Algorithm::LsviUcbBatch => {
                let params = LsviParams::new(config.k, h, d, budget, agent.p, agent.variant, agent.regime)?
                    .with_scale(agent.scale_override)?;
                lsvi_rows(&params, budget)?
            }
        }
    };
    Ok(report(agent, rows))
}

fn report(agent: &AgentSpec, rows: Vec<AuditRow>) -> AuditReport {
    let dist = match agent.algorithm {
        Algorithm::LsviUcbBatch if agent.variant == LsviVariant::PureJdp => NoiseDist::Laplace,
        Algorithm::LsviUcbBatch => NoiseDist::Gaussian,
        _ => agent.dist,
    };
    AuditReport {
        algorithm: agent.algorithm,
        regime: regime_name(agent.regime).to_string(),
        dist,
        epsilon: agent.epsilon,
        delta: agent.delta,
        scale_override: agent.scale_override,
        rows,
    }
}

fn vtr_rows(cal: &VtrCalibration, budget: PrivacyBudget) -> Result<Vec<AuditRow>, HarnessError> {
    let (h, k0) = (cal.h, cal.k0);
    let hh = (h * h) as f64;
    let (sm, sv) = (cal.profile.effective_sigma_matrix(), cal.profile.effective_sigma_vector());
    let jdp = cal.settings.regime == Regime::Jdp;
    Ok(match cal.settings.dist {
        NoiseDist::Gaussian => {
            let per = if jdp {
                let half = simple_composition_split(budget, 2)?;
                advanced_composition_split(advanced_composition_split(half, h)?, k0)?
            } else {
                simple_composition_split(budget, 2 * h)?
            };
            let (m, v) = if jdp { ("gram tree node", "target tree node") } else { ("user gram", "user target") };
            vec![gaussian_row(m, per, 2.0 * hh, sm)?, gaussian_row(v, per, 2.0 * hh, sv)?]
        }
        NoiseDist::Laplace => {
            let count = if jdp { 2 * h * k0 } else { 2 * h };
            let per = simple_composition_split(budget, count)?;
            let (lm, lv) = vtr_l1_sensitivities(cal.d, h);
            let (m, v) = if jdp { ("gram tree node", "target tree node") } else { ("user gram", "user target") };
            vec![laplace_row(m, per, lm, sm)?, laplace_row(v, per, lv, sv)?]
        }
    })
}

fn vtrplus_rows(cal: &VtrPlusCalibration, budget: PrivacyBudget) -> Result<Vec<AuditRow>, HarnessError> {
    let (d, h, k0) = (cal.d as f64, cal.h, cal.k0);
    let h4 = (h as f64).powi(4);
    let jdp = cal.settings.regime == Regime::Jdp;
    let names: [[&str; 2]; 2] = if jdp {
        [["first gram tree node", "first target tree node"], ["second gram tree node", "second target tree node"]]
    } else {
        [["first user gram", "first user target"], ["second user gram", "second user target"]]
    };
    let mut rows = Vec::new();
    match cal.settings.dist {
        NoiseDist::Gaussian => {
            let per = if jdp {
                let quarter = simple_composition_split(budget, 4)?;
                advanced_composition_split(advanced_composition_split(quarter, h)?, k0)?
            } else {
                simple_composition_split(budget, 4 * h)?
            };
            for (i, sens) in [2.0 * d, 2.0 * h4].into_iter().enumerate() {
                let p = &cal.profiles[i];
                rows.push(gaussian_row(names[i][0], per, sens, p.effective_sigma_matrix())?);
                rows.push(gaussian_row(names[i][1], per, sens, p.effective_sigma_vector())?);
            }
        }
        NoiseDist::Laplace => {
            let count = if jdp { 4 * h * k0 } else { 4 * h };
            let per = simple_composition_split(budget, count)?;
            for (i, (lm, lv)) in vtrplus_l1_sensitivities(cal.d, h).into_iter().enumerate() {
                let p = &cal.profiles[i];
                rows.push(laplace_row(names[i][0], per, lm, p.effective_sigma_matrix())?);
                rows.push(laplace_row(names[i][1], per, lv, p.effective_sigma_vector())?);
            }
        }
    }
    Ok(rows)
}

fn lsvi_rows(params: &LsviParams, budget: PrivacyBudget) -> Result<Vec<AuditRow>, HarnessError> {
    let (h, b, b0) = (params.h, params.b, params.b0);
    let u_sens = 2.0 * (h as f64 + 1.0);
    let (sl, su) = (params.effective_sigma_lambda(), params.effective_sigma_u());
    Ok(match params.dist {
        NoiseDist::Gaussian => {
            let stage = advanced_composition_split(simple_composition_split(budget, 2)?, h)?;
            let per_batch = advanced_composition_split(stage, b)?;
            let per_node = advanced_composition_split(per_batch, b0)?;
            vec![
                gaussian_row("gram tree node", per_node, 2.0, sl)?,
                gaussian_row("target release", per_batch, u_sens, su)?,
            ]
        }
        NoiseDist::Laplace => {
            let per_node = simple_composition_split(budget, 2 * h * b * b0)?;
            let per_batch = simple_composition_split(budget, 2 * h * b)?;
            vec![
                laplace_row("gram tree node", per_node, 2.0, sl)?,
                laplace_row("target release", per_batch, u_sens, su)?,
            ]
        }
    })
}

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::envs::EnvSpec;
use crate::linear::{LsviParams, LsviVariant};
use crate::mixture::{MixtureSettings, VtrCalibration, VtrPlusCalibration};
use crate::privacy::{NoiseDist, PrivacyBudget, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    UcrlVtr,
    UcrlVtrPlus,
    LsviUcbBatch,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::UcrlVtr => "ucrl_vtr",
            Algorithm::UcrlVtrPlus => "ucrl_vtr_plus",
            Algorithm::LsviUcbBatch => "lsvi_ucb_batch",
        }
    }
}

pub(crate) fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::None => "none",
        Regime::Jdp => "jdp",
        Regime::Ldp => "ldp",
    }
}

fn default_regime() -> Regime {
    Regime::Jdp
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// Agent block of a config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub algorithm: Algorithm,
    #[serde(default = "default_regime")]
    pub regime: Regime,
    /// Noise family of the mixture agents; the linear agent derives it from `variant`.
    #[serde(default)]
    pub dist: NoiseDist,
    #[serde(default)]
    pub variant: LsviVariant,
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
    #[serde(default = "one")]
    pub scale_override: f64,
}

impl AgentSpec {
    pub fn mixture_settings(&self) -> MixtureSettings {
        MixtureSettings {
            regime: self.regime,
            dist: self.dist,
            epsilon: self.epsilon,
            delta: self.delta,
            p: self.p,
            scale_override: self.scale_override,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitSpec {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
}

impl Default for EmitSpec {
    fn default() -> Self {
        Self { csv: true, json: true }
    }
}

/// One experiment: an environment, an agent, `K` episodes and a list of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub agent: AgentSpec,
    #[serde(rename = "K")]
    pub k: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub emit: EmitSpec,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.k == 0 {
            return Err(HarnessError::Config("K must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("seeds must not be empty".into()));
        }
        let mut seen = HashSet::new();
        for s in &self.seeds {
            if !seen.insert(*s) {
                return Err(HarnessError::Config(format!("duplicate seed {s}")));
            }
        }
        Ok(())
    }

    /// Feature dimension of the agent's encoding.
    pub fn dim(&self) -> usize {
        match self.agent.algorithm {
            Algorithm::UcrlVtr | Algorithm::UcrlVtrPlus => self.env.s * self.env.s * self.env.a,
            Algorithm::LsviUcbBatch => self.env.s * self.env.a,
        }
    }

    /// Derived parameters of the configured agent.
    pub fn derived(&self) -> Result<DerivedParams, HarnessError> {
        let (s, a, h) = (self.env.s, self.env.a, self.env.h);
        let c_w = s as f64 * (a as f64).sqrt();
        let d = self.dim();
        Ok(match self.agent.algorithm {
            Algorithm::UcrlVtr => {
                DerivedParams::UcrlVtr(VtrCalibration::new(self.agent.mixture_settings(), d, h, self.k, c_w)?)
            }
            Algorithm::UcrlVtrPlus => {
                DerivedParams::UcrlVtrPlus(VtrPlusCalibration::new(self.agent.mixture_settings(), d, h, self.k, c_w)?)
            }
            Algorithm::LsviUcbBatch => {
                let budget = PrivacyBudget::new(self.agent.epsilon, self.agent.delta)?;
                let params =
                    LsviParams::new(self.k, h, d, budget, self.agent.p, self.agent.variant, self.agent.regime)?
                        .with_scale(self.agent.scale_override)?;
                DerivedParams::LsviUcbBatch(params)
            }
        })
    }
}

/// Derived parameters echoed in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum DerivedParams {
    UcrlVtr(VtrCalibration),
    UcrlVtrPlus(VtrPlusCalibration),
    LsviUcbBatch(LsviParams),
}

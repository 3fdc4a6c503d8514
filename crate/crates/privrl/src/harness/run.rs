use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{regime_name, Algorithm, ExperimentConfig, HarnessError};
use crate::envs::{optimal_values, policy_value, MixtureEncoding, TabularMdp};
use crate::linear::{LsviAgent, LsviParams};
use crate::mixture::{VtrAgent, VtrPlusAgent};
use crate::privacy::PrivacyBudget;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "PRIVRL_WORKERS";

/// One episode of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: usize,
    /// `V*_1(s_1) − V^{π_k}_1(s_1)`.
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub beta: f64,
    /// Released batch used in this episode (linear agent only).
    pub batch: Option<usize>,
    /// Mixture agents: `‖w_h − w̃_h‖_{Λ̃_h} ≤ β` at every stage. Linear
    /// agent: the noise of the current release lies within its bounds.
    pub coverage: bool,
    /// Stages whose confidence set misses the true parameter (mixture agents).
    pub coverage_violations: usize,
    pub initial_state: usize,
    /// `V*_1(s_1)`.
    pub optimal_value: f64,
    /// The agent's optimistic `Ṽ_1(s_1)`.
    pub optimistic_value: f64,
    /// `Σ_h min{H, 2β‖φ‖_{Λ̃⁻¹}}` along the trajectory (linear agent only).
    pub bonus_sum: Option<f64>,
}

/// Per-episode exact regret trace of one `(algorithm, seed, config)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub algorithm: Algorithm,
    pub regime: String,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub rows: Vec<EpisodeRow>,
}

impl RegretRecord {
    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_regret)
    }

    /// Cumulative regret after episode `k` (1-based).
    pub fn regret_at(&self, k: usize) -> f64 {
        self.rows[k - 1].cum_regret
    }
}

/// Run every seed of `config` on a worker pool sized by [`WORKERS_ENV`];
/// records come back sorted by seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RegretRecord>, HarnessError> {
    config.validate()?;
    let mdp = config.env.build()?;
    config.derived()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let mut records = pool.install(|| {
        config
            .seeds
            .par_iter()
            .map(|seed| {
                run_seed(config, &mdp, *seed).map_err(|e| HarnessError::Run { seed: *seed, source: Box::new(e) })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.sort_by_key(|r| r.seed);
    Ok(records)
}

/// One seed of `config` on `mdp`.
pub fn run_seed(config: &ExperimentConfig, mdp: &TabularMdp, seed: u64) -> Result<RegretRecord, HarnessError> {
    let agent = &config.agent;
    let (v_star, _) = optimal_values(mdp);
    let mut rows = Vec::with_capacity(config.k);
    let mut cum = 0.0;
    let mut push = |rows: &mut Vec<EpisodeRow>, mut row: EpisodeRow, v_pi: f64| {
        row.optimal_value = v_star[0][row.initial_state];
        row.inst_regret = (row.optimal_value - v_pi).max(0.0);
        cum += row.inst_regret;
        row.cum_regret = cum;
        rows.push(row);
    };
    match agent.algorithm {
        Algorithm::UcrlVtr => {
            let enc = MixtureEncoding::from_mdp(mdp);
            let mut a = VtrAgent::from_settings(mdp, agent.mixture_settings(), config.k, seed)?;
            for k in 1..=config.k {
                let plan = a.plan()?;
                let beta = a.beta();
                let violations = a.confidence_radii(&enc.w).iter().filter(|r| **r > beta).count();
                let tr = a.user_round(mdp, &plan, k);
                let s1 = tr.states[0];
                let v_pi = policy_value(mdp, &plan.policy)[0][s1];
                push(&mut rows, mixture_row(k, beta, violations, s1, plan.v[0][s1]), v_pi);
                a.server_update(&tr.payloads)?;
            }
        }
        Algorithm::UcrlVtrPlus => {
            let enc = MixtureEncoding::from_mdp(mdp);
            let mut a = VtrPlusAgent::from_settings(mdp, agent.mixture_settings(), config.k, seed)?;
            for k in 1..=config.k {
                let plan = a.plan()?;
                let beta = a.betas()[0];
                let violations = a.confidence_radii(&enc.w).iter().filter(|r| **r > beta).count();
                let tr = a.user_round(mdp, &plan, k)?;
                let s1 = tr.states[0];
                let v_pi = policy_value(mdp, &plan.policy)[0][s1];
                push(&mut rows, mixture_row(k, beta, violations, s1, plan.v[0][s1]), v_pi);
                a.server_update(&tr.payloads)?;
            }
        }
        Algorithm::LsviUcbBatch => {
            let params = lsvi_params(config)?;
            let mut a = LsviAgent::new(mdp, params, seed)?;
            let mut bounded = true;
            for k in 1..=config.k {
                let ep = a.play(mdp, k)?;
                let s1 = ep.steps[0].s;
                let v_pi = policy_value(mdp, a.policy())[0][s1];
                let row = EpisodeRow {
                    episode: k,
                    inst_regret: 0.0,
                    cum_regret: 0.0,
                    beta: a.beta(),
                    batch: Some(a.batch()),
                    coverage: bounded,
                    coverage_violations: 0,
                    initial_state: s1,
                    optimal_value: 0.0,
                    optimistic_value: a.values()[0][s1],
                    bonus_sum: Some(ep.bonus_sum),
                };
                push(&mut rows, row, v_pi);
                if a.observe(&ep)?.is_some() {
                    bounded = a.batch_records().last().is_some_and(|r| r.noise_bounded(a.params()));
                }
            }
        }
    }
    Ok(RegretRecord {
        algorithm: agent.algorithm,
        regime: regime_name(agent.regime).to_string(),
        epsilon: agent.epsilon,
        delta: agent.delta,
        seed,
        rows,
    })
}

fn mixture_row(k: usize, beta: f64, violations: usize, s1: usize, optimistic: f64) -> EpisodeRow {
    EpisodeRow {
        episode: k,
        inst_regret: 0.0,
        cum_regret: 0.0,
        beta,
        batch: None,
        coverage: violations == 0,
        coverage_violations: violations,
        initial_state: s1,
        optimal_value: 0.0,
        optimistic_value: optimistic,
        bonus_sum: None,
    }
}

fn lsvi_params(config: &ExperimentConfig) -> Result<LsviParams, HarnessError> {
    let agent = &config.agent;
    let budget = PrivacyBudget::new(agent.epsilon, agent.delta)?;
    Ok(LsviParams::new(config.k, config.env.h, config.dim(), budget, agent.p, agent.variant, agent.regime)?
        .with_scale(agent.scale_override)?)
}

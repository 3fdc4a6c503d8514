//! UCRL-VTR under no privacy, joint DP (tree aggregation on the server) and
//! local DP (users perturb their own statistics).
//!
//! At small K the calibrated width is far above H, so every optimistic value
//! clips at H and the plan never changes; the second half of the output
//! narrows the width by hand to show the agent actually learning.

use privrl::envs::{optimal_values, policy_value, random_dense, TabularMdp};
use privrl::mixture::{MixtureSettings, VtrAgent, VtrCalibration};
use privrl::privacy::{NoiseDist, Regime};

fn regret(mdp: &TabularMdp, mut agent: VtrAgent, k_total: usize) -> Result<f64, Box<dyn std::error::Error>> {
    let (v_star, _) = optimal_values(mdp);
    let mut total = 0.0;
    for k in 1..=k_total {
        let plan = agent.plan()?;
        let tr = agent.user_round(mdp, &plan, k);
        let s1 = tr.states[0];
        total += v_star[0][s1] - policy_value(mdp, &plan.policy)[0][s1];
        agent.server_update(&tr.payloads)?;
    }
    Ok(total)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mdp = random_dense(3, 2, 3, 5)?;
    let (s, a, h) = (3, 2, 3);
    let k_total = 300;
    for regime in [Regime::None, Regime::Jdp, Regime::Ldp] {
        let settings =
            MixtureSettings { regime, dist: NoiseDist::Gaussian, epsilon: 0.9, delta: 0.1, p: 0.1, scale_override: 0.02 };
        let calib = VtrCalibration::new(settings, s * s * a, h, k_total, s as f64 * (a as f64).sqrt())?;
        let r = regret(&mdp, VtrAgent::new(&mdp, calib, 1)?, k_total)?;
        let mut narrow = calib;
        narrow.beta = 0.5;
        let rn = regret(&mdp, VtrAgent::new(&mdp, narrow, 1)?, k_total)?;
        println!(
            "{regime:?}: sigma {:.1}, width {:.2} -> regret {r:.3}; width 0.5 -> regret {rn:.3}",
            calib.sigma_matrix, calib.beta
        );
    }
    Ok(())
}

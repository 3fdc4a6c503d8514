//! Variance-aware UCRL-VTR+ with JDP noise on both moment statistics.

use privrl::envs::{optimal_values, policy_value, river_swim};
use privrl::mixture::{MixtureSettings, VtrPlusAgent};
use privrl::privacy::{NoiseDist, Regime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mdp = river_swim(3, 2, 4)?;
    let (v_star, _) = optimal_values(&mdp);
    let settings =
        MixtureSettings { regime: Regime::Jdp, dist: NoiseDist::Gaussian, epsilon: 0.9, delta: 0.1, p: 0.1, scale_override: 0.01 };
    let k_total = 200;
    let mut agent = VtrPlusAgent::from_settings(&mdp, settings, k_total, 4)?;
    let mut regret = 0.0;
    for k in 1..=k_total {
        let plan = agent.plan()?;
        let tr = agent.user_round(&mdp, &plan, k)?;
        let s1 = tr.states[0];
        regret += v_star[0][s1] - policy_value(&mdp, &plan.policy)[0][s1];
        agent.server_update(&tr.payloads)?;
        if k % 50 == 0 {
            let [hat, check, tilde] = agent.betas();
            println!("k = {k}: widths {hat:.3} / {check:.3} / {tilde:.3}, regret {regret:.3}");
        }
    }
    Ok(())
}

//! Batched LSVI-UCB with JDP: the policy changes only at batch boundaries,
//! and each boundary releases a privatized Gram matrix.

use privrl::envs::random_dense;
use privrl::linear::{LsviAgent, LsviParams, LsviVariant};
use privrl::privacy::{PrivacyBudget, Regime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mdp = random_dense(3, 2, 3, 2)?;
    let budget = PrivacyBudget::new(1.0, 0.1)?;
    let params = LsviParams::new(2000, 3, 6, budget, 0.1, LsviVariant::ApproxJdp, Regime::Jdp)?.with_scale(0.05)?;
    println!("B = {} batches of {} episodes, beta {:.3}", params.b, params.batch_len, params.beta);
    let mut agent = LsviAgent::new(&mdp, params, 1)?;
    for k in 1..=params.k {
        let ep = agent.play(&mdp, k)?;
        if let Some(b) = agent.observe(&ep)? {
            println!("episode {k}: switched to batch {b}");
        }
    }
    for r in agent.batch_records() {
        println!("min eigenvalue {:.2}, noise bounded: {}", r.min_eigen, r.noise_bounded(&params));
    }
    Ok(())
}

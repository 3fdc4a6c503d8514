//! Exact dynamic-programming oracles on the two environment families.

use privrl::envs::{optimal_values, policy_value, random_dense, river_swim, MixtureEncoding};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let river = river_swim(5, 2, 8)?;
    let (v, pi) = optimal_values(&river);
    println!("river swim V*_1 = {:?}", v[0]);
    println!("river swim greedy actions at h = 1: {:?}", pi[0]);

    let mdp = random_dense(4, 2, 3, 11)?;
    let (v, pi) = optimal_values(&mdp);
    let always_zero = vec![vec![0; 4]; 3];
    let v0 = policy_value(&mdp, &always_zero);
    for s in 0..4 {
        println!("state {s}: V* = {:.4}, V(always action 0) = {:.4}, gap {:.4}", v[0][s], v0[0][s], v[0][s] - v0[0][s]);
    }
    assert_eq!(policy_value(&mdp, &pi), v);

    let enc = MixtureEncoding::from_mdp(&mdp);
    println!("mixture encoding dim {}, |w_1| = {:.4}", enc.w[0].len(), enc.w[0].norm());
    Ok(())
}

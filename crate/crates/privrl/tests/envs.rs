use privrl::envs::{
    argmax, optimal_values, policy_value, random_dense, river_swim, EnvError, EnvSpec, Family, LinearEncoding,
    MixtureEncoding, TabularMdp,
};
use privrl::rng::{stream, Role};

fn two_state() -> TabularMdp {
    // H = 2, S = 2, A = 2; action 1 moves to state 1, which pays 1
    let rewards = vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0];
    let mut trans = Vec::new();
    for _h in 0..2 {
        for _s in 0..2 {
            trans.extend_from_slice(&[1.0, 0.0]);
            trans.extend_from_slice(&[0.0, 1.0]);
        }
    }
    TabularMdp::new(2, 2, 2, rewards, trans, vec![1.0, 0.0]).unwrap()
}

#[test]
fn optimal_values_by_hand() {
    let m = two_state();
    let (v, pi) = optimal_values(&m);
    assert_eq!(v[1], vec![0.0, 1.0]);
    assert_eq!(v[0], vec![1.0, 2.0]);
    assert_eq!(pi[0][0], 1);
    assert_eq!(v[2], vec![0.0, 0.0]);
}

#[test]
fn policy_value_of_bad_policy() {
    let m = two_state();
    let stay = vec![vec![0, 0]; 2];
    assert_eq!(policy_value(&m, &stay)[0], vec![0.0, 1.0]);
}

#[test]
fn single_action_values_equal_for_every_policy() {
    let m = random_dense(3, 1, 4, 7).unwrap();
    let (v, pi) = optimal_values(&m);
    assert_eq!(policy_value(&m, &pi), v);
}

#[test]
fn encodings_reproduce_transitions() {
    let m = random_dense(3, 2, 2, 5).unwrap();
    let mix = MixtureEncoding::from_mdp(&m);
    let lin = LinearEncoding::from_mdp(&m);
    let v = vec![0.3, 1.2, 0.9];
    for h in 0..2 {
        for s in 0..3 {
            for a in 0..2 {
                let direct = m.expect(h, s, a, &v);
                assert!((mix.phi_v(&v, s, a).dot(&mix.w[h]) - direct).abs() < 1e-12);
                assert!((lin.expect(h, s, a, &v) - direct).abs() < 1e-12);
                for n in 0..3 {
                    assert!((mix.transition(h, s, a, n) - m.prob(h, s, a, n)).abs() < 1e-12);
                }
            }
        }
    }
    assert_eq!(mix.dim(), 18);
    assert_eq!(lin.dim(), 6);
    assert!(mix.w.iter().all(|w| w.norm() <= mix.c_w + 1e-12));
}

#[test]
fn sampling_follows_rows() {
    let m = river_swim(3, 2, 2).unwrap();
    let mut rng = stream(3, Role::Aux, 0, 0);
    let n = 20_000;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        counts[m.step(1, 1, 0, &mut rng).0] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let p = m.prob(0, 1, 1, i);
        assert!((*c as f64 / n as f64 - p).abs() < 0.02);
    }
}

#[test]
fn env_config_builds_families() {
    let spec = EnvSpec { family: Family::RandomDense, s: 4, a: 2, h: 3, seed: 11 };
    assert_eq!(spec.build().unwrap(), random_dense(4, 2, 3, 11).unwrap());
    let river = EnvSpec { family: Family::RiverSwim, s: 1, a: 2, h: 3, seed: 0 };
    assert!(matches!(river.build(), Err(EnvError::Shape(_))));
    let json = r#"{"family":"river_swim","S":5,"A":2,"H":4}"#;
    let parsed: EnvSpec = serde_json::from_str(json).unwrap();
    assert_eq!(parsed.build().unwrap(), river_swim(5, 2, 4).unwrap());
}

#[test]
fn invalid_rewards_are_rejected() {
    let err = TabularMdp::new(1, 1, 1, vec![1.5], vec![1.0], vec![1.0]).unwrap_err();
    assert!(matches!(err, EnvError::RewardRange { .. }));
    assert!(TabularMdp::new(1, 1, 1, vec![0.5], vec![1.0], vec![0.7]).is_err());
    assert!(TabularMdp::new(2, 1, 1, vec![0.5], vec![1.0], vec![1.0]).is_err());
}

#[test]
fn argmax_ties_go_low() {
    assert_eq!(argmax(&[1.0, 3.0, 3.0]), (1, 3.0));
    assert_eq!(argmax(&[2.0]), (0, 2.0));
}

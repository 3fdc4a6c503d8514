mod common;

use common::{lsvi_reference_beta, reference_lsvi};
use privrl::envs::{optimal_values, policy_value, random_dense, river_swim, TabularMdp};
use privrl::linear::{batch_count, LinearError, LsviAgent, LsviParams, LsviVariant};
use privrl::privacy::{PrivacyBudget, PrivacyError, Regime};

fn params(k: usize, h: usize, d: usize, eps: f64, delta: f64, variant: LsviVariant, regime: Regime) -> LsviParams {
    LsviParams::new(k, h, d, PrivacyBudget::new(eps, delta).unwrap(), 0.1, variant, regime).unwrap()
}

fn run(mdp: &TabularMdp, p: LsviParams, seed: u64) -> (Vec<f64>, LsviAgent) {
    let (v_star, _) = optimal_values(mdp);
    let mut agent = LsviAgent::new(mdp, p, seed).unwrap();
    let mut out = Vec::new();
    for k in 1..=p.k {
        let ep = agent.play(mdp, k).unwrap();
        let s1 = ep.steps[0].s;
        out.push((v_star[0][s1] - policy_value(mdp, agent.policy())[0][s1]).max(0.0));
        agent.observe(&ep).unwrap();
    }
    (out, agent)
}

#[test]
fn batch_count_example() {
    // (Kε)^{2/5} / (d^{3/5} H^{1/5}) = 6.3096 / 3.1713 → 2
    assert_eq!(batch_count(100, 5, 4, 1.0, LsviVariant::ApproxJdp), 2);
    assert_eq!(batch_count(100, 5, 4, 1.0, LsviVariant::NonBatched), 100);
    // (Kε)^{1/3} / (d^{2/3} H^{1/3}) = 4.6416 / 4.3089 → 2
    assert_eq!(batch_count(100, 5, 4, 1.0, LsviVariant::PureJdp), 2);
    assert_eq!(batch_count(1, 5, 4, 1.0, LsviVariant::ApproxJdp), 1);
}

#[test]
fn zero_noise_matches_reference_at_calibrated_width() {
    let mdp = random_dense(3, 2, 3, 2).unwrap();
    let p = params(150, 3, 6, 0.5, 0.1, LsviVariant::ApproxJdp, Regime::None);
    assert!((p.beta - lsvi_reference_beta(6, 3, 150, 0.1)).abs() <= 1e-9 * p.beta);
    for seed in [1, 2] {
        let (got, _) = run(&mdp, p, seed);
        assert_eq!(got, reference_lsvi(&mdp, 150, p.b, p.beta, seed));
    }
}

#[test]
fn zero_noise_matches_reference_at_small_width() {
    let mdp = river_swim(3, 2, 4).unwrap();
    let mut p = params(300, 4, 6, 1.0, 0.1, LsviVariant::NonBatched, Regime::None);
    p.beta = 0.3;
    for seed in [5, 6] {
        let (got, _) = run(&mdp, p, seed);
        assert_eq!(got, reference_lsvi(&mdp, 300, 300, 0.3, seed));
        assert!(got.iter().sum::<f64>() > 0.0);
    }
    let mut p = params(300, 4, 6, 1.0, 0.1, LsviVariant::ApproxJdp, Regime::None);
    p.beta = 0.3;
    let (got, _) = run(&mdp, p, 7);
    assert_eq!(got, reference_lsvi(&mdp, 300, p.b, 0.3, 7));
}

#[test]
fn two_batches_at_small_k() {
    let mdp = random_dense(2, 2, 5, 3).unwrap();
    let p = params(100, 5, 4, 1.0, 0.1, LsviVariant::ApproxJdp, Regime::Jdp).with_scale(0.02).unwrap();
    assert_eq!((p.b, p.batch_len), (2, 50));
    assert_eq!(p.boundary_after(50), Some(1));
    assert_eq!(p.boundary_after(100), None);
    assert_eq!(p.batch_start(1), 51);
    let mut agent = LsviAgent::new(&mdp, p, 4).unwrap();
    let mut outputs = Vec::new();
    for k in 1..=100 {
        let ep = agent.play(&mdp, k).unwrap();
        assert_eq!(agent.batch(), p.batch_of(k));
        if let Some(b) = agent.observe(&ep).unwrap() {
            assert_eq!((k, b), (50, 1));
        }
        outputs.push((agent.batch(), agent.policy().clone(), agent.w_tilde(0).clone()));
    }
    outputs.dedup_by(|a, b| a.0 == b.0);
    assert_eq!(outputs.len(), 2);
    assert_eq!(agent.batch_records().len(), 1);
}

#[test]
fn pure_variant_uses_laplace_scales() {
    let p = params(400, 3, 8, 0.8, 0.0, LsviVariant::PureJdp, Regime::Jdp);
    let (hf, bf, b0f) = (3.0, p.b as f64, p.b0 as f64);
    assert!((p.sigma_lambda - 4.0 * hf * bf * b0f / 0.8).abs() < 1e-9);
    assert!((p.sigma_u - 8.0 * hf * hf * bf / 0.8).abs() < 1e-9);
    let mdp = random_dense(4, 2, 3, 1).unwrap();
    let (trace, agent) = run(&mdp, p.with_scale(0.01).unwrap(), 3);
    assert_eq!(trace.len(), 400);
    assert_eq!(agent.batch_records().len(), p.b - 1);
}

#[test]
fn invalid_inputs_are_rejected() {
    let budget = PrivacyBudget::new(0.5, 0.1).unwrap();
    assert!(matches!(
        LsviParams::new(10, 2, 4, budget, 0.1, LsviVariant::ApproxJdp, Regime::Ldp),
        Err(LinearError::Config(_))
    ));
    let pure = PrivacyBudget::new(0.5, 0.0).unwrap();
    assert_eq!(
        LsviParams::new(10, 2, 4, pure, 0.1, LsviVariant::ApproxJdp, Regime::Jdp).unwrap_err(),
        LinearError::Privacy(PrivacyError::PureDpUnsupported)
    );
    assert!(LsviParams::new(10, 2, 4, budget, 0.1, LsviVariant::PureJdp, Regime::Jdp).is_err());
    let big = PrivacyBudget::new(1.5, 0.1).unwrap();
    assert!(LsviParams::new(10, 2, 4, big, 0.1, LsviVariant::ApproxJdp, Regime::Jdp).is_err());
    assert!(LsviParams::new(10, 2, 4, budget, 1.5, LsviVariant::ApproxJdp, Regime::Jdp).is_err());
    let mdp = random_dense(3, 2, 2, 1).unwrap();
    let p = params(10, 2, 4, 0.5, 0.1, LsviVariant::ApproxJdp, Regime::Jdp);
    assert!(matches!(LsviAgent::new(&mdp, p, 0), Err(LinearError::Config(_))));
}

#[test]
fn scale_override_shrinks_derived_widths() {
    let a = params(1000, 3, 8, 1.0, 0.1, LsviVariant::ApproxJdp, Regime::Jdp);
    let b = a.with_scale(0.1).unwrap();
    assert_eq!(a.sigma_lambda, b.sigma_lambda);
    assert!((b.upsilon - 0.1 * a.upsilon).abs() <= 1e-12 * a.upsilon);
    assert!(b.beta < a.beta);
    assert!(a.with_scale(0.0).is_err());
}

#[test]
fn noise_stays_within_bounds_and_release_is_positive_definite() {
    let mdp = random_dense(4, 2, 3, 11).unwrap();
    let p = params(1000, 3, 8, 1.0, 0.1, LsviVariant::ApproxJdp, Regime::Jdp);
    let (_, agent) = run(&mdp, p, 9);
    assert_eq!(agent.batch_records().len(), p.b - 1);
    for r in agent.batch_records() {
        assert!(r.noise_bounded(&p));
        assert!(r.min_eigen >= p.lambda + p.c_k + p.upsilon - r.tree_norm - 1e-6 * p.c_k);
    }
}

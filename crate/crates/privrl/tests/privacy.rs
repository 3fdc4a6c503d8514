mod common;

use common::{ks_p_value, ks_statistic};
use privrl::linalg::{SymmetricMatrix, Vector};
use privrl::privacy::{
    advanced_composition_split, dyadic_nodes, gauss_matrix_eigen_bound, gauss_vector_bound, gaussian_sigma,
    laplace_matrix_eigen_bound, laplace_scale, laplace_vector_bound, max_nodes, sample_scalar, sample_symmetric,
    simple_composition_split, stable_ceil, tree_depth, NoiseDist, NoiseProfile, NoiseTree, PrivacyBudget,
    PrivacyError, Regime,
};
use privrl::rng::{stream, Role};
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Laplace, Normal};

fn budget(e: f64, d: f64) -> PrivacyBudget {
    PrivacyBudget::new(e, d).unwrap()
}

#[test]
fn gaussian_and_laplace_scales() {
    let s = gaussian_sigma(2.0, budget(0.5, 0.1)).unwrap();
    assert!((s - 2.0 * (2.0 * 20f64.ln()).sqrt() / 0.5).abs() < 1e-12);
    assert_eq!(laplace_scale(3.0, 0.5).unwrap(), 6.0);
    assert_eq!(gaussian_sigma(1.0, budget(0.5, 0.0)).unwrap_err(), PrivacyError::PureDpUnsupported);
    assert!(gaussian_sigma(1.0, budget(1.5, 0.1)).is_err());
    assert!(gaussian_sigma(-1.0, budget(0.5, 0.1)).is_err());
    assert!(laplace_scale(1.0, 0.0).is_err());
}

#[test]
fn invalid_budgets() {
    assert!(matches!(PrivacyBudget::new(0.0, 0.1), Err(PrivacyError::InvalidBudget(_))));
    assert!(PrivacyBudget::new(f64::NAN, 0.1).is_err());
    assert!(PrivacyBudget::new(0.5, 1.0).is_err());
    assert!(PrivacyBudget::new(0.5, -0.1).is_err());
    assert!(PrivacyBudget::new(0.5, 0.0).unwrap().is_pure());
}

#[test]
fn composition_splits() {
    let b = advanced_composition_split(budget(0.5, 0.1), 3).unwrap();
    assert!((b.epsilon - 0.5 / (24.0 * 20f64.ln()).sqrt()).abs() < 1e-15);
    assert!((b.delta - 0.1 / 6.0).abs() < 1e-15);
    let s = simple_composition_split(budget(0.6, 0.3), 3).unwrap();
    assert!((s.epsilon - 0.2).abs() < 1e-15 && (s.delta - 0.1).abs() < 1e-15);
    assert!(advanced_composition_split(budget(0.5, 0.1), 0).is_err());
    assert!(advanced_composition_split(budget(0.5, 0.0), 2).is_err());
    assert!(simple_composition_split(budget(0.5, 0.0), 4).is_ok());
}

#[test]
fn stable_ceil_snaps_round_off() {
    assert_eq!(stable_ceil(2.0), 2);
    assert_eq!(stable_ceil(2.0 + 1e-14), 2);
    assert_eq!(stable_ceil(2.001), 3);
    assert_eq!(tree_depth(1), 1);
    assert_eq!(tree_depth(1024), 11);
    assert_eq!(tree_depth(1025), 12);
}

#[test]
fn node_count_bound_exhaustive() {
    for n in 1..=256usize {
        let bound = (n as f64).log2().ceil() as usize + 1;
        assert_eq!(max_nodes(n), tree_depth(n));
        for k in 1..=n {
            let nodes = dyadic_nodes(k);
            assert!(nodes.len() <= bound, "n={n}, k={k}");
            let covered: usize = nodes.iter().map(|(l, _)| 1usize << l).sum();
            assert_eq!(covered, k);
        }
    }
}

#[test]
fn dyadic_nodes_partition_prefix() {
    for k in 1..=300usize {
        let mut leaves: Vec<usize> = dyadic_nodes(k)
            .into_iter()
            .flat_map(|(l, i)| (i << l) + 1..=((i + 1) << l))
            .collect();
        leaves.sort_unstable();
        assert_eq!(leaves, (1..=k).collect::<Vec<_>>());
    }
}

#[test]
fn tree_payloads_are_repeatable() {
    let mut a: NoiseTree<Vector> = NoiseTree::new(200, 3, 1.0, NoiseDist::Gaussian, 7, 0);
    let mut b: NoiseTree<Vector> = NoiseTree::new(200, 3, 1.0, NoiseDist::Gaussian, 7, 0);
    let mut rng = stream(1, Role::Aux, 0, 0);
    let first: Vec<Vector> = (1..=200).map(|k| b.prefix(k).unwrap()).collect();
    for _ in 0..1000 {
        let k = rng.gen_range(1..=200);
        assert_eq!(a.prefix(k).unwrap(), first[k - 1]);
    }
    let mut other: NoiseTree<Vector> = NoiseTree::new(200, 3, 1.0, NoiseDist::Gaussian, 7, 1);
    assert_ne!(other.prefix(5).unwrap(), first[4]);
    assert_eq!(a.prefix(0).unwrap(), Vector::zeros(3));
    assert_eq!(a.prefix(201).unwrap_err(), PrivacyError::OutOfRange { k: 201, n: 200 });
}

#[test]
fn prefix_is_sum_of_nodes() {
    let mut t: NoiseTree<SymmetricMatrix> = NoiseTree::new(64, 2, 0.5, NoiseDist::Laplace, 3, 2);
    for k in [1usize, 5, 13, 64] {
        let mut want = SymmetricMatrix::zeros(2);
        for id in dyadic_nodes(k) {
            want.add_assign(&t.node(id));
        }
        let (got, count) = t.prefix_with_count(k).unwrap();
        assert_eq!(got, want);
        assert_eq!(count, k.count_ones() as usize);
    }
}

#[test]
fn symmetric_noise_is_symmetric() {
    let mut rng = stream(2, Role::Aux, 0, 0);
    for dist in [NoiseDist::Gaussian, NoiseDist::Laplace] {
        let m = sample_symmetric(5, 1.3, dist, &mut rng);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }
}

#[test]
fn bounds_closed_forms() {
    let g = gauss_matrix_eigen_bound(4, 2.0, 9, 0.01);
    assert!((g - 2.0 * 3.0 * (8.0 + 2.0 * 100f64.ln())).abs() < 1e-12);
    let v = gauss_vector_bound(4, 2.0, 1, 0.01);
    assert!((v - 2.0 * (2.0 + 2.0 * 100f64.ln().sqrt())).abs() < 1e-12);
    assert!(gauss_vector_bound(4, 1.0, 1, 1.0) > 0.0);
    let lm = laplace_matrix_eigen_bound(4, 1.0, 1, 0.01);
    let l = 400f64.ln();
    assert!((lm - (8.0 + 2.0 * (4.0 * l).sqrt() + l)).abs() < 1e-12);
    assert!((laplace_vector_bound(4, 1.0, 4, 0.01) - 2.0 * 2.0 * l).abs() < 1e-12);
}

#[test]
fn gaussian_bounds_hold_empirically() {
    let (d, sigma, alpha) = (6, 1.0, 0.05);
    let mut rng = stream(4, Role::Aux, 0, 0);
    let trials = 400;
    let mut misses = (0, 0);
    for _ in 0..trials {
        let m = sample_symmetric(d, sigma, NoiseDist::Gaussian, &mut rng);
        if m.operator_norm() > gauss_matrix_eigen_bound(d, sigma, 1, alpha) {
            misses.0 += 1;
        }
        let v: Vector = Vector::from_iterator(d, (0..d).map(|_| sample_scalar(NoiseDist::Gaussian, sigma, &mut rng)));
        if v.norm() > gauss_vector_bound(d, sigma, 1, alpha) {
            misses.1 += 1;
        }
    }
    assert!(misses.0 as f64 / trials as f64 <= alpha);
    assert!(misses.1 as f64 / trials as f64 <= alpha);
}

#[test]
fn noise_profile_validation() {
    assert!(NoiseProfile::new(Regime::Jdp, NoiseDist::Gaussian, 1.0, 1.0, 2.0, 0.0).is_err());
    assert!(NoiseProfile::new(Regime::None, NoiseDist::Gaussian, 1.0, 0.0, 0.0, 1.0).is_err());
    let p = NoiseProfile::new(Regime::Ldp, NoiseDist::Gaussian, 2.0, 3.0, 4.0, 0.5).unwrap();
    assert_eq!((p.effective_sigma_matrix(), p.effective_sigma_vector(), p.effective_shift()), (1.0, 1.5, 2.0));
}

#[test]
fn ks_accepts_gaussian_stream() {
    let sigma = gaussian_sigma(2.0, budget(0.5, 0.1)).unwrap();
    let mut rng = stream(11, Role::Aux, 0, 0);
    let mut xs: Vec<f64> = (0..10_000).map(|_| sample_scalar(NoiseDist::Gaussian, sigma, &mut rng)).collect();
    let n = Normal::new(0.0, sigma).unwrap();
    let d = ks_statistic(&mut xs, |x| n.cdf(x));
    assert!(ks_p_value(d, 10_000) > 0.001, "D = {d}");
}

#[test]
fn ks_accepts_laplace_stream() {
    let b = laplace_scale(2.0, 0.5).unwrap();
    let mut rng = stream(12, Role::Aux, 0, 0);
    let mut xs: Vec<f64> = (0..10_000).map(|_| sample_scalar(NoiseDist::Laplace, b, &mut rng)).collect();
    let l = Laplace::new(0.0, b).unwrap();
    let d = ks_statistic(&mut xs, |x| l.cdf(x));
    assert!(ks_p_value(d, 10_000) > 0.001, "D = {d}");
}

#[test]
fn ks_rejects_wrong_scale() {
    let mut rng = stream(13, Role::Aux, 0, 0);
    let mut xs: Vec<f64> = (0..10_000).map(|_| sample_scalar(NoiseDist::Gaussian, 1.1, &mut rng)).collect();
    let n = Normal::new(0.0, 1.0).unwrap();
    let d = ks_statistic(&mut xs, |x| n.cdf(x));
    assert!(ks_p_value(d, 10_000) < 0.001);
}

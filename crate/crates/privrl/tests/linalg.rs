use nalgebra::DMatrix;
use privrl::linalg::{
    mahalanobis_inv_norm, mahalanobis_norm, max_eigenvalue, min_eigenvalue, psd_solve, LinalgError, PsdFactor,
    SymmetricMatrix, Vector,
};

#[test]
fn solve_known_system() {
    let a = SymmetricMatrix::from_rows(&[&[4.0, 1.0], &[1.0, 3.0]]).unwrap();
    let x = psd_solve(&a, &Vector::from_vec(vec![1.0, 2.0])).unwrap();
    // det = 11: x = (1/11, 7/11)
    assert!((x[0] - 1.0 / 11.0).abs() < 1e-15);
    assert!((x[1] - 7.0 / 11.0).abs() < 1e-15);
}

#[test]
fn inverse_norm_matches_explicit_inverse() {
    let a = SymmetricMatrix::from_rows(&[&[5.0, 2.0, 0.5], &[2.0, 4.0, 1.0], &[0.5, 1.0, 3.0]]).unwrap();
    let x = Vector::from_vec(vec![1.0, -2.0, 0.5]);
    let inv = a.as_matrix().clone().try_inverse().unwrap();
    let want = x.dot(&(&inv * &x)).sqrt();
    assert!((mahalanobis_inv_norm(&a, &x).unwrap() - want).abs() < 1e-13);
    assert!((mahalanobis_norm(&a, &x) - a.quad_form(&x).sqrt()).abs() < 1e-13);
}

#[test]
fn indefinite_matrix_is_rejected() {
    let a = SymmetricMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
    assert_eq!(PsdFactor::new(&a).unwrap_err(), LinalgError::NotPositiveDefinite);
    let mut nan = SymmetricMatrix::identity(2);
    nan.add_diagonal(f64::NAN);
    assert!(PsdFactor::new(&nan).is_err());
}

#[test]
fn dimension_mismatch_is_reported() {
    let f = PsdFactor::new(&SymmetricMatrix::identity(3)).unwrap();
    assert_eq!(
        f.solve(&Vector::zeros(2)).unwrap_err(),
        LinalgError::DimensionMismatch { expected: 3, got: 2 }
    );
    assert!(SymmetricMatrix::from_rows(&[&[1.0, 0.0], &[0.0]]).is_err());
}

#[test]
fn rank_one_update_is_exactly_symmetric() {
    let mut m = SymmetricMatrix::scaled_identity(4, 2.0);
    let x = Vector::from_vec(vec![0.1, 0.7, -0.3, 1.9]);
    m.rank1_update(&x, 0.37);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
        }
    }
    let want = DMatrix::from_diagonal_element(4, 4, 2.0) + (&x * x.transpose()) * 0.37;
    assert!((m.as_matrix() - want).norm() < 1e-14);
}

#[test]
fn extreme_eigenvalues_of_diagonal() {
    let m = SymmetricMatrix::from_diagonal(&[3.0, -1.0, 7.5]);
    assert_eq!(min_eigenvalue(&m), -1.0);
    assert_eq!(max_eigenvalue(&m), 7.5);
    assert_eq!(m.operator_norm(), 7.5);
    assert_eq!(SymmetricMatrix::from_diagonal(&[-9.0, 1.0]).operator_norm(), 9.0);
}

#[test]
fn symmetrize_averages_transpose() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 4.0, 2.0, 5.0]);
    let s = SymmetricMatrix::symmetrize(&m);
    assert_eq!(s.get(0, 1), 3.0);
    assert_eq!(s.get(1, 0), 3.0);
}

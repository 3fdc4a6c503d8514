//! Compare the high-probability noise bounds against sampled noise.

use privrl::linalg::max_eigenvalue;
use privrl::privacy::{gauss_matrix_eigen_bound, gauss_vector_bound, sample_symmetric, sample_vector, NoiseDist};
use privrl::rng::{stream, Role};

fn main() {
    let (d, sigma, alpha) = (8, 1.0, 0.01);
    let mut rng = stream(3, Role::Aux, 0, 0);
    let mut worst_eig: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    for _ in 0..500 {
        let m = sample_symmetric(d, sigma, NoiseDist::Gaussian, &mut rng);
        worst_eig = worst_eig.max(max_eigenvalue(&m).abs());
        worst_vec = worst_vec.max(sample_vector(d, sigma, NoiseDist::Gaussian, &mut rng).norm());
    }
    println!("max eigenvalue over 500 draws {worst_eig:.3}, bound {:.3}", gauss_matrix_eigen_bound(d, sigma, 1, alpha));
    println!("max vector norm over 500 draws {worst_vec:.3}, bound {:.3}", gauss_vector_bound(d, sigma, 1, alpha));
}

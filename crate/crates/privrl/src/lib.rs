//! Differentially private exploration in finite-horizon MDPs.
//!
//! The crate bundles:
//!
//! - [`linalg`]: symmetric matrices, PSD solves and Mahalanobis norms;
//! - [`privacy`]: Gaussian/Laplace mechanisms, composition, tree aggregation
//!   and noise concentration bounds;
//! - [`envs`]: tabular MDPs, their linear-mixture and linear encodings, and
//!   exact dynamic-programming oracles;
//! - [`mixture`]: UCRL-VTR and UCRL-VTR+ with JDP / LDP noise;
//! - [`linear`]: batched LSVI-UCB with JDP noise;
//! - [`harness`]: experiment configs, exact-regret runs, privacy audits and
//!   CSV/JSON emission.
//!
//! ```
//! use privrl::envs::{random_dense, optimal_values};
//!
//! let mdp = random_dense(3, 2, 4, 7).unwrap();
//! let (v, _) = optimal_values(&mdp);
//! assert!(v[0].iter().all(|x| *x >= 0.0 && *x <= 4.0));
//! ```

pub mod envs;
pub mod harness;
pub mod linalg;
pub mod linear;
pub mod mixture;
pub mod privacy;
pub mod rng;

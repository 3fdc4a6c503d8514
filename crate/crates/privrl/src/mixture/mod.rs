//! Linear-mixture agents: UCRL-VTR ([`VtrAgent`]) and the variance-aware
//! UCRL-VTR+ ([`VtrPlusAgent`]), with JDP (tree-based) or LDP (user-side)
//! perturbations of their sufficient statistics.

pub mod calibration;
mod vtr;
mod vtr_plus;

pub use calibration::{
    check_generic_beta, corollary_beta, generic_beta_lower_bound, k0, self_normalized_term,
    vtr_jdp_sigma, vtr_ldp_sigma, vtrplus_jdp_sigmas, vtrplus_ldp_sigmas, BetaParams, MixtureSettings,
    VtrCalibration, VtrPlusCalibration,
};
pub use vtr::{ldp_payload, plan_values, Payload, Plan, Transcript, VtrAgent};
pub use vtr_plus::{vtrplus_variance, VarianceTerms, VtrPlusAgent, VtrPlusPayload, VtrPlusTranscript};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::privacy::PrivacyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixtureError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error("beta = {beta} is below the required {required}")]
    BetaTooSmall { beta: f64, required: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

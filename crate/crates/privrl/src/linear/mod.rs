//! Batched LSVI-UCB for linear MDPs with joint-DP noise.

mod agent;
mod params;

pub use agent::{BatchRecord, LsviAgent, LsviEpisode, Step};
pub use params::{batch_count, gaussian_scales, laplace_scales, LsviParams, LsviVariant};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::privacy::PrivacyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

//! Experiment plumbing: JSON configs, multi-seed exact-regret runs, the
//! privacy-arithmetic audit and CSV/JSON emission.

mod audit;
mod config;
mod emit;
mod run;
mod sweep;

pub use audit::{audit_privacy_arithmetic, AuditReport, AuditRow, AUDIT_TOLERANCE};
pub(crate) use config::regime_name;
pub use config::{AgentSpec, Algorithm, DerivedParams, EmitSpec, ExperimentConfig};
pub use emit::{csv_string, emit, load_json, write_csv, write_json, RunOutput, CSV_HEADER};
pub use run::{run_experiment, run_seed, EpisodeRow, RegretRecord, WORKERS_ENV};
pub use sweep::{SweepGrid, SweepPoint};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::envs::EnvError;
use crate::linear::LinearError;
use crate::mixture::MixtureError;
use crate::privacy::PrivacyError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("seed {seed}: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<HarnessError>,
    },
    #[error("nothing to emit: no records")]
    Empty,
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError};

/// Cartesian grid over `epsilon`, `K` and `scale_override`; an absent axis
/// keeps the base config's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default, rename = "K")]
    pub k: Vec<usize>,
    #[serde(default)]
    pub scale_override: Vec<f64>,
}

/// One grid point: a label usable as a directory name and its config.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    pub config: ExperimentConfig,
}

impl SweepGrid {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Json { path: path.to_path_buf(), source: e })
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.epsilon.len().max(1) * self.k.len().max(1) * self.scale_override.len().max(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every point of the grid applied to `base`, `epsilon` varying slowest.
    pub fn expand(&self, base: &ExperimentConfig) -> Result<Vec<SweepPoint>, HarnessError> {
        let eps = axis(&self.epsilon, base.agent.epsilon);
        let ks = axis(&self.k, base.k);
        let scales = axis(&self.scale_override, base.agent.scale_override);
        let mut points = Vec::with_capacity(self.len());
        for e in &eps {
            for k in &ks {
                for s in &scales {
                    let mut config = base.clone();
                    config.agent.epsilon = *e;
                    config.k = *k;
                    config.agent.scale_override = *s;
                    config.validate()?;
                    points.push(SweepPoint { label: format!("eps{e}_K{k}_scale{s}"), config });
                }
            }
        }
        Ok(points)
    }
}

fn axis<T: Copy>(values: &[T], default: T) -> Vec<T> {
    if values.is_empty() {
        vec![default]
    } else {
        values.to_vec()
    }
}

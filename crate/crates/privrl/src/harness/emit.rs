use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DerivedParams, ExperimentConfig, HarnessError, RegretRecord};

pub const CSV_HEADER: &str = "algorithm,regime,epsilon,delta,seed,episode,inst_regret,cum_regret,beta,batch,coverage";

/// JSON mirror of a run: config echo, derived parameters, records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub derived: DerivedParams,
    pub records: Vec<RegretRecord>,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text, rows ordered by `(seed, episode)`.
pub fn csv_string(records: &[RegretRecord]) -> Result<String, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Empty);
    }
    let mut sorted: Vec<&RegretRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    let mut out = String::with_capacity(128 * records.iter().map(|r| r.rows.len()).sum::<usize>() + 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in sorted {
        for row in &rec.rows {
            let batch = row.batch.map(|b| b.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                rec.algorithm.name(),
                rec.regime,
                float(rec.epsilon),
                float(rec.delta),
                rec.seed,
                row.episode,
                float(row.inst_regret),
                float(row.cum_regret),
                float(row.beta),
                batch,
                row.coverage
            );
        }
    }
    Ok(out)
}

/// Write `bytes` next to `path` and rename into place, so a failure never
/// leaves a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(HarnessError::io(path, e));
    }
    Ok(())
}

pub fn write_csv(path: &Path, records: &[RegretRecord]) -> Result<(), HarnessError> {
    let text = csv_string(records)?;
    write_atomic(path, text.as_bytes())
}

pub fn write_json(path: &Path, config: &ExperimentConfig, records: &[RegretRecord]) -> Result<(), HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Empty);
    }
    let out = RunOutput { config: config.clone(), derived: config.derived()?, records: records.to_vec() };
    let mut text =
        serde_json::to_string_pretty(&out).map_err(|e| HarnessError::Json { path: path.to_path_buf(), source: e })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn load_json(path: &Path) -> Result<RunOutput, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json { path: path.to_path_buf(), source: e })
}

/// Write `regret.csv` and/or `regret.json` into `dir` as selected by
/// `config.emit`; returns the written paths.
pub fn emit(dir: &Path, config: &ExperimentConfig, records: &[RegretRecord]) -> Result<Vec<PathBuf>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Empty);
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    if config.emit.csv {
        let p = dir.join("regret.csv");
        write_csv(&p, records)?;
        written.push(p);
    }
    if config.emit.json {
        let p = dir.join("regret.json");
        write_json(&p, config, records)?;
        written.push(p);
    }
    Ok(written)
}

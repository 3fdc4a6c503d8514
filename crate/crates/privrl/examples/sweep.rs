//! Expand a grid over epsilon / K / scale and report mean final regret.

use std::path::Path;

use privrl::harness::{run_experiment, ExperimentConfig, SweepGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let base = ExperimentConfig::load(&dir.join("vtr_ldp.json"))?;
    let grid = SweepGrid { epsilon: vec![0.25, 0.9], k: vec![100, 200], scale_override: vec![0.02] };
    for point in grid.expand(&base)? {
        let records = run_experiment(&point.config)?;
        let mean = records.iter().map(|r| r.final_regret()).sum::<f64>() / records.len() as f64;
        println!("{}: mean final regret {mean:.3}", point.label);
    }
    Ok(())
}

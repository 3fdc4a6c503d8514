//! Multi-seed regret run through the harness, written out as CSV and JSON.

use std::path::Path;

use privrl::harness::{emit, run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/vtr_jdp.json");
    let mut config = ExperimentConfig::load(&path)?;
    config.k = 200;
    config.agent.scale_override = 0.02;
    let records = run_experiment(&config)?;
    for r in &records {
        println!("seed {}: R(100) = {:.3}, R(200) = {:.3}", r.seed, r.regret_at(100), r.final_regret());
    }
    let out = std::env::temp_dir().join("privrl_regret_example");
    for p in emit(&out, &config, &records)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

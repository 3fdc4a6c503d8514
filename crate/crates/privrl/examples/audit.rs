//! Re-derive each mechanism's required noise from its sensitivity and the
//! composed budget, and compare with what the agent is configured to use.

use std::path::Path;

use privrl::harness::{audit_privacy_arithmetic, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["vtr_jdp", "vtr_ldp", "vtrplus_jdp", "lsvi_batch_jdp"] {
        let mut config = ExperimentConfig::load(&dir.join(format!("{name}.json")))?;
        print!("{}", audit_privacy_arithmetic(&config)?.render());
        config.agent.scale_override = 0.01;
        let shrunk = audit_privacy_arithmetic(&config)?;
        println!("at scale 0.01: {}\n", if shrunk.passed() { "PASS" } else { "FAIL" });
    }
    Ok(())
}

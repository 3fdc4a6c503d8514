use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use privrl::harness::{audit_privacy_arithmetic, emit, run_experiment, ExperimentConfig, HarnessError, SweepGrid};

#[derive(Parser)]
#[command(name = "privrl", version, about = "Private exploration experiments: run, inspect, audit, sweep")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config and write regret.csv / regret.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the derived parameters of a config as JSON.
    Params {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the privacy arithmetic of a config; exits nonzero on FAIL.
    Audit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a config over a grid of epsilon / K / scale_override.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// Output root; defaults to the config's `output` field, then `sweep_out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<bool, HarnessError> {
    match command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let records = run_experiment(&cfg)?;
            for p in emit(&out, &cfg, &records)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
        Command::Params { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let text = serde_json::to_string_pretty(&cfg.derived()?)
                .map_err(|e| HarnessError::Json { path: config.clone(), source: e })?;
            println!("{text}");
            Ok(true)
        }
        Command::Audit { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = audit_privacy_arithmetic(&cfg)?;
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::Sweep { config, grid, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let grid = SweepGrid::load(&grid)?;
            let root = out.or_else(|| cfg.output.clone().map(PathBuf::from)).unwrap_or_else(|| "sweep_out".into());
            for point in grid.expand(&cfg)? {
                let records = run_experiment(&point.config)?;
                let dir = root.join(&point.label);
                emit(&dir, &point.config, &records)?;
                let mean = records.iter().map(|r| r.final_regret()).sum::<f64>() / records.len() as f64;
                println!("{}\tmean_final_regret={mean:.6}", point.label);
            }
            Ok(true)
        }
    }
}

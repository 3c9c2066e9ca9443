use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use kfp_lab::config::ExperimentConfig;
use kfp_lab::error::LabError;
use kfp_lab::experiments;

/// Convergence laboratory for the kinetic Fokker-Planck dynamics on the
/// torus. Runs one named experiment from a JSON config and writes CSV.
#[derive(Parser)]
#[command(name = "kfp-lab", version, about)]
struct Cli {
    /// Experiment name (see --help for the registry).
    #[arg(
        value_name = "EXPERIMENT",
        help = "one of: kernel-check, mixture-decay, coadapted-decay, \
                non-contraction, sqrt-optimality, stopping-time, martingale-H"
    )]
    experiment: String,

    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the config's output path (default: config out_path or stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<(), LabError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| {
        LabError::Config(format!("cannot read {}: {e}", cli.config.display()))
    })?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_path = Some(out.display().to_string());
    }

    let report = experiments::run_by_name(&cli.experiment, &cfg)?;
    let csv = report.to_csv(&cfg);
    match &cfg.out_path {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| LabError::Config(format!("cannot write {path}: {e}")))?;
            let schema_path = format!("{path}.schema.txt");
            std::fs::write(&schema_path, report.schema_text())
                .map_err(|e| LabError::Config(format!("cannot write {schema_path}: {e}")))?;
            eprintln!("wrote {path} ({} rows) and {schema_path}", report.rows.len());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kfp-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

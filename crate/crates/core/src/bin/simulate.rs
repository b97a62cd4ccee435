use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cfmimo::error::{Error, Result};
use cfmimo::harness::{run_experiment, write_cdf_csv, write_report, write_sweep_csv, ExperimentConfig, Preset};

/// Monte Carlo simulator for hybrid VLC/RF cell-free massive MIMO.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// TOML experiment config. Omitted keys take their baseline values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace the config's sweep and series with a figure design.
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep CSV path; CDFs go to `<stem>_cdf.csv`. Prints to stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(preset) = args.preset {
        preset.apply(&mut cfg);
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &ExperimentConfig, out: Option<&PathBuf>) -> Result<()> {
    let report = run_experiment(cfg)?;
    match out {
        Some(path) => {
            for written in write_report(&report, path)? {
                eprintln!("wrote {}", written.display());
            }
        }
        None => {
            let stdout = std::io::stdout().lock();
            let io_err = |source| Error::Io {
                path: "<stdout>".into(),
                source,
            };
            write_sweep_csv(&report, stdout).map_err(io_err)?;
            if !report.cdfs.is_empty() {
                println!();
                write_cdf_csv(&report, std::io::stdout().lock()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg, args.out.as_ref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use askrff::experiment::{cmd_approx, cmd_classify, cmd_masses, write_approx_csv, ExperimentConfig};
use askrff::{Error, Result};
use clap::{Args, Parser, Subcommand};

/// Random Fourier features for asymmetric shift-invariant kernels.
#[derive(Parser)]
#[command(name = "askrff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate total masses per trial (JSON report).
    Masses(Common),
    /// Gram-matrix approximation error sweep (CSV).
    Approx(Common),
    /// Linear classification on random features (JSON report).
    Classify(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base directory for relative data paths.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// First seed; trials use consecutive seeds. Replaces any seed list.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Do not cap the training set.
    #[arg(long)]
    full: bool,
    /// Report zero wall times so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_path(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(dir) = &self.data_dir {
            cfg.data_dir = Some(dir.clone());
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if self.seed.is_some() || self.trials.is_some() {
            let old = cfg.seed_list()?;
            cfg.seeds = None;
            cfg.seed = Some(self.seed.unwrap_or(old[0]));
            cfg.trials = Some(self.trials.unwrap_or(old.len()));
        }
        cfg.full |= self.full;
        if self.no_timing {
            cfg.timing = false;
        }
        Ok(cfg)
    }
}

fn sink(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(cfg: &ExperimentConfig, value: &T) -> Result<()> {
    let mut w = sink(cfg)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Masses(c) => {
            let cfg = c.resolve()?;
            write_json(&cfg, &cmd_masses(&cfg)?)
        }
        Command::Approx(c) => {
            let cfg = c.resolve()?;
            let rows = cmd_approx(&cfg)?;
            let mut w = sink(&cfg)?;
            write_approx_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Classify(c) => {
            let cfg = c.resolve()?;
            write_json(&cfg, &cmd_classify(&cfg)?)
        }
    }
}

fn report(err: &Error) {
    let payload = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{payload}");
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}

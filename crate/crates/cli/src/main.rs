//! `movbound`: batch experiments on stochastic parabolic equations with
//! moving boundaries.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{Overrides, RunConfig};
use crate::error::CliError;
use crate::output::{write_atomic, Provenance, Writer};

#[derive(Parser)]
#[command(name = "movbound", version, about = "Stochastic parabolic equations on moving domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, env = "MOVBOUND_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "MOVBOUND_SEED")]
    seed: Option<u64>,
    /// Monte Carlo paths.
    #[arg(long, global = true, env = "MOVBOUND_SAMPLES")]
    samples: Option<usize>,
    /// Worker threads; available parallelism when absent.
    #[arg(long, global = true, env = "MOVBOUND_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "MOVBOUND_OUT")]
    out: Option<PathBuf>,
    /// Exit 4 when a verify-* acceptance check fails.
    #[arg(long, global = true, env = "MOVBOUND_GATE")]
    gate: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the forward problem and export per-slice moments.
    Simulate,
    /// Term-by-term Carleman margins over the manufactured corpus.
    VerifyCarleman,
    /// Two-sphere one-cylinder fit with hold-out validation and the vanishing-order probe.
    VerifyUcp,
    /// Recover a boundary from interior observations.
    Reconstruct,
    /// Stability records and the d vs |ln eps| fit.
    StabilitySweep,
    /// Interior-ball, speed-bound and Lipschitz-class checks.
    CheckGeometry,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::VerifyCarleman => "verify-carleman",
            Command::VerifyUcp => "verify-ucp",
            Command::Reconstruct => "reconstruct",
            Command::StabilitySweep => "stability-sweep",
            Command::CheckGeometry => "check-geometry",
        }
    }

    fn gated(self) -> bool {
        matches!(self, Command::VerifyCarleman | Command::VerifyUcp)
    }
}

fn fail(e: &CliError, dir: Option<&PathBuf>) -> ExitCode {
    let record = serde_json::to_string(&e.record()).expect("error record serializes");
    eprintln!("{record}");
    if let Some(d) = dir {
        let _ = write_atomic(d, "error.json", format!("{record}\n").as_bytes());
    }
    ExitCode::from(e.exit_code() as u8)
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut w = Writer::new(&cfg.output.dir, Provenance::new(cli.command.name(), cfg))?;
    let outcome = match cli.command {
        Command::Simulate => commands::simulate::run(cfg, &mut w)?,
        Command::VerifyCarleman => commands::carleman::run(cfg, &mut w)?,
        Command::VerifyUcp => commands::ucp::run(cfg, &mut w)?,
        Command::Reconstruct => commands::reconstruct::run(cfg, &mut w)?,
        Command::StabilitySweep => commands::stability::run(cfg, &mut w)?,
        Command::CheckGeometry => commands::geometry::run(cfg, &mut w)?,
    };
    for p in w.written() {
        println!("wrote {}", p.display());
    }
    println!("{}: {}", cli.command.name(), outcome.summary);
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim_end().to_string()), None),
    };
    let overrides = Overrides { seed: cli.seed, samples: cli.samples, out: cli.out.clone() };
    let cfg = match RunConfig::load(cli.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => return fail(&e, cli.out.as_ref()),
    };
    match execute(&cli, &cfg) {
        Ok(Outcome { passed: Some(false), summary }) if cli.gate && cli.command.gated() => {
            fail(&CliError::Gate(format!("{}: {summary}", cli.command.name())), Some(&cfg.output.dir))
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(&e, Some(&cfg.output.dir)),
    }
}

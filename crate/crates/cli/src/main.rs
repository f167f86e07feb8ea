//! `tcphase`: closed forms and oracle runs for su(1,1)/su(2) driven models.
//!
//! Exit codes: 0 success, 1 check failure or numerical breakdown, 2 usage
//! or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "tcphase", version, about = "Berry phases of driven su(1,1)/su(2) and three-mode models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// INI-style key = value file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residual checks for the representations, displacement table and diagonalizer.
    Verify {
        /// Restrict to one algebra: all, su2 or su11.
        #[arg(long)]
        scope: Option<String>,
    },
    /// Closed-form diagonalization of the t = 0 Hamiltonian.
    Diagonalize,
    /// Number coherent state amplitudes for (tau, phi).
    CoherentState,
    /// Oracle Berry phase against the closed form, one row per period.
    Berry,
    /// Berry runs over a grid of one or two config keys.
    Sweep,
    /// Eigenfunction of the three-mode model on a polar grid.
    Wavefunction,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<tcphase_core::Error>() {
        Some(c) if c.is_input_error() => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut raw = config::load(cli.config.as_deref(), &cli.set)?;
    if let Some(seed) = cli.seed {
        raw.insert("seed".into(), seed.to_string());
    }
    if let Command::Verify { scope: Some(scope) } = &cli.command {
        raw.insert("scope".into(), scope.clone());
    }
    let cfg = RunConfig::from_raw(&raw)?;
    let out = cli.out.as_deref();
    let table = match cli.command {
        Command::Verify { .. } => {
            let (table, failed) = commands::verify::cmd_verify(&cfg)?;
            output::emit(&table, cli.format, out)?;
            if failed.is_empty() {
                return Ok(ExitCode::SUCCESS);
            }
            eprintln!("failed checks: {}", failed.join(", "));
            return Ok(ExitCode::from(1));
        }
        Command::Diagonalize => commands::diagonalize::cmd_diagonalize(&cfg)?,
        Command::CoherentState => commands::coherent::cmd_coherent_state(&cfg)?,
        Command::Berry => commands::berry::cmd_berry(&cfg)?,
        Command::Sweep => commands::sweep::cmd_sweep(&raw, &cfg)?,
        Command::Wavefunction => commands::wavefunction::cmd_wavefunction(&cfg)?,
    };
    output::emit(&table, cli.format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `lmg-otoc`: spectra, OTOC traces, long-time averages and scaling fits for
//! the LMG model.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 violated
//! precondition, 1 anything else (I/O).

mod commands;
mod config;
mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Common, FitArgs, MicroArgs, OtocArgs, SpectrumArgs, SweepArgs};
use crate::config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "lmg-otoc", version, about = "LMG-model out-of-time-order correlators by exact diagonalization")]
struct Cli {
    /// Optional `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run directory [default: $LMG_OTOC_RUN_ROOT/<command>-<parameter hash>].
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Skip the SVG plots.
    #[arg(long, global = true)]
    no_svg: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of H(alpha) (or H + lambda S_z).
    Spectrum(SpectrumArgs),
    /// F(t), C(t) and A(t) for the quench or a single eigenstate.
    Otoc(OtocArgs),
    /// Long-time averages in every eigenstate, plus D_n.
    Micro(MicroArgs),
    /// Normalized long-time average over an (alpha, lambda) grid.
    Sweep(SweepArgs),
    /// Power-law fits for the three scaling exponents.
    Fit(FitArgs),
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use lmg_otoc::Error as E;
    if err.chain().any(|c| c.is::<UsageError>()) {
        return 2;
    }
    match err.chain().find_map(|c| c.downcast_ref::<E>()) {
        Some(e) if e.is_numerical() => 3,
        Some(e) if e.is_precondition() => 4,
        Some(E::InvalidSector(_) | E::InvalidParameter { .. } | E::InvalidGrid(_) | E::LevelOutOfRange { .. }) => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Some(raw) = std::env::var_os(run::ENV_THREADS) else {
        return Ok(());
    };
    let n: usize = raw
        .to_string_lossy()
        .parse()
        .map_err(|_| UsageError(format!("{} must be a positive integer", run::ENV_THREADS)))?;
    if n == 0 {
        return Err(UsageError(format!("{} must be a positive integer", run::ENV_THREADS)));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn run(cli: Cli) -> anyhow::Result<PathBuf> {
    configure_threads()?;
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let common = Common {
        config,
        out: cli.out,
        svg: !cli.no_svg,
    };
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &common),
        Command::Otoc(a) => commands::otoc(a, &common),
        Command::Micro(a) => commands::micro(a, &common),
        Command::Sweep(a) => commands::sweep(a, &common),
        Command::Fit(a) => commands::fit(a, &common),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

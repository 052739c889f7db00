//! `forge`: JSON in, JSON or CSV out.
//!
//! Exit codes: 0 when every check passes, 1 for a failed identity or
//! verification, 2 for bad input, 3 for a numeric failure.

mod commands;
mod input;

use clap::{Parser, ValueEnum};
use forge_core::numeric::IntegratorConfig;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Gen,
    Verify,
    Period,
    Catalog,
    Equiv,
    Lemma,
}

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Build and check polynomial isochronous centers")]
struct Args {
    command: Command,
    /// Input JSON (family spec, hand map, Hamiltonian, equivalence or lemma request).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Report path. `catalog` and `equiv` write CSV when it ends in `.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    energies: Option<Vec<f64>>,
    /// Integrator settings as JSON; unspecified fields keep their defaults.
    #[arg(long)]
    integrator: Option<PathBuf>,
}

/// Everything one invocation needs, resolved from the command line.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub spec_path: Option<PathBuf>,
    pub output_path: PathBuf,
    pub integrator: IntegratorConfig,
    pub seed: u64,
    pub n_max: Option<u32>,
    pub energies: Option<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn manifest(args: Args) -> Result<RunManifest, CliError> {
    let integrator = match &args.integrator {
        Some(path) => {
            let text = input::read(path)?;
            let cfg: IntegratorConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
            cfg
        }
        None => IntegratorConfig::default(),
    };
    if let Some(path) = &args.spec {
        if !path.is_file() {
            return Err(CliError::Input(format!("spec file {} not found", path.display())));
        }
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(CliError::Input(format!("output directory {} does not exist", dir.display())));
        }
    }
    Ok(RunManifest {
        command: args.command,
        spec_path: args.spec,
        output_path: args.out,
        integrator,
        seed: args.seed,
        n_max: args.n_max,
        energies: args.energies,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = manifest(args).and_then(|m| match m.command {
        Command::Gen => commands::gen(&m),
        Command::Verify => commands::verify(&m),
        Command::Period => commands::period(&m),
        Command::Catalog => commands::catalog(&m),
        Command::Equiv => commands::equiv(&m),
        Command::Lemma => commands::lemma(&m),
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("forge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

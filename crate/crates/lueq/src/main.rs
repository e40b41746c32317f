//! `lueq`: validate state files, print representations, and decide
//! local-unitary equivalence from the command line.

mod commands;
mod format;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lueq_core::ToleranceConfig;

/// Exit codes shared by all commands.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const INVALID_STATE: u8 = 2;
    pub const INEQUIVALENT: u8 = 3;
    pub const UNDECIDED: u8 = 4;
    pub const DIMS_MISMATCH: u8 = 5;
    pub const SELF_CHECK: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Unreadable file, malformed JSON or a malformed matrix.
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    DimsMismatch(String),
    /// A round-trip or self-test expectation did not hold.
    #[error("{0}")]
    SelfCheck(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Io(_) => exit::IO,
            Self::Invalid(_) => exit::INVALID_STATE,
            Self::DimsMismatch(_) => exit::DIMS_MISMATCH,
            Self::SelfCheck(_) => exit::SELF_CHECK,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lueq", version, about = "Local-unitary equivalence of bipartite mixed states")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_accept: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rank: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_cluster: f64,
    /// Output file (or file prefix for `gen orbit-pair`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Cli {
    fn tolerances(&self) -> ToleranceConfig {
        ToleranceConfig {
            tol_accept: self.tol_accept,
            tol_rank: self.tol_rank,
            tol_cluster: self.tol_cluster,
            ..ToleranceConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check Hermiticity, trace and positivity of a state file.
    Validate { path: PathBuf },
    /// Print the canonical representation of a state.
    Represent {
        path: PathBuf,
        /// Rebuild the state from the printed report and compare.
        #[arg(long)]
        check: bool,
    },
    /// Decide whether two states are related by a local unitary.
    Check {
        a: PathBuf,
        b: PathBuf,
        /// Random optimizer restarts for degenerate spectra.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Write a state file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run orbit round-trips and perturbed negatives.
    OrbitTest {
        /// Comma-separated list such as `2x2,2x3`.
        #[arg(long, value_delimiter = ',', default_value = "2x2,2x3", value_parser = parse_dims)]
        dims: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Print the local-unitary orbit dimension of a state.
    Dim { path: PathBuf },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Two-qubit Werner-type state with parameters `e`, `f`.
    Werner {
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, allow_negative_numbers = true)]
        f: f64,
    },
    /// Random state of the given rank.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Defaults to full rank.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// A random state, a random local-unitary image of it, and the unitary
    /// pair, written to `<out>.a.json`, `<out>.b.json`, `<out>.lu.json`.
    OrbitPair {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        rank: Option<usize>,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once('x').ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(m)?, p(n)?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("LUEQ_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::IO } else { exit::OK });
        }
    };
    let result = match &cli.command {
        Command::Validate { path } => commands::validate(&cli, path),
        Command::Represent { path, check } => commands::represent(&cli, path, *check),
        Command::Check { a, b, restarts } => commands::check(&cli, a, b, *restarts),
        Command::Gen { kind } => match kind {
            GenKind::Werner { e, f } => commands::gen_werner(&cli, *e, *f),
            GenKind::Random { m, n, rank } => commands::gen_random(&cli, *m, *n, *rank),
            GenKind::OrbitPair { m, n, rank } => commands::gen_orbit_pair(&cli, *m, *n, *rank),
        },
        Command::OrbitTest { dims, trials } => commands::orbit_test(&cli, dims, *trials),
        Command::Dim { path } => commands::dim(&cli, path),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

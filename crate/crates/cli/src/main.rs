//! `geoquant` command-line front end.
//!
//! Exit codes: 0 success, 1 a check or gate failed, 2 bad input or I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "geoquant",
    version,
    about = "Quantum mechanics of finite-level systems through tensor fields on the space of states"
)]
struct Cli {
    /// Hilbert-space dimension N (at least 2).
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,
    /// Seed for every pseudo-random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Tolerance override, `name=value`; a bare value sets the subcommand's
    /// own tolerance. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; `flow` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the orthonormal Hermitian basis and its structure constants.
    Algebra,
    /// Run the seeded verification suite.
    Verify(VerifyArgs),
    /// Print the Poisson and Jordan tensor components at a state point.
    Tensors(TensorsArgs),
    /// Integrate the Hamiltonian flow of an expectation-value function.
    Flow(FlowArgs),
    /// Decide whether a polynomial function is a physical observable.
    Observable(ObservableArgs),
    /// Push a tensor forward to a chart at a point.
    Chart(ChartArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Record per-check wall times (the report is then no longer byte-stable).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct TensorsArgs {
    /// State point: inline JSON or a file path. Accepts `{"dim", "Y"}`,
    /// `{"dim", "rho"}` or a bare coordinate array.
    #[arg(long)]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Hamiltonian: matrix of `[re, im]` rows, `{"pauli": [..]}` or `{"coeffs": [..]}`.
    #[arg(long)]
    pub hamiltonian: String,
    /// Initial state point.
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Extra operator whose expectation value becomes a column. Repeatable.
    #[arg(long)]
    pub observable: Vec<String>,
    /// Evolve under `H / hbar` instead of `H`.
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

#[derive(Debug, Args)]
pub struct ObservableArgs {
    /// Polynomial field `{"terms": [{"coeff": c, "exponents": [..]}]}`.
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TensorKind {
    Lambda,
    G,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    #[arg(long, value_enum)]
    pub tensor: TensorKind,
    #[arg(long)]
    pub point: String,
    /// `spherical`, `identity`, or a polynomial chart spec file.
    #[arg(long, default_value = "spherical")]
    pub chart: String,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    /// The bare `--tol VALUE`, if any.
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A check or gate returned a negative answer; the output was still written.
    Negative,
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn parse_tolerances(raw: &[String]) -> anyhow::Result<(BTreeMap<String, f64>, Option<f64>)> {
    let mut named = BTreeMap::new();
    let mut bare = None;
    for item in raw {
        let (name, value) = match item.split_once('=') {
            Some((n, v)) => (Some(n.trim()), v.trim()),
            None => (None, item.trim()),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| anyhow::anyhow!("tolerance `{item}` is not a number"))?;
        if !(v > 0.0) || !v.is_finite() {
            anyhow::bail!("tolerance `{item}` must be positive and finite");
        }
        match name {
            Some("") => anyhow::bail!("tolerance `{item}` has an empty name"),
            Some(n) => {
                named.insert(n.to_string(), v);
            }
            None => bare = Some(v),
        }
    }
    Ok((named, bare))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (tolerances, tolerance) = parse_tolerances(&cli.tol)?;
    if cli.out.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
        return Err(anyhow::anyhow!("--out needs a nonempty path").into());
    }
    let config = RunConfig {
        dim: cli.dim,
        seed: cli.seed,
        tolerances,
        tolerance,
        out: cli.out,
        format: cli.format,
    };
    match cli.command {
        Command::Algebra => commands::algebra(&config),
        Command::Verify(args) => commands::verify(&config, &args),
        Command::Tensors(args) => commands::tensors(&config, &args),
        Command::Flow(args) => commands::flow(&config, &args),
        Command::Observable(args) => commands::observable(&config, &args),
        Command::Chart(args) => commands::chart(&config, &args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_named_and_bare() {
        let (named, bare) = parse_tolerances(&["jordan_identity=1e-3".into(), "1e-6".into()]).unwrap();
        assert_eq!(named["jordan_identity"], 1e-3);
        assert_eq!(bare, Some(1e-6));
    }

    #[test]
    fn tolerances_reject_garbage() {
        assert!(parse_tolerances(&["x=abc".into()]).is_err());
        assert!(parse_tolerances(&["x=-1".into()]).is_err());
        assert!(parse_tolerances(&["=1".into()]).is_err());
        assert!(parse_tolerances(&["0".into()]).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

//! Batch driver around `rdmlab`: every verification suite as a seeded,
//! reproducible command writing one JSON object per line (or CSV for the
//! radial integral table).
//!
//! Exit codes: 0 when every row passes, 1 when some check fails, 2 on
//! usage, input or I/O errors.

pub mod config;
pub mod output;
pub mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::SweepConfig;
pub use output::Format;
pub use suites::SuiteOutput;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid input {path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] rdmlab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(_) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rdmlab", version, about = "Fermionic Fock space and reduced density matrix checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical anticommutation relations and number operator identities.
    VerifyCar(CommonArgs),
    /// P, G and Q conditions on random states, and their agreement with
    /// polynomial positivity on signed trace-one operators.
    VerifyConditions(CommonArgs),
    /// The correlation inequality chain on a random ensemble.
    VerifyCorrelation(CommonArgs),
    /// Radial ball-indicator integral against the Coulomb kernel 1/d.
    Fdl(FdlArgs),
    /// Exact, Hartree–Fock and relaxation energies of a model file.
    Energy(EnergyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of modes n.
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Particle number N.
    #[arg(long, default_value_t = 2)]
    pub particles: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Tolerance; each command has its own default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fixed projection rank; cycles through 1..=n when absent.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct FdlArgs {
    /// Separations, comma separated.
    #[arg(long = "d", value_delimiter = ',', num_args = 0..)]
    pub d: Vec<f64>,
    /// Simpson panels.
    #[arg(long, default_value_t = 2000)]
    pub panels: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    /// Model file `{n, h, V}`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub particles: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Hartree–Fock restarts.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => Format::JsonLines,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// Runs one command and returns its exit code; diagnostics go to stderr.
pub fn run(cli: &Cli) -> u8 {
    match execute(&cli.command) {
        Ok(out) => {
            for line in &out.failures {
                eprintln!("FAIL {line}");
            }
            eprintln!("{}", out.summary);
            if out.failures.is_empty() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
pub(crate) fn execute_for_test(cli: &Cli) -> u8 {
    run(cli)
}

fn execute(command: &Command) -> Result<SuiteOutput, CliError> {
    let (out, path, format) = match command {
        Command::VerifyCar(a) => {
            let cfg = SweepConfig::from_args(a, suites::CAR_TOL)?;
            (suites::car_suite(&cfg)?, &a.out, a.format)
        }
        Command::VerifyConditions(a) => {
            let cfg = SweepConfig::from_args(a, rdmlab::conditions::DEFAULT_TOL)?;
            (config::pool(&cfg)?.install(|| suites::conditions_suite(&cfg))?, &a.out, a.format)
        }
        Command::VerifyCorrelation(a) => {
            let cfg = SweepConfig::from_args(a, rdmlab::correlation::SLACK_TOL)?;
            (config::pool(&cfg)?.install(|| suites::correlation_suite(&cfg))?, &a.out, a.format)
        }
        Command::Fdl(a) => {
            if a.d.is_empty() {
                return Err(CliError::Usage("fdl needs at least one separation (--d 0.5,1,2)".into()));
            }
            let quad = rdmlab::fdl::FdlQuadrature {
                panels: a.panels,
                ..Default::default()
            };
            let tol = config::positive_tol(a.tol, suites::FDL_TOL)?;
            (suites::fdl_suite(&a.d, &quad, tol)?, &a.out, a.format)
        }
        Command::Energy(a) => {
            let tol = config::positive_tol(a.tol, rdmlab::energy::ORDERING_TOL)?;
            let text = std::fs::read_to_string(&a.model).map_err(|source| CliError::Io {
                path: a.model.clone(),
                source,
            })?;
            let model = serde_json::from_str::<rdmlab::energy::ModelJson>(&text)
                .map_err(|e| e.to_string())
                .and_then(|m| m.to_model::<f64>().map_err(|e| e.to_string()))
                .map_err(|reason| CliError::Input {
                    path: a.model.clone(),
                    reason,
                })?;
            if a.particles > model.n() {
                return Err(CliError::Usage(format!("--particles {} exceeds {} modes", a.particles, model.n())));
            }
            let hf = rdmlab::energy::HartreeFockConfig {
                restarts: a.restarts.max(1),
                ..Default::default()
            };
            (suites::energy_suite(&model, a.particles, &hf, a.seed, tol)?, &a.out, a.format)
        }
    };
    let format = Format::from(format);
    if format == Format::Csv && out.csv.is_none() {
        return Err(CliError::Usage("csv output is only available for the fdl table".into()));
    }
    output::write(&out, format, path.as_deref())?;
    Ok(out)
}

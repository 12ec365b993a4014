use std::path::PathBuf;

use crate::{CliError, CommonArgs, Format};

/// Validated settings shared by the sweep commands.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub modes: usize,
    pub particles: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub rank: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn new(modes: usize, particles: usize, trials: usize, seed: u64, tol: f64) -> Self {
        SweepConfig {
            modes,
            particles,
            trials,
            seed,
            tol,
            rank: None,
            out: None,
            format: Format::JsonLines,
        }
    }

    pub fn from_args(a: &CommonArgs, default_tol: f64) -> Result<Self, CliError> {
        if a.modes == 0 || a.modes > rdmlab::fock::MAX_MODES {
            return Err(CliError::Usage(format!(
                "--modes must be in 1..={}, got {}",
                rdmlab::fock::MAX_MODES,
                a.modes
            )));
        }
        if a.particles > a.modes {
            return Err(CliError::Usage(format!("--particles {} exceeds --modes {}", a.particles, a.modes)));
        }
        if a.trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        if let Some(r) = a.rank {
            if r == 0 || r > a.modes {
                return Err(CliError::Usage(format!("--rank must be in 1..={}, got {r}", a.modes)));
            }
        }
        Ok(SweepConfig {
            modes: a.modes,
            particles: a.particles,
            trials: a.trials,
            seed: a.seed,
            tol: positive_tol(a.tol, default_tol)?,
            rank: a.rank,
            out: a.out.clone(),
            format: a.format.into(),
        })
    }
}

pub fn positive_tol(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    let t = tol.unwrap_or(default);
    if !(t > 0.0) || !t.is_finite() {
        return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
    }
    Ok(t)
}

/// Worker pool capped by `RDMLAB_THREADS` when set.
pub fn pool(_cfg: &SweepConfig) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RDMLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("RDMLAB_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

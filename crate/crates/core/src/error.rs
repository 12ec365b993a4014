use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count {0} outside supported range 1..=14")]
    ModeCount(usize),
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndex { index: usize, n_modes: usize },
    #[error("particle number {particles} out of range for {n_modes} modes")]
    ParticleNumber { particles: usize, n_modes: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("orbitals are not orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("state vector has support in more than one particle-number sector")]
    MultiSector,
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("rank {rank} exceeds sector dimension {dim}")]
    Rank { rank: usize, dim: usize },
    #[error("contraction needs at least two particles, got {0}")]
    Contraction(usize),
    #[error("numerical consistency violated: {what} (residue {residue:e})")]
    Consistency { what: &'static str, residue: f64 },
    #[error("decomposition identity failed: {what} (mismatch {mismatch:e})")]
    Decomposition { what: &'static str, mismatch: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sector dimension {dim} above dense eigensolver cap {cap}")]
    SectorTooLarge { dim: usize, cap: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

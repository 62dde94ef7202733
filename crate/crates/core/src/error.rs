use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid level label {0}: expected 1, 2 or 3")]
    InvalidLevel(u8),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(String),

    #[error("undefined photon statistics: {0}")]
    UndefinedStatistics(String),

    #[error("wrong dipole mode: {0}")]
    ModeMismatch(String),

    #[error("oracle memory budget exceeded: N = {n_atoms} needs a {dimension}x{dimension} generator (limit N = {max_atoms})")]
    MemoryBudget {
        n_atoms: usize,
        dimension: usize,
        max_atoms: usize,
    },

    #[error("degenerate steady state: generator nullity is {nullity}, expected 1")]
    DegenerateSteadyState { nullity: usize },

    #[error("steady-state check failed: {0}")]
    SolverCheck(String),

    #[error("time evolution did not converge by t = {time}: residual {residual:e}")]
    NotConverged { residual: f64, time: f64, steps: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

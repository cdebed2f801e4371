use thiserror::Error;

use crate::sdp::SolveStatus;

/// Errors produced by the bound computations and their supporting kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("prior density vanishes on the whole integration box")]
    DegeneratePrior,

    #[error("averaged state is singular (min eigenvalue {min_eigenvalue:e})")]
    SingularAveragedState { min_eigenvalue: f64 },

    #[error(
        "logarithmic-derivative equation is ill conditioned at eigen-pair ({a}, {b}): denominator {denominator:e}"
    )]
    IllConditionedLdEquation { a: usize, b: usize, denominator: f64 },

    #[error("bound requires a parameter-independent weight matrix")]
    UnsupportedWeight,

    #[error("posterior weight matrix is singular for outcome {outcome}")]
    DegenerateWeight { outcome: usize },

    #[error("SDP solver failed with status {status:?}: {message}")]
    Solver { status: SolveStatus, message: String },

    #[error("SDP problem too large: {size} exceeds limit {limit}")]
    ProblemTooLarge { size: usize, limit: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("model is not classical: commutator norm {commutator_norm:e}")]
    NotClassical { commutator_norm: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NotPsd { .. } => "NotPSD",
            Error::DegeneratePrior => "DegeneratePrior",
            Error::SingularAveragedState { .. } => "SingularAveragedState",
            Error::IllConditionedLdEquation { .. } => "IllConditionedLDEquation",
            Error::UnsupportedWeight => "UnsupportedWeight",
            Error::DegenerateWeight { .. } => "DegenerateWeight",
            Error::Solver { .. } => "SolverError",
            Error::ProblemTooLarge { .. } => "ProblemTooLarge",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::NotClassical { .. } => "NotClassical",
            Error::Config(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

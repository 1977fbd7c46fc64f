use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix size {0} is out of range (supported: 2..={max})", max = crate::f2core::MAX_M)]
    BadSize(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not skew-symmetric")]
    NotSkew,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameters (m = {m}, d = {d}) are not admissible: {reason}")]
    NotAdmissible { m: usize, d: usize, reason: String },

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("memory budget exceeded: need {required} bytes, budget is {budget} bytes")]
    MemoryBudget { required: u64, budget: u64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

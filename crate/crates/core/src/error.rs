use thiserror::Error;

/// Errors raised by the solvers and condition-number routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EilsError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid dimension: {0}")]
    Dimension(String),

    /// The problem data does not satisfy the solvability assumptions.
    /// The message names the check (or block) that failed.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("solution vector is zero; the projector onto x-perp is undefined")]
    ZeroSolution,

    #[error("L^T x is the zero vector; the mixed condition number is undefined")]
    DegenerateProjection,

    #[error("Kronecker form needs {requested} entries, above the cap of {cap}; use a compact form")]
    MemoryGuard { requested: usize, cap: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, EilsError>;

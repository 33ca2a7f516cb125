//! Projected condition numbers for equality-constrained indefinite least
//! squares (EILS) problems
//!
//! ```text
//! min_x (b - A x)^T J (b - A x)   subject to   B x = d
//! ```
//!
//! and for the unconstrained, weighted and equality-constrained special
//! cases. The crate also carries the random problem generator used to
//! study these quantities numerically.

pub mod condnum;
pub mod densela;
pub mod error;
pub mod genrand;
pub mod problem;
pub mod special;

pub use condnum::{
    CondParams, CondPreset, DerivativeBlocks, MemoryCap, NormKind, Weight, ZeroSolutionPolicy,
};
pub use densela::{Matrix, Vector};
pub use error::{EilsError, Result};
pub use genrand::{GenSpec, GeneratedProblem, PerturbationSpec};
pub use problem::{
    validate, DataDelta, EilsAnalysis, EilsProblem, EilsSolution, IntermediateFactors,
    SignatureMatrix, ValidationReport,
};

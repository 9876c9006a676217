//! Certified reachability analysis for linear time-invariant systems
//! `x' = Ax + Bu` with saturated inputs `u(t) ∈ [-1, 1]^m`.
//!
//! The crate decides whether a target is reachable from the origin by
//! sandwiching the reachable set between certified inner and outer polytopes
//! built from support points, and settles boundary cases exactly for the
//! subclasses where algebraic boundary points can be enumerated.

pub mod algnum;
pub mod approx;
pub mod decomp;
pub mod boundary;
pub mod exact;
pub mod exppoly;
pub mod model;
pub mod oracle;
pub mod skolem;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReachError {
    #[error("parse error at {field}: {msg}")]
    Parse { field: String, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("matrix is not stable")]
    NotStable,
    #[error("pair (A, b) is not controllable")]
    NotControllable,
    #[error("input column is zero")]
    ZeroColumn,
    #[error("function is identically zero")]
    IdenticallyZero,
    #[error("needs more budget: {0}")]
    NeedsMoreBudget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("problem is outside the exactly decidable subclasses: {0}")]
    TagMismatch(String),
    #[error("theory {0} cannot express this system")]
    InadequateTheory(String),
    #[error("rotation rate is zero")]
    ZeroRotation,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ReachError>;

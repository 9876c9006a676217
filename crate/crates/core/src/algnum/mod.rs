//! Exact and certified numerics: rationals, real algebraic numbers, interval
//! arithmetic, matrices, spectral structure and matrix exponentials.

pub mod alg;
pub mod expm;
pub mod factor;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod spectral;

pub use alg::{alg_compare, format_rational, parse_rational, AlgReal};
pub use expm::{exp_and_integral, expm_at, expm_interval, mat_exp_action};
pub use interval::{set_start_prec, start_prec, CInterval, DyInterval, DEFAULT_PREC, MAX_PREC};
pub use matrix::{dot, idot, AMat, Field, IMat, Mat, QMat};
pub use poly::Poly;
pub use spectral::{eigen_structure, eigen_structure_rational, Eigenvalue, SpectralStructure, StabilityClass};

/// Exact rational number.
pub type Rat = rug::Rational;

//! Kolmogorov's problem for completely monotone and multiply monotone
//! functions on the negative half-line, solved through the truncated
//! power-moment problem on `[0, inf)`.
//!
//! * [`cone`] classifies moment vectors and computes atomic representations.
//! * [`splines`] converts representations to perfect splines and evaluates them.
//! * [`kolmogorov`] decides admissibility of derivative-norm vectors.
//! * [`applications`] covers smoothest interpolation, intermediate-norm bounds
//!   and extremal distribution functions.

pub mod applications;
pub mod chebyshev;
pub mod cli;
pub mod cone;
pub mod error;
pub mod kolmogorov;
pub mod linalg;
pub mod simplex;
pub mod splines;
pub mod types;

pub use cone::{classify, GridConfig, SolverConfig};
pub use error::{Error, Result};
pub use types::{
    index_of, validate_exponents, Atom, AtomicMeasure, Classification, ExponentVector, HalfIndex, MomentVector,
    PerfectSpline, SplineClass, Status,
};

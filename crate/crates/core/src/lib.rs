//! Exact computer algebra for truncated Yangians, twisted Yangians and
//! folded finite W-algebras.
//!
//! Everything is generic over an exact [`Scalar`]; the aliases below fix the
//! arbitrary-precision rationals used by the CLI and the test suites.

pub mod error;
pub mod fold;
pub mod glnp;
pub mod json;
pub mod linalg;
pub mod pbw;
pub mod poly;
pub mod reps;
pub mod report;
pub mod scalar;
pub mod series;
pub mod twisted;
pub mod yangian;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;

//! Driven, dipole-coupled two-qubit dimer under a Markovian master equation.
//!
//! Everything internal is in angular units: rates and detunings in rad/µs,
//! times in µs. [`units`] converts from quoted MHz values.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entanglement;
pub mod error;
pub mod generator;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod propagation;
pub mod scenarios;
pub mod stationary;
pub mod units;

pub use error::{Error, Result};
pub use model::{DensityMatrix, DimerParams, QuotedParams};

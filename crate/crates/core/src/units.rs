//! Conversion between the quoted laboratory units and the internal
//! angular convention.
//!
//! Every rate, detuning and coupling is stored in rad/µs and every time in
//! µs. Couplings and detunings are quoted as ordinary frequencies (ν = ω/2π)
//! in MHz; decay rates are quoted as "2π × x MHz", i.e. by their value over
//! 2π. Both map to angular units by a factor 2π, but keeping the two kinds
//! apart at the API boundary makes the quoting convention explicit.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a number in MHz was quoted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quoted {
    /// An ordinary frequency ν in MHz (detunings, V12, ℓ, Δe).
    Frequency,
    /// A rate quoted as Γ = 2π × value MHz (Γ1, Γ2, Γ12).
    RateOver2Pi,
}

/// Converts a quoted MHz figure to rad/µs.
pub fn to_angular(value_mhz: f64, kind: Quoted) -> Result<f64> {
    if !value_mhz.is_finite() {
        return Err(Error::param("value", format!("{value_mhz} is not finite")));
    }
    Ok(match kind {
        Quoted::Frequency | Quoted::RateOver2Pi => TAU * value_mhz,
    })
}

/// Inverse of [`to_angular`].
pub fn from_angular(value: f64, kind: Quoted) -> f64 {
    match kind {
        Quoted::Frequency | Quoted::RateOver2Pi => value / TAU,
    }
}

/// Converts a rate quoted as a multiple of π MHz (the "Γ = 18π MHz" style)
/// to rad/µs.
pub fn pi_mhz_to_angular(multiple_of_pi: f64) -> Result<f64> {
    to_angular(multiple_of_pi / 2.0, Quoted::RateOver2Pi)
}

pub const NS_PER_US: f64 = 1e3;

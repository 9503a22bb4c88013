use thiserror::Error;

/// Errors produced anywhere in the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("integration failed at t = {time} us: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(
        "steady state is not unique: second-smallest singular value {sigma2:e} \
         is below the threshold {threshold:e}"
    )]
    NonUniqueSteadyState { sigma2: f64, threshold: f64 },

    #[error(
        "trajectory tail mean concurrence {tail:.6} disagrees with the steady-state \
         value {steady:.6}; the horizon is too short"
    )]
    NonStationary { tail: f64, steady: f64 },

    #[error("unknown preset `{name}`; available presets: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<String>,
    },

    #[error("at detuning {detuning_mhz} MHz: {source}")]
    SpectrumPoint {
        detuning_mhz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at {axis} = {value}: {source}")]
    SweepPoint {
        axis: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at sample {index} (t = {time} us): {source}")]
    SamplePoint {
        index: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::IntegrationFailure { .. }
            | Error::NumericalFailure(_)
            | Error::NonUniqueSteadyState { .. }
            | Error::NonStationary { .. } => true,
            Error::SpectrumPoint { source, .. }
            | Error::SweepPoint { source, .. }
            | Error::SamplePoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

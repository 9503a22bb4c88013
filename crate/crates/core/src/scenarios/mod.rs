//! Named parameter sets and sweeps that turn single trajectories into
//! concurrence grids.

mod presets;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    family_a, product_state, psi_alpha, psi_zero_one, DensityMatrix, DimerParams, QuotedParams,
};
use crate::propagation::uniform_times;
use crate::units::{to_angular, Quoted};

pub use presets::{preset, preset_names, presets};
pub use sweep::{
    configure, detect_row_events, run_sweep, run_sweep_with, stationary_concurrence, sweep_row,
    sweep_row_with, RowEvents, StationaryReport, SweepGrid, STATIONARY_AGREEMENT,
};

/// Default number of family-parameter values per sweep.
pub const DEFAULT_AXIS_POINTS: usize = 51;
/// Default number of time samples per trajectory.
pub const DEFAULT_SAMPLES: usize = 400;
/// Shortest horizon accepted for stationary checks, in lifetimes 1/Γ.
pub const MIN_STATIONARY_LIFETIMES: f64 = 20.0;

/// Initial-state family. The field named by the sweep axis is overridden
/// per row; the others stay fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InitialState {
    /// √α|01⟩ + e^{iφ}√(1−α)|10⟩.
    PsiAlpha { alpha: f64, phi: f64 },
    /// √α|00⟩ + e^{iφ}√(1−α)|11⟩.
    PsiZeroOne { alpha: f64, phi: f64 },
    /// X state (a/3, 1/3, 1/3, (1−a)/3) with z = 1/3.
    FamilyA { a: f64 },
    /// (√γ|0⟩ + √(1−γ)|1⟩) ⊗ (√ζ|0⟩ + √(1−ζ)|1⟩).
    Product { gamma: f64, zeta: f64 },
    /// |1⟩ ⊗ (√α|0⟩ + √(1−α)|1⟩), the separable start used for sudden birth.
    ExcitedProduct { alpha: f64 },
}

impl InitialState {
    pub fn build(&self) -> Result<DensityMatrix> {
        match *self {
            InitialState::PsiAlpha { alpha, phi } => psi_alpha(alpha, phi),
            InitialState::PsiZeroOne { alpha, phi } => psi_zero_one(alpha, phi),
            InitialState::FamilyA { a } => family_a(a),
            InitialState::Product { gamma, zeta } => product_state(gamma, zeta, 0.0, 0.0),
            InitialState::ExcitedProduct { alpha } => product_state(0.0, alpha, 0.0, 0.0),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            InitialState::PsiAlpha { .. } => "psi-alpha",
            InitialState::PsiZeroOne { .. } => "psi-zero-one",
            InitialState::FamilyA { .. } => "family-a",
            InitialState::Product { .. } => "product",
            InitialState::ExcitedProduct { .. } => "excited-product",
        }
    }
}

/// Quantity varied along the first axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Alpha,
    A,
    Gamma,
    Zeta,
    /// ℓ1 = ℓ2 = ℓ in MHz.
    EllMhz,
    DeltaEMhz,
}

impl AxisParam {
    pub const ALL: [AxisParam; 6] = [
        AxisParam::Alpha,
        AxisParam::A,
        AxisParam::Gamma,
        AxisParam::Zeta,
        AxisParam::EllMhz,
        AxisParam::DeltaEMhz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::Alpha => "alpha",
            AxisParam::A => "a",
            AxisParam::Gamma => "gamma",
            AxisParam::Zeta => "zeta",
            AxisParam::EllMhz => "ell_mhz",
            AxisParam::DeltaEMhz => "delta_e_mhz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::param("axis", format!("unknown axis `{s}`")))
    }

    /// Applies the axis value to a parameter set and initial state.
    pub fn apply(
        &self,
        value: f64,
        params: &mut DimerParams,
        state: &mut InitialState,
    ) -> Result<()> {
        let family = state.family_name();
        match (self, &mut *state) {
            (AxisParam::Alpha, InitialState::PsiAlpha { alpha, .. })
            | (AxisParam::Alpha, InitialState::PsiZeroOne { alpha, .. })
            | (AxisParam::Alpha, InitialState::ExcitedProduct { alpha }) => *alpha = value,
            (AxisParam::A, InitialState::FamilyA { a }) => *a = value,
            (AxisParam::Gamma, InitialState::Product { gamma, .. }) => *gamma = value,
            (AxisParam::Zeta, InitialState::Product { zeta, .. }) => *zeta = value,
            (AxisParam::EllMhz, _) => {
                let ell = to_angular(value, Quoted::Frequency)?;
                params.ell1 = ell;
                params.ell2 = ell;
            }
            (AxisParam::DeltaEMhz, _) => params.delta_e = to_angular(value, Quoted::Frequency)?,
            _ => {
                return Err(Error::param(
                    "axis",
                    format!(
                        "axis `{}` does not apply to the {family} family",
                        self.name()
                    ),
                ))
            }
        }
        Ok(())
    }
}

/// A family-parameter or system-parameter axis on an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub param: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0
            || !(self.start.is_finite() && self.stop.is_finite())
            || self.stop < self.start
        {
            return Err(Error::param(
                "axis",
                "axis needs at least one point on a finite, ordered range",
            ));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / n
                }
            })
            .collect())
    }
}

/// Detuning grid for spectrum presets (Δ+/2 in MHz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub step_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioPreset {
    pub name: &'static str,
    /// Short description of what the scenario reproduces.
    pub summary: &'static str,
    pub quoted: QuotedParams,
    pub params: DimerParams,
    pub initial: InitialState,
    /// Default sweep axis; None for spectrum-only presets.
    pub axis: Option<AxisSpec>,
    /// Time horizon in lifetimes 1/Γ.
    pub horizon_lifetimes: f64,
    pub samples: usize,
    pub spectrum: Option<SpectrumSpec>,
}

impl ScenarioPreset {
    /// Horizon in µs.
    pub fn horizon(&self) -> Result<f64> {
        Ok(self.horizon_lifetimes / self.params.reference_rate()?)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        uniform_times(self.horizon()?, self.samples)
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::{AxisParam, ScenarioPreset, MIN_STATIONARY_LIFETIMES};
use crate::entanglement::{
    concurrence, concurrence_series, detect_birth, detect_death, BirthDetection,
    EntanglementSeries, EsdEvent, Refine,
};
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, DimerParams};
use crate::propagation::{evolve, evolve_with, uniform_times, Method, Trajectory};
use crate::stationary::steady_state;

/// Parameters and initial state of a preset, optionally with one axis
/// value applied.
pub fn configure(
    preset: &ScenarioPreset,
    axis: Option<(AxisParam, f64)>,
) -> Result<(DimerParams, DensityMatrix)> {
    let mut params = preset.params;
    let mut initial = preset.initial;
    if let Some((param, value)) = axis {
        param.apply(value, &mut params, &mut initial)?;
    }
    params.validate()?;
    Ok((params, initial.build()?))
}

/// One trajectory and its concurrence series.
pub fn sweep_row(
    preset: &ScenarioPreset,
    axis: Option<(AxisParam, f64)>,
    times: &[f64],
    tol: f64,
) -> Result<(Trajectory, EntanglementSeries)> {
    sweep_row_with(preset, axis, times, Method::Dopri45 { tol })
}

/// [`sweep_row`] with an explicit propagation method.
pub fn sweep_row_with(
    preset: &ScenarioPreset,
    axis: Option<(AxisParam, f64)>,
    times: &[f64],
    method: Method,
) -> Result<(Trajectory, EntanglementSeries)> {
    let (params, rho0) = configure(preset, axis)?;
    let traj = evolve_with(&rho0, &params, times, method)?;
    let series = concurrence_series(&traj)?;
    Ok((traj, series))
}

/// Events found in one sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowEvents {
    /// First death, refined by bisection.
    pub death: Option<EsdEvent>,
    /// First birth: from the start if the row starts separable, otherwise
    /// the first revival after the death.
    pub birth: Option<EsdEvent>,
}

/// Death (bisection-refined) and birth events of one trajectory.
pub fn detect_row_events(
    series: &EntanglementSeries,
    traj: &Trajectory,
    params: &DimerParams,
    eps: f64,
) -> Result<RowEvents> {
    let death = detect_death(
        series,
        eps,
        Refine::Bisect {
            trajectory: traj,
            params,
        },
    )?;
    let birth = match detect_birth(series, eps)? {
        BirthDetection::Birth(e) => Some(e),
        BirthDetection::NoBirth => None,
        BirthDetection::NotApplicable => match death {
            Some(d) => {
                let start = series.times.partition_point(|&t| t < d.bracket.1);
                detect_birth(&series.tail_from(start), eps)?.event()
            }
            None => None,
        },
    };
    Ok(RowEvents { death, birth })
}

/// Concurrence on (axis value × time), one row per axis value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub preset: String,
    pub axis: AxisParam,
    pub axis_values: Vec<f64>,
    /// µs.
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub events: Vec<RowEvents>,
    pub method: Method,
    pub eps: f64,
}

/// Evolves one trajectory per axis value. Rows run in parallel on the
/// current rayon pool and are assembled in axis order.
pub fn run_sweep(
    preset: &ScenarioPreset,
    axis: AxisParam,
    values: &[f64],
    tol: f64,
    eps: f64,
) -> Result<SweepGrid> {
    run_sweep_with(preset, axis, values, Method::Dopri45 { tol }, eps)
}

/// [`run_sweep`] with an explicit propagation method. Exponential stepping
/// keeps phases exact in strongly detuned frames where the adaptive pair
/// accumulates phase error over many rotations.
pub fn run_sweep_with(
    preset: &ScenarioPreset,
    axis: AxisParam,
    values: &[f64],
    method: Method,
    eps: f64,
) -> Result<SweepGrid> {
    if values.is_empty() {
        return Err(Error::param("axis", "sweep needs at least one axis value"));
    }
    let times = preset.times()?;
    let rows: Vec<Result<(Vec<f64>, RowEvents)>> = values
        .par_iter()
        .map(|&value| {
            let run = || -> Result<(Vec<f64>, RowEvents)> {
                let (params, _) = configure(preset, Some((axis, value)))?;
                let (traj, series) = sweep_row_with(preset, Some((axis, value)), &times, method)?;
                let events = detect_row_events(&series, &traj, &params, eps)?;
                Ok((series.values, events))
            };
            run().map_err(|e| Error::SweepPoint {
                axis: axis.name().to_string(),
                value,
                source: Box::new(e),
            })
        })
        .collect();

    let mut grid = SweepGrid {
        preset: preset.name.to_string(),
        axis,
        axis_values: values.to_vec(),
        times,
        values: Vec::with_capacity(values.len()),
        events: Vec::with_capacity(values.len()),
        method,
        eps,
    };
    for row in rows {
        let (v, e) = row?;
        grid.values.push(v);
        grid.events.push(e);
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryReport {
    /// Concurrence of the steady state.
    pub steady: f64,
    /// Mean concurrence over the last tenth of the horizon.
    pub tail_mean: f64,
}

/// Largest accepted |steady − tail_mean|.
pub const STATIONARY_AGREEMENT: f64 = 0.01;

/// Concurrence of the steady state, checked against the tail of an evolved
/// trajectory over `horizon_lifetimes`/Γ.
pub fn stationary_concurrence(
    preset: &ScenarioPreset,
    axis: Option<(AxisParam, f64)>,
    horizon_lifetimes: f64,
    tol: f64,
) -> Result<StationaryReport> {
    if !(horizon_lifetimes >= MIN_STATIONARY_LIFETIMES) {
        return Err(Error::param(
            "horizon",
            format!("{horizon_lifetimes} lifetimes is shorter than {MIN_STATIONARY_LIFETIMES}"),
        ));
    }
    let (params, rho0) = configure(preset, axis)?;
    let steady = concurrence(&steady_state(&params)?)?;
    let horizon = horizon_lifetimes / params.reference_rate()?;
    let times = uniform_times(horizon, preset.samples.max(100))?;
    let series = concurrence_series(&evolve(&rho0, &params, &times, tol)?)?;
    let tail: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= 0.9 * horizon)
        .map(|(_, c)| *c)
        .collect();
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    if (tail_mean - steady).abs() > STATIONARY_AGREEMENT {
        return Err(Error::NonStationary {
            tail: tail_mean,
            steady,
        });
    }
    Ok(StationaryReport { steady, tail_mean })
}

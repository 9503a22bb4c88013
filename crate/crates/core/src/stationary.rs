//! Steady state of the Liouvillian and steady-state fluorescence spectra.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::build_liouvillian;
use crate::linalg::{max_abs, unvec4, vec4, Super16, Vec16, C64, ONE, ZERO};
use crate::model::{basis_index, DensityMatrix, DimerParams};
use crate::units::{to_angular, Quoted};

/// Largest acceptable ‖Lv·vec(ρss)‖∞.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// A second singular value below this fraction of ‖Lv‖₂ means the kernel is
/// not one-dimensional.
pub const UNIQUENESS_RATIO: f64 = 1e-8;
const REFINEMENT_STEPS: usize = 3;

fn trace_indices() -> [usize; 4] {
    [0, 5, 10, 15]
}

fn residual(l: &Super16, rho: &DensityMatrix) -> f64 {
    (l * vec4(rho.matrix()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn finish(v: &Vec16) -> DensityMatrix {
    let m = unvec4(v);
    let mut m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let tr = m.trace();
    m /= tr;
    DensityMatrix::new_unchecked(m)
}

/// The unique ρss with Lv·vec(ρss) = 0 and unit trace.
///
/// One row of Lv is replaced by the trace functional and the system is
/// LU-solved with iterative refinement. If the residual is still too large
/// the full over-determined system is solved in the least-squares sense.
pub fn steady_state(params: &DimerParams) -> Result<DensityMatrix> {
    let l = *build_liouvillian(params)?.matrix();

    let sv = l.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    let norm = s[15];
    let threshold = UNIQUENESS_RATIO * norm;
    if norm == 0.0 || s[1] < threshold {
        return Err(Error::NonUniqueSteadyState {
            sigma2: s[1],
            threshold,
        });
    }

    let mut a = l;
    let mut b = Vec16::zeros();
    for c in 0..16 {
        a[(0, c)] = ZERO;
    }
    for k in trace_indices() {
        a[(0, k)] = ONE;
    }
    b[0] = ONE;

    let lu = a.lu();
    if lu.is_invertible() {
        if let Some(mut x) = lu.solve(&b) {
            for _ in 0..REFINEMENT_STEPS {
                let r = b - a * x;
                match lu.solve(&r) {
                    Some(dx) => x += dx,
                    None => break,
                }
            }
            let rho = finish(&x);
            if residual(&l, &rho) <= RESIDUAL_TOL && rho.check().is_ok() {
                return Ok(rho);
            }
        }
    }
    least_squares(&l)
}

fn least_squares(l: &Super16) -> Result<DensityMatrix> {
    let mut a = DMatrix::<C64>::zeros(17, 16);
    a.view_mut((0, 0), (16, 16)).copy_from(l);
    for k in trace_indices() {
        a[(16, k)] = ONE;
    }
    let mut b = DVector::<C64>::zeros(17);
    b[16] = ONE;
    let x = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::NumericalFailure(format!("least-squares steady state: {e}")))?;
    let rho = finish(&Vec16::from_column_slice(x.as_slice()));
    let r = residual(l, &rho);
    if r > RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "steady-state residual {r:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    rho.check()?;
    Ok(rho)
}

/// ρ01,01 + ρ10,10 + 2ρ11,11.
pub fn fluorescence_signal(rho: &DensityMatrix) -> f64 {
    rho.population(basis_index(0, 1))
        + rho.population(basis_index(1, 0))
        + 2.0 * rho.population(basis_index(1, 1))
}

/// Steady-state observables against the laser detuning Δ+/2 (MHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub detuning_axis: Vec<f64>,
    pub signal: Vec<f64>,
    pub p01: Vec<f64>,
    pub p10: Vec<f64>,
    pub p11: Vec<f64>,
}

impl SpectrumCurve {
    pub fn len(&self) -> usize {
        self.detuning_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning_axis.is_empty()
    }
}

/// Equally spaced grid from `start` to `stop` inclusive.
pub fn detuning_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::param(
            "grid",
            format!("bad grid [{start}, {stop}] step {step}"),
        ));
    }
    let n = ((stop - start) / step).round() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Steady state at each Δ+/2 in `grid_mhz`, with every other parameter
/// taken from `base`. Points run in parallel; the result is in grid order.
pub fn spectrum_scan(base: &DimerParams, grid_mhz: &[f64]) -> Result<SpectrumCurve> {
    if grid_mhz.is_empty() {
        return Err(Error::param("detuning_grid", "grid is empty"));
    }
    if grid_mhz.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(
            "detuning_grid",
            "grid must be strictly increasing",
        ));
    }
    base.validate()?;
    let points: Vec<Result<DensityMatrix>> = grid_mhz
        .par_iter()
        .map(|&x| {
            let mut p = *base;
            p.delta_plus = 2.0 * to_angular(x, Quoted::Frequency)?;
            steady_state(&p)
        })
        .collect();

    let mut curve = SpectrumCurve {
        detuning_axis: grid_mhz.to_vec(),
        signal: Vec::with_capacity(grid_mhz.len()),
        p01: Vec::with_capacity(grid_mhz.len()),
        p10: Vec::with_capacity(grid_mhz.len()),
        p11: Vec::with_capacity(grid_mhz.len()),
    };
    for (r, &x) in points.into_iter().zip(grid_mhz) {
        let rho = r.map_err(|e| Error::SpectrumPoint {
            detuning_mhz: x,
            source: Box::new(e),
        })?;
        curve.signal.push(fluorescence_signal(&rho));
        curve.p01.push(rho.population(basis_index(0, 1)));
        curve.p10.push(rho.population(basis_index(1, 0)));
        curve.p11.push(rho.population(basis_index(1, 1)));
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub location_mhz: f64,
    pub height: f64,
}

/// Strict interior local maxima of `values` over `axis`, each refined by
/// the parabola through it and its two neighbours. Sorted by location.
pub fn local_maxima(axis: &[f64], values: &[f64]) -> Vec<Peak> {
    let n = values.len().min(axis.len());
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        if !(y1 > y0 && y1 > y2) {
            continue;
        }
        let (x0, x1, x2) = (axis[i - 1], axis[i], axis[i + 1]);
        // Vertex of the interpolating parabola (general spacing).
        let d0 = (y1 - y0) / (x1 - x0);
        let d1 = (y2 - y1) / (x2 - x1);
        let curv = (d1 - d0) / (x2 - x0);
        let (loc, height) = if curv < 0.0 {
            // p(x) = y0 + d0 (x − x0) + curv (x − x0)(x − x1)
            let xv = (0.5 * (x0 + x1) - d0 / (2.0 * curv)).clamp(x0, x2);
            let yv = y0 + d0 * (xv - x0) + curv * (xv - x0) * (xv - x1);
            (xv, yv)
        } else {
            (x1, y1)
        };
        peaks.push(Peak {
            location_mhz: loc,
            height,
        });
    }
    peaks
}

pub fn find_peaks(curve: &SpectrumCurve) -> Vec<Peak> {
    local_maxima(&curve.detuning_axis, &curve.signal)
}

/// Max element difference between two steady states; used by callers that
/// cross-check against long-time evolution.
pub fn state_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    max_abs(&(a.matrix() - b.matrix()))
}

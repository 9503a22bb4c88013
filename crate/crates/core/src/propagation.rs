//! Time evolution of the master equation.
//!
//! [`evolve`] integrates the vectorised equation dv/dt = L·v with an
//! adaptive Dormand–Prince 4(5) pair, stepping exactly onto every requested
//! sample time. A fixed-step classical RK4 mode and exact
//! matrix-exponential stepping are available through [`evolve_with`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{build_liouvillian, Liouvillian};
use crate::linalg::{hermiticity_defect, unvec4, vec4, Op4, Super16, Vec16, C64, ZERO};
use crate::model::{basis_index, psi_zero_one, DensityMatrix, DimerParams};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-3;
const MAX_STEPS: u64 = 50_000_000;
/// Per-step error target relative to the requested tolerance. Local errors
/// accumulate over many steps, so the controller works below `tol` to keep
/// the global error near it.
const LOCAL_TOL_FACTOR: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Adaptive Dormand–Prince 4(5) with the given relative tolerance.
    Dopri45 { tol: f64 },
    /// Classical RK4 with a nominal step (µs); each sample interval is split
    /// into equal steps no longer than this.
    Rk4 { step: f64 },
    /// Exact propagation with exp(L·Δt) between samples.
    Expm,
}

impl Default for Method {
    fn default() -> Self {
        Method::Dopri45 { tol: DEFAULT_TOL }
    }
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dopri45 { .. } => "dopri45",
            Method::Rk4 { .. } => "rk4",
            Method::Expm => "expm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
}

/// Density-matrix samples on a time grid (µs).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub meta: TrajectoryMeta,
}

/// Worst-case invariant defects along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub trace: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn drift(&self) -> Result<Drift> {
        let mut d = Drift {
            trace: 0.0,
            hermiticity: 0.0,
            min_eigenvalue: f64::INFINITY,
        };
        for s in &self.states {
            d.trace = d.trace.max((s.trace() - C64::new(1.0, 0.0)).norm());
            d.hermiticity = d.hermiticity.max(hermiticity_defect(s.matrix()));
            d.min_eigenvalue = d.min_eigenvalue.min(s.min_eigenvalue()?);
        }
        Ok(d)
    }
}

/// `samples` equally spaced times from 0 to `t_stop` inclusive.
pub fn uniform_times(t_stop: f64, samples: usize) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::param("samples", "at least one sample is required"));
    }
    if !(t_stop.is_finite() && t_stop >= 0.0) {
        return Err(Error::param(
            "t_stop",
            format!("{t_stop} must be finite and non-negative"),
        ));
    }
    if samples == 1 {
        return Ok(vec![0.0]);
    }
    if t_stop == 0.0 {
        return Err(Error::param(
            "t_stop",
            "must be positive when more than one sample is requested",
        ));
    }
    let n = (samples - 1) as f64;
    Ok((0..samples).map(|k| t_stop * k as f64 / n).collect())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::param("times", "the sample grid must start at t = 0"));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::param(
                "times",
                "sample times must be finite and strictly increasing",
            ));
        }
    }
    Ok(())
}

/// Non-zero entries of the Liouvillian, grouped by row.
struct SparseGenerator {
    row_start: [usize; 17],
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseGenerator {
    fn new(l: &Super16) -> Self {
        Self::filtered(l, |_, _| true)
    }

    fn filtered(l: &Super16, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut row_start = [0; 17];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..16 {
            row_start[r] = cols.len();
            for c in 0..16 {
                let v = l[(r, c)];
                if v != ZERO && keep(r, c) {
                    cols.push(c);
                    vals.push(v);
                }
            }
        }
        row_start[16] = cols.len();
        Self {
            row_start,
            cols,
            vals,
        }
    }

    #[inline]
    fn apply(&self, y: &[C64; 16], out: &mut [C64; 16]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[k] * y[self.cols[k]];
            }
            *o = acc;
        }
    }
}

/// The generator seen from a frame that co-rotates with the diagonal
/// phases of L. With v = e^{iΘτ}w, where Θ = Im diag L, the system for w is
/// dw/dτ = Re(diag L)·w + e^{−iΘτ} L_off e^{iΘτ} w, so free precession is
/// carried exactly by the frame and only the couplings are integrated.
struct RotatingGenerator {
    off: SparseGenerator,
    decay: [f64; 16],
    theta: [f64; 16],
}

impl RotatingGenerator {
    fn new(l: &Super16) -> Self {
        let mut decay = [0.0; 16];
        let mut theta = [0.0; 16];
        for k in 0..16 {
            decay[k] = l[(k, k)].re;
            theta[k] = l[(k, k)].im;
        }
        Self {
            off: SparseGenerator::filtered(l, |r, c| r != c),
            decay,
            theta,
        }
    }

    fn phases(&self, tau: f64) -> State {
        let mut p = [ZERO; 16];
        for (k, pk) in p.iter_mut().enumerate() {
            let (s, c) = (self.theta[k] * tau).sin_cos();
            *pk = C64::new(c, s);
        }
        p
    }

    #[inline]
    fn apply(&self, tau: f64, w: &State, out: &mut State) {
        let p = self.phases(tau);
        let mut u = [ZERO; 16];
        for k in 0..16 {
            u[k] = p[k] * w[k];
        }
        self.off.apply(&u, out);
        for k in 0..16 {
            out[k] = out[k] * p[k].conj() + w[k] * self.decay[k];
        }
    }
}

type State = [C64; 16];

fn to_state(rho: &Op4) -> State {
    let v = vec4(rho);
    let mut s = [ZERO; 16];
    s.copy_from_slice(v.as_slice());
    s
}

fn from_state(s: &State) -> DensityMatrix {
    DensityMatrix::new_unchecked(unvec4(&Vec16::from_column_slice(s)))
}

#[inline]
fn axpy_into(out: &mut State, y: &State, terms: &[(f64, &State)], h: f64) {
    for i in 0..16 {
        let mut acc = ZERO;
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Evolves `rho0` with the default adaptive integrator at tolerance `tol`.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &DimerParams,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    evolve_with(rho0, params, times, Method::Dopri45 { tol })
}

pub fn evolve_with(
    rho0: &DensityMatrix,
    params: &DimerParams,
    times: &[f64],
    method: Method,
) -> Result<Trajectory> {
    check_times(times)?;
    let l = build_liouvillian(params)?;
    match method {
        Method::Dopri45 { tol } => {
            if !(MIN_TOL..=MAX_TOL).contains(&tol) {
                return Err(Error::param(
                    "tol",
                    format!("{tol:e} is outside [{MIN_TOL:e}, {MAX_TOL:e}]"),
                ));
            }
            Dopri::new(&l, tol).run(rho0, times)
        }
        Method::Rk4 { step } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::param("step", "RK4 step must be positive"));
            }
            rk4_run(&l, rho0, times, step)
        }
        Method::Expm => expm_run(&l, rho0, times),
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Dopri {
    gen: RotatingGenerator,
    user_tol: f64,
    /// Per-step tolerance used by the controller.
    tol: f64,
    max_steps: u64,
    accepted: u64,
    rejected: u64,
}

impl Dopri {
    fn new(l: &Liouvillian, tol: f64) -> Self {
        Self {
            gen: RotatingGenerator::new(l.matrix()),
            user_tol: tol,
            tol: tol * LOCAL_TOL_FACTOR,
            max_steps: MAX_STEPS,
            accepted: 0,
            rejected: 0,
        }
    }

    fn err_norm(&self, y: &State, y_new: &State, err: &State) -> f64 {
        let mut s = 0.0;
        for i in 0..16 {
            let sc = self.tol + self.tol * y[i].norm().max(y_new[i].norm());
            s += (err[i].norm() / sc).powi(2);
        }
        (s / 16.0).sqrt()
    }

    fn scaled_norm(&self, y: &State, v: &State) -> f64 {
        let mut s = 0.0;
        for i in 0..16 {
            let sc = self.tol + self.tol * y[i].norm();
            s += (v[i].norm() / sc).powi(2);
        }
        (s / 16.0).sqrt()
    }

    fn initial_step(&self, y: &State, f0: &State, span: f64) -> f64 {
        let d0 = self.scaled_norm(y, y);
        let d1 = self.scaled_norm(y, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let mut y1 = [ZERO; 16];
        axpy_into(&mut y1, y, &[(1.0, f0)], h0);
        let mut f1 = [ZERO; 16];
        self.gen.apply(h0, &y1, &mut f1);
        let mut diff = [ZERO; 16];
        for i in 0..16 {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = self.scaled_norm(y, &diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    fn run(mut self, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(times.len());
        states.push(*rho0);
        // `y` holds the rotating-frame state; the frame is re-anchored at
        // every sample so phase arguments stay small.
        let mut y = to_state(rho0.matrix());
        let mut t = 0.0;
        let mut anchor = 0.0;
        let mut k1 = [ZERO; 16];
        self.gen.apply(0.0, &y, &mut k1);
        let span = *times.last().unwrap();
        let mut h = if span > 0.0 {
            self.initial_step(&y, &k1, span)
        } else {
            0.0
        };

        let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
            [ZERO; 16], [ZERO; 16], [ZERO; 16], [ZERO; 16], [ZERO; 16], [ZERO; 16],
        );
        let mut tmp = [ZERO; 16];
        let mut y_new = [ZERO; 16];
        let mut err = [ZERO; 16];

        for &target in &times[1..] {
            while t < target {
                let remaining = target - t;
                let last = h >= remaining * (1.0 - 1e-12);
                let step = if last { remaining } else { h };
                if step < 16.0 * f64::EPSILON * t.abs().max(span) {
                    return Err(Error::IntegrationFailure {
                        time: t,
                        reason: format!("step size underflow (h = {step:e})"),
                    });
                }
                if self.accepted + self.rejected > self.max_steps {
                    return Err(Error::IntegrationFailure {
                        time: t,
                        reason: format!("step budget of {} exhausted", self.max_steps),
                    });
                }

                let tau = t - anchor;
                axpy_into(&mut tmp, &y, &[(A21, &k1)], step);
                self.gen.apply(tau + C2 * step, &tmp, &mut k2);
                axpy_into(&mut tmp, &y, &[(A31, &k1), (A32, &k2)], step);
                self.gen.apply(tau + C3 * step, &tmp, &mut k3);
                axpy_into(&mut tmp, &y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step);
                self.gen.apply(tau + C4 * step, &tmp, &mut k4);
                axpy_into(
                    &mut tmp,
                    &y,
                    &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
                    step,
                );
                self.gen.apply(tau + C5 * step, &tmp, &mut k5);
                axpy_into(
                    &mut tmp,
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    step,
                );
                self.gen.apply(tau + step, &tmp, &mut k6);
                axpy_into(
                    &mut y_new,
                    &y,
                    &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                    step,
                );
                let tau_new = if last { target - anchor } else { tau + step };
                self.gen.apply(tau_new, &y_new, &mut k7);
                for i in 0..16 {
                    err[i] = (k1[i] * E1
                        + k3[i] * E3
                        + k4[i] * E4
                        + k5[i] * E5
                        + k6[i] * E6
                        + k7[i] * E7)
                        * step;
                }
                let e = self.err_norm(&y, &y_new, &err);
                if !e.is_finite() {
                    return Err(Error::IntegrationFailure {
                        time: t,
                        reason: "non-finite error estimate".into(),
                    });
                }
                let factor = if e == 0.0 {
                    5.0
                } else {
                    (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
                };
                if e <= 1.0 {
                    self.accepted += 1;
                    t = if last { target } else { t + step };
                    y = y_new;
                    k1 = k7;
                    // A step shortened to land on a sample does not shrink h.
                    h = if last {
                        h.max(step * factor)
                    } else {
                        step * factor
                    };
                } else {
                    self.rejected += 1;
                    h = step * factor.min(1.0);
                }
            }
            let p = self.gen.phases(target - anchor);
            for i in 0..16 {
                y[i] *= p[i];
            }
            anchor = target;
            self.gen.apply(0.0, &y, &mut k1);
            states.push(from_state(&y));
        }

        Ok(Trajectory {
            times: times.to_vec(),
            states,
            meta: TrajectoryMeta {
                method: Method::Dopri45 { tol: self.user_tol },
                accepted_steps: self.accepted,
                rejected_steps: self.rejected,
            },
        })
    }
}

fn rk4_run(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64], step: f64) -> Result<Trajectory> {
    let gen = SparseGenerator::new(l.matrix());
    let mut y = to_state(rho0.matrix());
    let mut states = vec![*rho0];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        ([ZERO; 16], [ZERO; 16], [ZERO; 16], [ZERO; 16], [ZERO; 16]);
    let mut steps = 0u64;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let n = ((dt / step) * (1.0 - 1e-12)).ceil().max(1.0) as u64;
        let h = dt / n as f64;
        for _ in 0..n {
            gen.apply(&y, &mut k1);
            axpy_into(&mut tmp, &y, &[(0.5, &k1)], h);
            gen.apply(&tmp, &mut k2);
            axpy_into(&mut tmp, &y, &[(0.5, &k2)], h);
            gen.apply(&tmp, &mut k3);
            axpy_into(&mut tmp, &y, &[(1.0, &k3)], h);
            gen.apply(&tmp, &mut k4);
            let y0 = y;
            axpy_into(
                &mut y,
                &y0,
                &[
                    (1.0 / 6.0, &k1),
                    (1.0 / 3.0, &k2),
                    (1.0 / 3.0, &k3),
                    (1.0 / 6.0, &k4),
                ],
                h,
            );
        }
        steps += n;
        states.push(from_state(&y));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        meta: TrajectoryMeta {
            method: Method::Rk4 { step },
            accepted_steps: steps,
            rejected_steps: 0,
        },
    })
}

fn propagator(l: &Liouvillian, t: f64) -> Super16 {
    (l.matrix() * C64::new(t, 0.0)).exp()
}

fn expm_run(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    let mut cache: HashMap<u64, Super16> = HashMap::new();
    let mut v = vec4(rho0.matrix());
    let mut states = vec![*rho0];
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let u = cache
            .entry(dt.to_bits())
            .or_insert_with(|| propagator(l, dt));
        v = *u * v;
        states.push(DensityMatrix::new_unchecked(unvec4(&v)));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        meta: TrajectoryMeta {
            method: Method::Expm,
            accepted_steps: (times.len() - 1) as u64,
            rejected_steps: 0,
        },
    })
}

/// ρ(t) = unvec(exp(L·t)·vec(ρ0)).
pub fn propagate_expm(rho0: &DensityMatrix, params: &DimerParams, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param(
            "t",
            format!("{t} must be finite and non-negative"),
        ));
    }
    let l = build_liouvillian(params)?;
    if t == 0.0 {
        return Ok(*rho0);
    }
    Ok(DensityMatrix::new_unchecked(unvec4(
        &(propagator(&l, t) * vec4(rho0.matrix())),
    )))
}

/// Closed-form ρ(t) for the undriven, uncoupled dimer (V12 = Γ12 = ℓ = 0,
/// Γ1 = Γ2 = Γ) started in √α|00⟩ + √(1−α)|11⟩.
///
/// Populations decay by cascade; the |00⟩–|11⟩ coherence decays at Γ and
/// rotates at the |11⟩ energy Δ+ + Δe (Δ+ being the full sum detuning):
/// ρ00,11(t) = √(α(1−α))·e^{−Γt}·e^{i(Δe + Δ+)t}.
pub fn analytic_zero_one_state(
    alpha: f64,
    t: f64,
    gamma: f64,
    delta_e: f64,
    delta_plus: f64,
) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param(
            "t",
            format!("{t} must be finite and non-negative"),
        ));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", "must be positive"));
    }
    if t == 0.0 {
        return psi_zero_one(alpha, 0.0);
    }
    // Validates alpha.
    psi_zero_one(alpha, 0.0)?;
    let beta = 1.0 - alpha;
    let x = (-gamma * t).exp();
    let mut m = Op4::zeros();
    let re = |v: f64| C64::new(v, 0.0);
    m[(0, 0)] = re(1.0 + beta * (x * x - 2.0 * x));
    let single = re(beta * (x - x * x));
    m[(1, 1)] = single;
    m[(2, 2)] = single;
    m[(3, 3)] = re(beta * x * x);
    let coherence = C64::from_polar((alpha * beta).sqrt() * x, (delta_e + delta_plus) * t);
    let (g, e) = (basis_index(0, 0), basis_index(1, 1));
    m[(g, e)] = coherence;
    m[(e, g)] = coherence.conj();
    Ok(DensityMatrix::new_unchecked(m))
}

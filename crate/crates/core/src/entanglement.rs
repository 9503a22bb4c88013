//! Wootters concurrence and detection of entanglement death and birth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use nalgebra::SMatrix;

use crate::linalg::{eigh, Op4, C64};
use crate::model::{DensityMatrix, DimerParams};
use crate::propagation::{propagate_expm, Trajectory};

/// Default zero threshold for event detection.
pub const DEFAULT_EPS: f64 = 1e-6;
/// Samples a crossing must persist for.
pub const PERSISTENCE: usize = 3;
/// Negative singular-value estimates in [−CLAMP_TOL, 0) are round-off.
pub const CLAMP_TOL: f64 = 1e-12;
/// Eigenvalues of ρ at or below this are treated as outside its support.
pub const RANK_TOL: f64 = 1e-14;
/// Bisection target, in units of the inverse reference rate.
pub const REFINE_RESOLUTION: f64 = 1e-4;

/// σy ⊗ σy.
fn flip_operator() -> Op4 {
    let one = C64::new(1.0, 0.0);
    let mut y = Op4::zeros();
    y[(0, 3)] = -one;
    y[(1, 2)] = one;
    y[(2, 1)] = one;
    y[(3, 0)] = -one;
    y
}

fn flip_matrix(m: &Op4) -> Op4 {
    let y = flip_operator();
    y * m.conjugate() * y
}

/// ρ̃ = (σy ⊗ σy) ρ* (σy ⊗ σy).
pub fn spin_flip(rho: &DensityMatrix) -> Op4 {
    flip_matrix(rho.matrix())
}

/// C(ρ) = max(0, λ1 − λ2 − λ3 − λ4).
///
/// With ρ = W W† on its support (W = U_r √D_r), ρ^{1/2} ρ̃ ρ^{1/2} is
/// unitarily equivalent to T T† for T = W† (σy⊗σy) W*, so the λi are the
/// singular values of T. They are read off as the non-negative eigenvalues
/// of the Hermitian dilation [[0, T], [T†, 0]], which avoids taking square
/// roots of round-off-sized eigenvalues on rank-deficient states.
///
/// Eigenvalues of ρ at or below [`RANK_TOL`] (including negative ones within
/// the positivity slack) are dropped.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let e = eigh(rho.matrix())?;
    let mut w = Op4::zeros();
    for k in (0..4).filter(|&k| e.values[k] > RANK_TOL) {
        w.set_column(
            k,
            &(e.vectors.column(k) * C64::new(e.values[k].sqrt(), 0.0)),
        );
    }
    let t = w.adjoint() * flip_operator() * w.conjugate();

    let mut dilation = SMatrix::<C64, 8, 8>::zeros();
    dilation.fixed_view_mut::<4, 4>(0, 4).copy_from(&t);
    dilation
        .fixed_view_mut::<4, 4>(4, 0)
        .copy_from(&t.adjoint());
    let eig = eigh(&dilation)?.values;

    // Ascending order: the top four are the singular values.
    let mut lambda = [0.0; 4];
    for (l, &v) in lambda.iter_mut().zip(&eig[4..]) {
        if v < -CLAMP_TOL {
            return Err(Error::NumericalFailure(format!(
                "singular value estimate {v:e} is below the clamp tolerance"
            )));
        }
        *l = v.max(0.0);
    }
    let c = lambda[3] - lambda[2] - lambda[1] - lambda[0];
    Ok(c.clamp(0.0, 1.0))
}

/// Concurrence sampled along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl EntanglementSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The samples from index `start` on.
    pub fn tail_from(&self, start: usize) -> EntanglementSeries {
        EntanglementSeries {
            times: self.times[start..].to_vec(),
            values: self.values[start..].to_vec(),
        }
    }
}

pub fn concurrence_series(traj: &Trajectory) -> Result<EntanglementSeries> {
    let values = traj
        .states
        .iter()
        .zip(&traj.times)
        .enumerate()
        .map(|(index, (s, &time))| {
            concurrence(s).map_err(|e| Error::SamplePoint {
                index,
                time,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementSeries {
        times: traj.times.clone(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Death,
    Birth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsdEvent {
    pub kind: EventKind,
    /// µs.
    pub time: f64,
    /// True when bisection narrowed the crossing to the target resolution.
    pub resolved: bool,
    /// Sample times enclosing the crossing (after refinement, if any).
    pub bracket: (f64, f64),
}

/// Outcome of birth detection, which only makes sense for series that
/// start separable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BirthDetection {
    /// The series starts above the threshold.
    NotApplicable,
    NoBirth,
    Birth(EsdEvent),
}

impl BirthDetection {
    pub fn event(&self) -> Option<EsdEvent> {
        match self {
            BirthDetection::Birth(e) => Some(*e),
            _ => None,
        }
    }
}

/// Optional bisection on recomputed states.
#[derive(Debug, Clone, Copy)]
pub enum Refine<'a> {
    No,
    Bisect {
        trajectory: &'a Trajectory,
        params: &'a DimerParams,
    },
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::param("eps", format!("{eps} must be positive")))
    }
}

fn interpolate(series: &EntanglementSeries, i: usize, eps: f64) -> f64 {
    let (t0, t1) = (series.times[i - 1], series.times[i]);
    let (c0, c1) = (series.values[i - 1], series.values[i]);
    if c0 == c1 {
        return t1;
    }
    let f = ((eps - c0) / (c1 - c0)).clamp(0.0, 1.0);
    t0 + f * (t1 - t0)
}

fn death_index(series: &EntanglementSeries, eps: f64) -> Option<usize> {
    let c = &series.values;
    (1..c.len()).find(|&i| {
        if c[i - 1] <= eps || i + PERSISTENCE > c.len() {
            return false;
        }
        let window = &c[i..i + PERSISTENCE];
        // An exact zero marks a genuinely clamped concurrence; asymptotic
        // decay below eps never produces one.
        window.iter().all(|&v| v <= eps) && window.contains(&0.0)
    })
}

fn birth_index(series: &EntanglementSeries, eps: f64) -> Option<usize> {
    let c = &series.values;
    (1..c.len()).find(|&i| {
        c[i - 1] <= eps
            && i + PERSISTENCE <= c.len()
            && c[i..i + PERSISTENCE].iter().all(|&v| v > eps)
    })
}

/// First death: the series drops from above `eps` to at most `eps`, stays
/// there for [`PERSISTENCE`] samples and reaches exactly zero within them.
pub fn detect_death(
    series: &EntanglementSeries,
    eps: f64,
    refine: Refine<'_>,
) -> Result<Option<EsdEvent>> {
    check_eps(eps)?;
    let Some(i) = death_index(series, eps) else {
        return Ok(None);
    };
    let event = EsdEvent {
        kind: EventKind::Death,
        time: interpolate(series, i, eps),
        resolved: false,
        bracket: (series.times[i - 1], series.times[i]),
    };
    match refine {
        Refine::No => Ok(Some(event)),
        Refine::Bisect { trajectory, params } => {
            refine_event(&event, trajectory, params, eps).map(Some)
        }
    }
}

/// First birth: the series rises above `eps` and stays above for
/// [`PERSISTENCE`] samples.
pub fn detect_birth(series: &EntanglementSeries, eps: f64) -> Result<BirthDetection> {
    check_eps(eps)?;
    match series.values.first() {
        None => return Ok(BirthDetection::NoBirth),
        Some(&c0) if c0 > eps => return Ok(BirthDetection::NotApplicable),
        _ => {}
    }
    Ok(match birth_index(series, eps) {
        None => BirthDetection::NoBirth,
        Some(i) => BirthDetection::Birth(EsdEvent {
            kind: EventKind::Birth,
            time: interpolate(series, i, eps),
            resolved: false,
            bracket: (series.times[i - 1], series.times[i]),
        }),
    })
}

/// A death followed by a later birth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revival {
    pub death: EsdEvent,
    pub birth: EsdEvent,
    /// Largest concurrence after the birth.
    pub peak_after: f64,
}

pub fn detect_revival(series: &EntanglementSeries, eps: f64) -> Result<Option<Revival>> {
    let Some(death) = detect_death(series, eps, Refine::No)? else {
        return Ok(None);
    };
    let start = series.times.partition_point(|&t| t < death.bracket.1);
    let tail = series.tail_from(start);
    let Some(birth) = detect_birth(&tail, eps)?.event() else {
        return Ok(None);
    };
    let from = series.times.partition_point(|&t| t < birth.bracket.1);
    let peak_after = series.values[from..].iter().copied().fold(0.0, f64::max);
    Ok(Some(Revival {
        death,
        birth,
        peak_after,
    }))
}

/// Narrows an event bracket by bisection, propagating exactly from the
/// sample preceding the crossing.
pub fn refine_event(
    event: &EsdEvent,
    traj: &Trajectory,
    params: &DimerParams,
    eps: f64,
) -> Result<EsdEvent> {
    check_eps(eps)?;
    let (t0, t1) = event.bracket;
    let start =
        traj.times.iter().position(|&t| t == t0).ok_or_else(|| {
            Error::param("event", "bracket start is not a trajectory sample time")
        })?;
    let rho0 = &traj.states[start];
    let target = REFINE_RESOLUTION / params.reference_rate()?;
    // Death: "inside" means still above eps. Birth: still at or below eps.
    let before = |c: f64| match event.kind {
        EventKind::Death => c > eps,
        EventKind::Birth => c <= eps,
    };
    let (mut lo, mut hi) = (t0, t1);
    for _ in 0..200 {
        if hi - lo <= target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let c = concurrence(&propagate_expm(rho0, params, mid - t0)?)?;
        if before(c) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EsdEvent {
        kind: event.kind,
        time: 0.5 * (lo + hi),
        resolved: hi - lo <= target,
        bracket: (lo, hi),
    })
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is outside [0, 1]")))
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::param("gamma", format!("{gamma} must be positive")))
    }
}

/// Closed-form death time of the X-state family
/// (a/3, 1/3, 1/3, (1−a)/3; z = 1/3) decaying without coupling or drive.
/// None for a ≥ 2/3, where the decay is asymptotic.
pub fn esd_time_family_a(a: f64, gamma: f64) -> Result<Option<f64>> {
    check_unit("a", a)?;
    check_rate(gamma)?;
    if a >= 2.0 / 3.0 {
        return Ok(None);
    }
    let arg = (1.0 - a) / (2.0 - 3.0 * a) * (2.0 - a + (a * a - a + 2.0).sqrt());
    Ok(Some(arg.ln() / gamma))
}

/// Closed-form death time of √α|00⟩ + √(1−α)|11⟩ decaying without coupling
/// or drive. None for α ≥ 1/2.
pub fn esd_time_alpha(alpha: f64, gamma: f64) -> Result<Option<f64>> {
    check_unit("alpha", alpha)?;
    check_rate(gamma)?;
    if alpha >= 0.5 {
        return Ok(None);
    }
    let beta = 1.0 - alpha;
    let arg = beta / (beta - (alpha * beta).sqrt());
    Ok(Some(arg.abs().ln() / gamma))
}

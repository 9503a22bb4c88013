//! Rotating-frame Hamiltonian, Lindblad dissipator and the Liouvillian
//! superoperator of the driven dimer.
//!
//! In the frame rotating at the laser frequency (rotating-wave
//! approximation) the Hamiltonian is time independent:
//!
//! ```text
//! H/ħ = δ1·n1 + δ2·n2 + Δe·|11⟩⟨11| + V12·(σ+¹σ−² + σ−¹σ+²)
//!       + ℓ1·(σ+¹ + σ−¹) + ℓ2·(σ+² + σ−²)
//! ```
//!
//! with δ1 = (Δ+ + Δ−)/2 and δ2 = (Δ+ − Δ−)/2, so the excited state of
//! qubit i sits at +δi. The two-photon resonance E(|11⟩) = Δ+ + Δe = 0 then
//! falls at Δ+/2 = −Δe/2.

use crate::error::Result;
use crate::linalg::{sandwich, unvec4, vec4, Op4, Super16, C64, I, ONE};
use crate::model::{DensityMatrix, DimerParams};

/// Ladder operators of both qubits in the two-qubit basis.
pub struct Ladder {
    pub raise1: Op4,
    pub lower1: Op4,
    pub raise2: Op4,
    pub lower2: Op4,
}

impl Ladder {
    pub fn new() -> Self {
        let mut raise1 = Op4::zeros();
        let mut raise2 = Op4::zeros();
        for other in 0..2 {
            // |0,q2⟩ → |1,q2⟩ and |q1,0⟩ → |q1,1⟩
            raise1[(2 + other, other)] = ONE;
            raise2[(2 * other + 1, 2 * other)] = ONE;
        }
        Self {
            lower1: raise1.adjoint(),
            lower2: raise2.adjoint(),
            raise1,
            raise2,
        }
    }
}

impl Default for Ladder {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(Op4);

impl Hamiltonian {
    pub fn matrix(&self) -> &Op4 {
        &self.0
    }
}

pub fn build_hamiltonian(params: &DimerParams) -> Result<Hamiltonian> {
    params.validate()?;
    let s = Ladder::new();
    let re = |x: f64| C64::new(x, 0.0);
    let n1 = s.raise1 * s.lower1;
    let n2 = s.raise2 * s.lower2;
    let both = n1 * n2;
    let h = n1 * re(params.delta1())
        + n2 * re(params.delta2())
        + both * re(params.delta_e)
        + (s.raise1 * s.lower2 + s.lower1 * s.raise2) * re(params.v12)
        + (s.raise1 + s.lower1) * re(params.ell1)
        + (s.raise2 + s.lower2) * re(params.ell2);
    Ok(Hamiltonian(h))
}

/// One term −(Γ/2)(ρA + Aρ − 2·JρK) of the dissipator.
struct DecayTerm {
    rate: f64,
    anti: Op4,
    left: Op4,
    right: Op4,
}

fn decay_terms(params: &DimerParams) -> [DecayTerm; 4] {
    let s = Ladder::new();
    let term = |rate, raise_a: &Op4, lower_b: &Op4, left: &Op4, right: &Op4| DecayTerm {
        rate,
        anti: raise_a * lower_b,
        left: *left,
        right: *right,
    };
    [
        term(params.gamma1, &s.raise1, &s.lower1, &s.lower1, &s.raise1),
        term(params.gamma2, &s.raise2, &s.lower2, &s.lower2, &s.raise2),
        // Γ12: anticommutator σ+¹σ−², jump σ−¹ ρ σ+²
        term(params.gamma12, &s.raise1, &s.lower2, &s.lower1, &s.raise2),
        // Γ21 = Γ12 (real): anticommutator σ+²σ−¹, jump σ−² ρ σ+¹
        term(params.gamma12, &s.raise2, &s.lower1, &s.lower2, &s.raise1),
    ]
}

/// The dissipative part L(ρ) of the master equation.
pub fn lindblad_dissipator(rho: &DensityMatrix, params: &DimerParams) -> Result<Op4> {
    params.validate()?;
    Ok(dissipate(rho.matrix(), params))
}

fn dissipate(rho: &Op4, params: &DimerParams) -> Op4 {
    let mut out = Op4::zeros();
    for t in decay_terms(params) {
        if t.rate == 0.0 {
            continue;
        }
        let inner = rho * t.anti + t.anti * rho - t.left * rho * t.right * C64::new(2.0, 0.0);
        out -= inner * C64::new(0.5 * t.rate, 0.0);
    }
    out
}

/// Direct evaluation of dρ/dt = −i[H, ρ] + L(ρ) on an arbitrary matrix.
pub fn generator_action(rho: &Op4, params: &DimerParams) -> Result<Op4> {
    let h = build_hamiltonian(params)?;
    let hm = h.matrix();
    Ok((hm * rho - rho * hm) * (-I) + dissipate(rho, params))
}

/// The master-equation generator as a 16×16 matrix acting on column-stacked
/// density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian(Super16);

impl Liouvillian {
    pub fn matrix(&self) -> &Super16 {
        &self.0
    }

    pub fn apply(&self, rho: &Op4) -> Op4 {
        unvec4(&(self.0 * vec4(rho)))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..16)
            .map(|i| self.0.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn build_liouvillian(params: &DimerParams) -> Result<Liouvillian> {
    let h = build_hamiltonian(params)?;
    let id = Op4::identity();
    let mut l = (sandwich(h.matrix(), &id) - sandwich(&id, h.matrix())) * (-I);
    for t in decay_terms(params) {
        if t.rate == 0.0 {
            continue;
        }
        let inner = sandwich(&id, &t.anti) + sandwich(&t.anti, &id)
            - sandwich(&t.left, &t.right) * C64::new(2.0, 0.0);
        l -= inner * C64::new(0.5 * t.rate, 0.0);
    }
    Ok(Liouvillian(l))
}

/// Total excitation number of each basis state.
pub const EXCITATIONS: [usize; 4] = [0, 1, 1, 2];

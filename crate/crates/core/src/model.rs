//! Physical parameters, density matrices and initial-state constructors.
//!
//! Basis ordering is {|00⟩, |01⟩, |10⟩, |11⟩} with qubit 1 as the left
//! tensor factor, so index 1 is "qubit 2 excited" and index 2 is "qubit 1
//! excited".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, hermiticity_defect, Op4, C64, ZERO};
use crate::units::{to_angular, Quoted};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_SLACK: f64 = 1e-9;

/// Index of |ij⟩ in the computational basis.
pub const fn basis_index(q1: usize, q2: usize) -> usize {
    2 * q1 + q2
}

/// Dimer parameters, all in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerParams {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Collective decay rate, real.
    pub gamma12: f64,
    pub v12: f64,
    /// ν1 − ν2.
    pub delta_minus: f64,
    /// Full sum detuning (ν1 + ν2) − 2νL.
    pub delta_plus: f64,
    /// Shift of the doubly excited state |11⟩.
    pub delta_e: f64,
    pub ell1: f64,
    pub ell2: f64,
}

impl Default for DimerParams {
    fn default() -> Self {
        Self {
            gamma1: 0.0,
            gamma2: 0.0,
            gamma12: 0.0,
            v12: 0.0,
            delta_minus: 0.0,
            delta_plus: 0.0,
            delta_e: 0.0,
            ell1: 0.0,
            ell2: 0.0,
        }
    }
}

impl DimerParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma12", self.gamma12),
            ("v12", self.v12),
            ("delta_minus", self.delta_minus),
            ("delta_plus", self.delta_plus),
            ("delta_e", self.delta_e),
            ("ell1", self.ell1),
            ("ell2", self.ell2),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::param(name, format!("{value} is not finite")));
            }
        }
        if self.gamma1 < 0.0 {
            return Err(Error::param("gamma1", "decay rate must be non-negative"));
        }
        if self.gamma2 < 0.0 {
            return Err(Error::param("gamma2", "decay rate must be non-negative"));
        }
        let bound = (self.gamma1 * self.gamma2).sqrt();
        if self.gamma12.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::param(
                "gamma12",
                format!(
                    "|gamma12| = {} exceeds sqrt(gamma1*gamma2) = {bound}",
                    self.gamma12.abs()
                ),
            ));
        }
        Ok(())
    }

    /// Detuning of qubit 1 from the laser, (Δ+ + Δ−)/2.
    pub fn delta1(&self) -> f64 {
        0.5 * (self.delta_plus + self.delta_minus)
    }

    /// Detuning of qubit 2 from the laser, (Δ+ − Δ−)/2.
    pub fn delta2(&self) -> f64 {
        0.5 * (self.delta_plus - self.delta_minus)
    }

    /// The decay rate that sets the natural time unit 1/Γ (mean of the two
    /// individual rates).
    pub fn reference_rate(&self) -> Result<f64> {
        let g = 0.5 * (self.gamma1 + self.gamma2);
        if g > 0.0 {
            Ok(g)
        } else {
            Err(Error::param(
                "gamma1",
                "both decay rates are zero; 1/Γ is undefined",
            ))
        }
    }

    /// The same physical system with the qubit labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            delta_minus: -self.delta_minus,
            ell1: self.ell2,
            ell2: self.ell1,
            ..*self
        }
    }

    pub fn is_undriven(&self) -> bool {
        self.ell1 == 0.0 && self.ell2 == 0.0
    }
}

/// Dimer parameters as quoted in the laboratory convention: couplings and
/// detunings as ordinary frequencies in MHz, rates as their value over 2π.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuotedParams {
    pub gamma1_mhz_over_2pi: f64,
    pub gamma2_mhz_over_2pi: f64,
    pub gamma12_mhz_over_2pi: f64,
    pub v12_mhz: f64,
    pub delta_minus_mhz: f64,
    pub delta_plus_mhz: f64,
    pub delta_e_mhz: f64,
    pub ell1_mhz: f64,
    pub ell2_mhz: f64,
}

impl QuotedParams {
    pub fn to_params(&self) -> Result<DimerParams> {
        let f = |v| to_angular(v, Quoted::Frequency);
        let r = |v| to_angular(v, Quoted::RateOver2Pi);
        let p = DimerParams {
            gamma1: r(self.gamma1_mhz_over_2pi)?,
            gamma2: r(self.gamma2_mhz_over_2pi)?,
            gamma12: r(self.gamma12_mhz_over_2pi)?,
            v12: f(self.v12_mhz)?,
            delta_minus: f(self.delta_minus_mhz)?,
            delta_plus: f(self.delta_plus_mhz)?,
            delta_e: f(self.delta_e_mhz)?,
            ell1: f(self.ell1_mhz)?,
            ell2: f(self.ell2_mhz)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_params(p: &DimerParams) -> Self {
        use crate::units::from_angular;
        let f = |v| from_angular(v, Quoted::Frequency);
        let r = |v| from_angular(v, Quoted::RateOver2Pi);
        Self {
            gamma1_mhz_over_2pi: r(p.gamma1),
            gamma2_mhz_over_2pi: r(p.gamma2),
            gamma12_mhz_over_2pi: r(p.gamma12),
            v12_mhz: f(p.v12),
            delta_minus_mhz: f(p.delta_minus),
            delta_plus_mhz: f(p.delta_plus),
            delta_e_mhz: f(p.delta_e),
            ell1_mhz: f(p.ell1),
            ell2_mhz: f(p.ell2),
        }
    }
}

/// A two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Op4,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (with slack).
    pub fn new(m: Op4) -> Result<Self> {
        let rho = Self { m };
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a matrix without validation. Used for integrator output, whose
    /// invariants are verified separately rather than enforced.
    pub fn new_unchecked(m: Op4) -> Self {
        Self { m }
    }

    pub fn check(&self) -> Result<()> {
        let herm = hermiticity_defect(&self.m);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |rho - rho^dagger| = {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_SLACK {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (minimum eigenvalue {min:e})"
            )));
        }
        Ok(())
    }

    /// Outer product |ψ⟩⟨ψ| of a normalised state vector.
    pub fn from_pure(psi: [C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "state vector has norm² {norm}"
            )));
        }
        Ok(Self {
            m: Op4::from_fn(|i, j| psi[i] * psi[j].conj()),
        })
    }

    /// |ij⟩⟨ij|.
    pub fn basis(q1: usize, q2: usize) -> Self {
        let k = basis_index(q1, q2);
        let mut m = Op4::zeros();
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { m }
    }

    pub fn ground() -> Self {
        Self::basis(0, 0)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Op4::identity() * C64::new(0.25, 0.0),
        }
    }

    pub fn matrix(&self) -> &Op4 {
        &self.m
    }

    pub fn into_matrix(self) -> Op4 {
        self.m
    }

    /// ρ_{ij,kl} with ij, kl given as basis indices.
    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn population(&self, k: usize) -> f64 {
        self.m[(k, k)].re
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.m)?.values[0])
    }

    /// Exchange of the two qubit labels.
    pub fn swapped(&self) -> Self {
        const P: [usize; 4] = [0, 2, 1, 3];
        Self {
            m: Op4::from_fn(|i, j| self.m[(P[i], P[j])]),
        }
    }
}

/// Populations and coherences of an X-shaped density matrix: `w` couples
/// |00⟩ and |11⟩, `z` couples |01⟩ and |10⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub w: C64,
    pub z: C64,
}

impl XStateSpec {
    pub fn validate(&self) -> Result<()> {
        let pops = [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)];
        for (name, p) in pops {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidState(format!(
                    "X-state population {name} = {p} must be finite and non-negative"
                )));
            }
        }
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "X-state populations a+b+c+d sum to {sum}, expected 1"
            )));
        }
        if self.w.norm_sqr() > self.a * self.d + 1e-15 {
            return Err(Error::InvalidState(format!(
                "X-state positivity |w|^2 <= a*d violated ({} > {})",
                self.w.norm_sqr(),
                self.a * self.d
            )));
        }
        if self.z.norm_sqr() > self.b * self.c + 1e-15 {
            return Err(Error::InvalidState(format!(
                "X-state positivity |z|^2 <= b*c violated ({} > {})",
                self.z.norm_sqr(),
                self.b * self.c
            )));
        }
        Ok(())
    }
}

fn unit_interval(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} is outside [0, 1]")))
    }
}

fn finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} is not finite")))
    }
}

/// √α|01⟩ + e^{iφ}√(1−α)|10⟩.
pub fn psi_alpha(alpha: f64, phi: f64) -> Result<DensityMatrix> {
    unit_interval("alpha", alpha)?;
    finite("phi", phi)?;
    let mut psi = [ZERO; 4];
    psi[basis_index(0, 1)] = C64::new(alpha.sqrt(), 0.0);
    psi[basis_index(1, 0)] = C64::from_polar((1.0 - alpha).sqrt(), phi);
    DensityMatrix::from_pure(psi)
}

/// √α|00⟩ + e^{iφ}√(1−α)|11⟩.
pub fn psi_zero_one(alpha: f64, phi: f64) -> Result<DensityMatrix> {
    unit_interval("alpha", alpha)?;
    finite("phi", phi)?;
    let mut psi = [ZERO; 4];
    psi[basis_index(0, 0)] = C64::new(alpha.sqrt(), 0.0);
    psi[basis_index(1, 1)] = C64::from_polar((1.0 - alpha).sqrt(), phi);
    DensityMatrix::from_pure(psi)
}

/// (√γ|0⟩ + e^{iφ1}√(1−γ)|1⟩) ⊗ (√ζ|0⟩ + e^{iφ2}√(1−ζ)|1⟩).
pub fn product_state(gamma: f64, zeta: f64, phase1: f64, phase2: f64) -> Result<DensityMatrix> {
    unit_interval("gamma", gamma)?;
    unit_interval("zeta", zeta)?;
    finite("phase1", phase1)?;
    finite("phase2", phase2)?;
    let q1 = [
        C64::new(gamma.sqrt(), 0.0),
        C64::from_polar((1.0 - gamma).sqrt(), phase1),
    ];
    let q2 = [
        C64::new(zeta.sqrt(), 0.0),
        C64::from_polar((1.0 - zeta).sqrt(), phase2),
    ];
    let mut psi = [ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            psi[basis_index(i, j)] = q1[i] * q2[j];
        }
    }
    DensityMatrix::from_pure(psi)
}

pub fn x_state(spec: &XStateSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let mut m = Op4::zeros();
    m[(0, 0)] = C64::new(spec.a, 0.0);
    m[(1, 1)] = C64::new(spec.b, 0.0);
    m[(2, 2)] = C64::new(spec.c, 0.0);
    m[(3, 3)] = C64::new(spec.d, 0.0);
    m[(0, 3)] = spec.w;
    m[(3, 0)] = spec.w.conj();
    m[(1, 2)] = spec.z;
    m[(2, 1)] = spec.z.conj();
    DensityMatrix::new(m)
}

/// The one-parameter X-state family with populations (a/3, 1/3, 1/3,
/// (1−a)/3), w = 0 and z = 1/3.
pub fn family_a_spec(a: f64) -> Result<XStateSpec> {
    unit_interval("a", a)?;
    Ok(XStateSpec {
        a: a / 3.0,
        b: 1.0 / 3.0,
        c: 1.0 / 3.0,
        d: (1.0 - a) / 3.0,
        w: ZERO,
        z: C64::new(1.0 / 3.0, 0.0),
    })
}

pub fn family_a(a: f64) -> Result<DensityMatrix> {
    x_state(&family_a_spec(a)?)
}

/// p|ψ+⟩⟨ψ+| + (1−p)·I/4.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    unit_interval("p", p)?;
    let bell = psi_alpha(0.5, 0.0)?.into_matrix();
    let m = bell * C64::new(p, 0.0) + Op4::identity() * C64::new((1.0 - p) / 4.0, 0.0);
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use proptest::prelude::*;

    fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        max_abs(&(a.matrix() - b.matrix())) <= tol
    }

    #[test]
    fn psi_alpha_examples() {
        let bell = psi_alpha(0.5, 0.0).unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((bell.element(i, j).re - 0.5).abs() < 1e-15);
        }
        assert!(close(
            &psi_alpha(1.0, 0.7).unwrap(),
            &DensityMatrix::basis(0, 1),
            0.0
        ));
        let rho = psi_alpha(0.25, 0.0).unwrap();
        assert!((rho.element(1, 2).re - (0.25f64 * 0.75).sqrt()).abs() < 1e-15);
        assert!((rho.element(1, 2).re - 0.4330).abs() < 1e-4);
    }

    #[test]
    fn psi_zero_one_examples() {
        assert!(close(
            &psi_zero_one(0.0, 0.0).unwrap(),
            &DensityMatrix::basis(1, 1),
            0.0
        ));
        let rho = psi_zero_one(0.25, 0.0).unwrap();
        assert!((rho.element(0, 3).re - 0.4330127).abs() < 1e-7);
    }

    #[test]
    fn phase_enters_coherence() {
        let rho = psi_alpha(0.5, 1.0).unwrap();
        // ρ_{01,10} = √α √β e^{-iφ}
        let want = C64::from_polar(0.5, -1.0);
        assert!((rho.element(1, 2) - want).norm() < 1e-15);
    }

    #[test]
    fn product_state_examples() {
        assert!(close(
            &product_state(1.0, 1.0, 0.0, 0.0).unwrap(),
            &DensityMatrix::ground(),
            0.0
        ));
        let esb = product_state(0.0, 0.3, 0.0, 0.0).unwrap();
        // |1⟩ ⊗ (√0.3|0⟩ + √0.7|1⟩)
        assert!((esb.population(2) - 0.3).abs() < 1e-15);
        assert!((esb.population(3) - 0.7).abs() < 1e-15);
        assert_eq!(esb.population(0) + esb.population(1), 0.0);
        let even = product_state(0.5, 0.5, 0.0, 0.0).unwrap();
        assert!(even
            .matrix()
            .iter()
            .all(|z| (z.norm() - 0.25).abs() < 1e-15));
    }

    #[test]
    fn x_state_examples() {
        let bell = XStateSpec {
            a: 0.0,
            b: 0.5,
            c: 0.5,
            d: 0.0,
            w: ZERO,
            z: C64::new(0.5, 0.0),
        };
        assert!(close(
            &x_state(&bell).unwrap(),
            &psi_alpha(0.5, 0.0).unwrap(),
            1e-15
        ));
        let g = XStateSpec {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            w: ZERO,
            z: ZERO,
        };
        assert!(close(&x_state(&g).unwrap(), &DensityMatrix::ground(), 0.0));
    }

    #[test]
    fn x_state_rejects_named_violations() {
        let bad_sum = XStateSpec {
            a: 0.5,
            b: 0.5,
            c: 0.5,
            d: 0.0,
            w: ZERO,
            z: ZERO,
        };
        assert!(x_state(&bad_sum).unwrap_err().to_string().contains("sum"));
        let bad_w = XStateSpec {
            a: 0.5,
            b: 0.0,
            c: 0.0,
            d: 0.5,
            w: C64::new(0.6, 0.0),
            z: ZERO,
        };
        assert!(x_state(&bad_w).unwrap_err().to_string().contains("|w|^2"));
        let bad_z = XStateSpec {
            a: 0.0,
            b: 0.5,
            c: 0.5,
            d: 0.0,
            w: ZERO,
            z: C64::new(0.0, 0.6),
        };
        assert!(x_state(&bad_z).unwrap_err().to_string().contains("|z|^2"));
        let negative = XStateSpec {
            a: -0.1,
            b: 0.6,
            c: 0.5,
            d: 0.0,
            w: ZERO,
            z: ZERO,
        };
        assert!(x_state(&negative).is_err());
    }

    #[test]
    fn family_a_at_zero() {
        let rho = family_a(0.0).unwrap();
        assert_eq!(rho.population(0), 0.0);
        for k in 1..4 {
            assert!((rho.population(k) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((rho.element(1, 2).re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn werner_limits() {
        assert!(close(
            &werner_state(1.0).unwrap(),
            &psi_alpha(0.5, 0.0).unwrap(),
            1e-15
        ));
        assert!(close(
            &werner_state(0.0).unwrap(),
            &DensityMatrix::maximally_mixed(),
            1e-15
        ));
    }

    #[test]
    fn constructors_reject_out_of_range() {
        assert!(psi_alpha(-0.1, 0.0).is_err());
        assert!(psi_alpha(1.1, 0.0).is_err());
        assert!(psi_zero_one(2.0, 0.0).is_err());
        assert!(product_state(0.5, 1.5, 0.0, 0.0).is_err());
        assert!(product_state(-0.5, 0.5, 0.0, 0.0).is_err());
        assert!(werner_state(1.01).is_err());
        assert!(family_a(1.2).is_err());
        assert!(psi_alpha(0.5, f64::NAN).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = Op4::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err(), "non-Hermitian accepted");
        let m = Op4::identity() * C64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m).is_err(), "trace 1.2 accepted");
        let mut m = Op4::zeros();
        m[(0, 0)] = C64::new(1.2, 0.0);
        m[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(
            DensityMatrix::new(m).is_err(),
            "negative eigenvalue accepted"
        );
    }

    #[test]
    fn params_validation() {
        let mut p = DimerParams {
            gamma1: 1.0,
            gamma2: 4.0,
            gamma12: 2.0,
            ..Default::default()
        };
        assert!(p.validate().is_ok());
        p.gamma12 = -2.0;
        assert!(p.validate().is_ok());
        p.gamma12 = 2.1;
        assert!(p.validate().is_err());
        p.gamma12 = 0.0;
        p.gamma1 = -1.0;
        assert!(p.validate().is_err());
        p.gamma1 = 1.0;
        p.v12 = f64::INFINITY;
        assert!(p.validate().is_err());
    }

    #[test]
    fn detunings_split() {
        let p = DimerParams {
            delta_plus: 10.0,
            delta_minus: 4.0,
            ..Default::default()
        };
        assert_eq!(p.delta1(), 7.0);
        assert_eq!(p.delta2(), 3.0);
    }

    #[test]
    fn quoted_round_trip() {
        let q = QuotedParams {
            gamma1_mhz_over_2pi: 50.0,
            gamma2_mhz_over_2pi: 50.0,
            gamma12_mhz_over_2pi: 9.0,
            v12_mhz: 950.0,
            delta_minus_mhz: 2320.0,
            delta_plus_mhz: 0.0,
            delta_e_mhz: -160.0,
            ell1_mhz: 200.0,
            ell2_mhz: 200.0,
        };
        let p = q.to_params().unwrap();
        let back = QuotedParams::from_params(&p);
        assert!((back.v12_mhz - 950.0).abs() < 1e-10);
        assert!((back.gamma12_mhz_over_2pi - 9.0).abs() < 1e-12);
    }

    fn check_all(rho: &DensityMatrix) -> std::result::Result<(), TestCaseError> {
        prop_assert!(rho.check().is_ok(), "{:?}", rho.check());
        Ok(())
    }

    proptest! {
        #[test]
        fn constructors_produce_valid_states(
            x in 0.0f64..=1.0, y in 0.0f64..=1.0,
            p1 in -7.0f64..7.0, p2 in -7.0f64..7.0,
        ) {
            check_all(&psi_alpha(x, p1).unwrap())?;
            check_all(&psi_zero_one(x, p1).unwrap())?;
            check_all(&product_state(x, y, p1, p2).unwrap())?;
            check_all(&werner_state(x).unwrap())?;
            check_all(&family_a(x).unwrap())?;
        }

        #[test]
        fn psi_alpha_is_pure(x in 0.0f64..=1.0, phi in -7.0f64..7.0) {
            let rho = psi_alpha(x, phi).unwrap();
            prop_assert!((rho.purity() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn swap_is_involution(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            let rho = product_state(x, y, 0.3, -0.2).unwrap();
            prop_assert_eq!(rho.swapped().swapped(), rho);
            let swapped = product_state(y, x, -0.2, 0.3).unwrap();
            prop_assert!(close(&rho.swapped(), &swapped, 1e-15));
        }
    }
}

//! Dipole–dipole coupling V12 and collective decay Γ12 from the dipole
//! orientations and the scaled separation z = n·k0·r12.
//!
//! Outputs are in the same angular units as the input rates. The retarded
//! kernels are normalised so that both channels reduce exactly to their
//! near-field forms as z → 0:
//!
//! ```text
//! V12  → (3/4)·√(Γ1Γ2)·[μ̂1·μ̂2 − 3(μ̂1·r̂)(μ̂2·r̂)] / z³
//! Γ12  → √(Γ1Γ2)·μ̂1·μ̂2
//! ```
//!
//! (3/4)·√(Γ1Γ2)/z³ in rad/µs is 3√(Γ1Γ2)/(8πz³) expressed as an ordinary
//! frequency.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleGeometry {
    pub mu1_hat: Vector3<f64>,
    pub mu2_hat: Vector3<f64>,
    pub r12_hat: Vector3<f64>,
    /// Scaled separation n·k0·r12.
    pub z: f64,
}

/// Coupling strengths in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub v12: f64,
    pub gamma12: f64,
}

impl DipoleGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu1_hat", self.mu1_hat),
            ("mu2_hat", self.mu2_hat),
            ("r12_hat", self.r12_hat),
        ] {
            let n = v.norm();
            if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidGeometry(format!(
                    "{name} has norm {n}, expected 1"
                )));
            }
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "scaled separation z = {} must be positive",
                self.z
            )));
        }
        Ok(())
    }

    /// (μ̂1·μ̂2 − (μ̂1·r̂)(μ̂2·r̂), μ̂1·μ̂2 − 3(μ̂1·r̂)(μ̂2·r̂)).
    fn brackets(&self) -> (f64, f64) {
        let dd = self.mu1_hat.dot(&self.mu2_hat);
        let rr = self.mu1_hat.dot(&self.r12_hat) * self.mu2_hat.dot(&self.r12_hat);
        (dd - rr, dd - 3.0 * rr)
    }
}

fn rate_scale(gamma1: f64, gamma2: f64) -> Result<f64> {
    if !(gamma1 >= 0.0 && gamma2 >= 0.0 && gamma1.is_finite() && gamma2.is_finite()) {
        return Err(Error::param(
            "gamma",
            "decay rates must be finite and non-negative",
        ));
    }
    Ok((gamma1 * gamma2).sqrt())
}

pub fn coupling_near_field(geom: &DipoleGeometry, gamma1: f64, gamma2: f64) -> Result<Coupling> {
    geom.validate()?;
    let g = rate_scale(gamma1, gamma2)?;
    let (_, q) = geom.brackets();
    Ok(Coupling {
        v12: 0.75 * g * q / geom.z.powi(3),
        gamma12: g * geom.mu1_hat.dot(&geom.mu2_hat),
    })
}

pub fn coupling_general(geom: &DipoleGeometry, gamma1: f64, gamma2: f64) -> Result<Coupling> {
    geom.validate()?;
    let g = rate_scale(gamma1, gamma2)?;
    let (p, q) = geom.brackets();
    let z = geom.z;
    let (s, c) = z.sin_cos();
    let v_kernel = -p * c / z + q * (c / z.powi(3) + s / (z * z));
    let g_kernel = p * s / z + q * (c / (z * z) - s / z.powi(3));
    Ok(Coupling {
        v12: 0.75 * g * v_kernel,
        gamma12: 1.5 * g * g_kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn geom(mu1: [f64; 3], mu2: [f64; 3], r: [f64; 3], z: f64) -> DipoleGeometry {
        DipoleGeometry {
            mu1_hat: Vector3::from(mu1).normalize(),
            mu2_hat: Vector3::from(mu2).normalize(),
            r12_hat: Vector3::from(r).normalize(),
            z,
        }
    }

    const X: [f64; 3] = [1.0, 0.0, 0.0];
    const Y: [f64; 3] = [0.0, 1.0, 0.0];
    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn near_field_parallel_perpendicular() {
        let g = 314.0;
        let c = coupling_near_field(&geom(Z, Z, X, 0.1), g, g).unwrap();
        // brackets are (1, 1); V12 = (3/4)Γ/z³
        assert!((c.v12 - 0.75 * g / 1e-3).abs() < 1e-9 * c.v12);
        assert_eq!(c.gamma12, g);
        assert!(c.v12 > 0.0);
    }

    #[test]
    fn near_field_orthogonal_dipoles_decouple() {
        let c = coupling_near_field(&geom(Y, Z, X, 0.3), 2.0, 5.0).unwrap();
        assert_eq!((c.v12, c.gamma12), (0.0, 0.0));
    }

    #[test]
    fn near_field_head_to_tail() {
        let (g1, g2, z) = (2.0, 8.0, 0.2);
        let c = coupling_near_field(&geom(X, X, X, z), g1, g2).unwrap();
        let want = -2.0 * 0.75 * 4.0 / z.powi(3);
        assert!((c.v12 - want).abs() < 1e-12 * want.abs());
        assert!((c.gamma12 - 4.0).abs() < 1e-15);
    }

    #[test]
    fn general_small_z_limit() {
        let g = 100.0;
        let c = coupling_general(&geom(Z, Z, X, 1e-3), g, g).unwrap();
        assert!((c.gamma12 - g).abs() < 1e-5 * g);
    }

    #[test]
    fn general_orthogonal_vanishes() {
        for z in [0.01, 0.5, 3.0, 20.0] {
            let c = coupling_general(&geom(Y, Z, X, z), 1.0, 1.0).unwrap();
            assert!(c.v12.abs() < 1e-15 && c.gamma12.abs() < 1e-15);
        }
    }

    #[test]
    fn general_at_pi() {
        let g = 1.0;
        let c = coupling_general(&geom(Z, Z, X, PI), g, g).unwrap();
        // sin π = 0, cos π = −1 (up to rounding in sin π)
        let want_gamma = 1.5 * (-1.0 / (PI * PI));
        let want_v = 0.75 * (1.0 / PI - 1.0 / PI.powi(3));
        assert!((c.gamma12 - want_gamma).abs() < 1e-14);
        assert!((c.v12 - want_v).abs() < 1e-14);
    }

    #[test]
    fn near_field_consistency_on_grid() {
        let g = 50.0;
        for k in 1..=100 {
            let z = 1e-4 * k as f64;
            let geo = geom(Z, Z, X, z);
            let near = coupling_near_field(&geo, g, g).unwrap();
            let gen = coupling_general(&geo, g, g).unwrap();
            let rel = (gen.v12 - near.v12).abs() / near.v12.abs();
            assert!(rel <= 10.0 * z * z, "z = {z}: rel = {rel}");
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(coupling_near_field(&geom(Z, Z, X, 0.0), 1.0, 1.0).is_err());
        assert!(coupling_general(&geom(Z, Z, X, -1.0), 1.0, 1.0).is_err());
        let mut g = geom(Z, Z, X, 1.0);
        g.mu1_hat *= 1.1;
        assert!(matches!(
            coupling_general(&g, 1.0, 1.0),
            Err(Error::InvalidGeometry(_))
        ));
    }

    fn unit() -> impl Strategy<Value = Vector3<f64>> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("non-degenerate", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| Vector3::new(a, b, c).normalize())
    }

    proptest! {
        #[test]
        fn swap_symmetry(m1 in unit(), m2 in unit(), r in unit(), z in 0.01f64..10.0,
                         g1 in 0.1f64..100.0, g2 in 0.1f64..100.0) {
            let a = DipoleGeometry { mu1_hat: m1, mu2_hat: m2, r12_hat: r, z };
            let b = DipoleGeometry { mu1_hat: m2, mu2_hat: m1, r12_hat: r, z };
            for f in [coupling_general, coupling_near_field] {
                let x = f(&a, g1, g2).unwrap();
                let y = f(&b, g2, g1).unwrap();
                prop_assert!((x.v12 - y.v12).abs() <= 1e-12 * x.v12.abs().max(1.0));
                prop_assert!((x.gamma12 - y.gamma12).abs() <= 1e-12 * x.gamma12.abs().max(1.0));
            }
        }

        #[test]
        fn rate_scaling(m1 in unit(), m2 in unit(), r in unit(), z in 0.01f64..10.0, g in 0.1f64..100.0) {
            let geo = DipoleGeometry { mu1_hat: m1, mu2_hat: m2, r12_hat: r, z };
            let x = coupling_general(&geo, g, g).unwrap();
            let y = coupling_general(&geo, 2.0 * g, 2.0 * g).unwrap();
            prop_assert!((y.v12 - 2.0 * x.v12).abs() <= 1e-12 * x.v12.abs().max(1e-300) * 4.0 + 1e-300);
            prop_assert!((y.gamma12 - 2.0 * x.gamma12).abs() <= 1e-12 * x.gamma12.abs() * 4.0 + 1e-300);
        }

        #[test]
        fn collective_rate_bounded(m1 in unit(), m2 in unit(), z in 1e-3f64..1e-2, g1 in 0.1f64..10.0, g2 in 0.1f64..10.0) {
            // In the near field Γ12 obeys the Cauchy–Schwarz bound of DimerParams.
            let geo = DipoleGeometry { mu1_hat: m1, mu2_hat: m2, r12_hat: Vector3::x(), z };
            let c = coupling_near_field(&geo, g1, g2).unwrap();
            prop_assert!(c.gamma12.abs() <= (g1 * g2).sqrt() * (1.0 + 1e-12));
        }
    }
}

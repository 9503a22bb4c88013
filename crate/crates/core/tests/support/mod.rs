//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use dimer_core::linalg::{Op4, C64};
use dimer_core::DensityMatrix;
use nalgebra::Matrix2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random mixed state ρ = GG†/tr(GG†) with G a 4×k complex Ginibre matrix.
pub fn random_state(rng: &mut impl Rng, rank: usize) -> DensityMatrix {
    let mut g = Op4::zeros();
    for r in 0..4 {
        for c in 0..rank {
            g[(r, c)] = gaussian(rng);
        }
    }
    let m = g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("Ginibre state is a valid density matrix")
}

/// Haar-random single-qubit unitary via QR of a Ginibre matrix with the
/// phases of R's diagonal folded back into Q.
pub fn random_unitary2(rng: &mut impl Rng) -> Matrix2<C64> {
    let g = Matrix2::from_fn(|_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for c in 0..2 {
        let d = r[(c, c)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..2 {
            u[(row, c)] *= ph;
        }
    }
    u
}

pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Op4 {
    Op4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// σy⊗σy ρ* σy⊗σy written out by hand.
pub fn spin_flip_explicit(rho: &Op4) -> Op4 {
    let sy = Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
    );
    let yy = kron2(&sy, &sy);
    yy * rho.conjugate() * yy
}

/// Coefficients c0..c4 of det(λI − A) = λ⁴ + c3λ³ + ... (c4 = 1), by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly(a: &Op4) -> [C64; 5] {
    let mut c = [C64::new(0.0, 0.0); 5];
    c[4] = C64::new(1.0, 0.0);
    let id = Op4::identity();
    let mut m = Op4::zeros();
    for k in 1..=4 {
        m = a * m + id * c[5 - k];
        let am = a * m;
        c[4 - k] = -am.trace() / C64::new(k as f64, 0.0);
    }
    c
}

fn horner(c: &[C64; 5], x: C64) -> C64 {
    c.iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &k| acc * x + k)
}

/// All roots of a monic quartic by Durand–Kerner iteration followed by a
/// few Newton polishing steps.
pub fn quartic_roots(c: &[C64; 5]) -> [C64; 4] {
    let scale = c[..4]
        .iter()
        .map(|k| k.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let seed = C64::new(0.4, 0.9);
    let mut z = [C64::new(0.0, 0.0); 4];
    for (k, zk) in z.iter_mut().enumerate() {
        *zk = seed.powu(k as u32) * scale.sqrt().max(1e-3);
    }
    for _ in 0..2000 {
        let mut delta = 0.0_f64;
        for i in 0..4 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = horner(c, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-17 {
            break;
        }
    }
    polish_clusters(c, &mut z);
    z
}

/// k-th derivative of the quartic, as coefficients in ascending order.
fn derivative(c: &[C64; 5], k: usize) -> Vec<C64> {
    (k..5)
        .map(|i| {
            let f: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
            c[i] * f
        })
        .collect()
}

fn eval(c: &[C64], x: C64) -> C64 {
    c.iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &k| acc * x + k)
}

/// Roots of multiplicity m are only located to about ε^{1/m} by the
/// iteration. Nearby roots are grouped and each group's mean is refined as
/// a simple root of the (m−1)-th derivative, then Newton-polished.
fn polish_clusters(c: &[C64; 5], z: &mut [C64; 4]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..4 {
        match groups.last_mut() {
            Some(g) if (z[i] - z[*g.last().unwrap()]).norm() < 1e-4 * z[i].norm().max(1e-3) => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    for g in groups {
        let m = g.len();
        let mut x = g.iter().map(|&i| z[i]).sum::<C64>() / m as f64;
        let p = derivative(c, m - 1);
        let dp = derivative(c, m);
        for _ in 0..6 {
            let d = eval(&dp, x);
            if d.norm() > 1e-300 {
                x -= eval(&p, x) / d;
            }
        }
        for &i in &g {
            z[i] = x;
        }
    }
}

/// Concurrence from the roots of the characteristic polynomial of ρρ̃.
pub fn concurrence_charpoly(rho: &DensityMatrix) -> f64 {
    let r = rho.matrix() * spin_flip_explicit(rho.matrix());
    let roots = quartic_roots(&char_poly(&r));
    let mut lam: Vec<f64> = roots.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0)
}

/// Closed form for X states: 2·max(0, |ρ03| − √(ρ11ρ22), |ρ12| − √(ρ00ρ33)).
pub fn concurrence_x_state(rho: &Op4) -> f64 {
    let p = |k: usize| rho[(k, k)].re.max(0.0);
    let a = rho[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    let b = rho[(1, 2)].norm() - (p(0) * p(3)).sqrt();
    2.0 * a.max(b).max(0.0)
}

pub fn max_diff(a: &Op4, b: &Op4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Operators on the two-qubit Hilbert space.
pub type Op4 = Matrix4<C64>;
/// Superoperators acting on column-stacked 4×4 matrices.
pub type Super16 = SMatrix<C64, 16, 16>;
pub type Vec16 = SVector<C64, 16>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Off-diagonal Frobenius threshold, relative to the matrix norm.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Column-stacking vectorisation: element (i, j) lands at index i + 4j.
pub fn vec4(m: &Op4) -> Vec16 {
    // nalgebra stores column-major, which is exactly column stacking.
    Vec16::from_column_slice(m.as_slice())
}

pub fn unvec4(v: &Vec16) -> Op4 {
    Op4::from_column_slice(v.as_slice())
}

/// Kronecker product of two 4×4 operators.
pub fn kron4(a: &Op4, b: &Op4) -> Super16 {
    let mut out = Super16::zeros();
    for ai in 0..4 {
        for aj in 0..4 {
            let s = a[(ai, aj)];
            if s == ZERO {
                continue;
            }
            for bi in 0..4 {
                for bj in 0..4 {
                    out[(4 * ai + bi, 4 * aj + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Superoperator of ρ ↦ A ρ B under column stacking: (Bᵀ ⊗ A).
pub fn sandwich(a: &Op4, b: &Op4) -> Super16 {
    kron4(&b.transpose(), a)
}

pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest |m − m†| element.
pub fn hermiticity_defect(m: &Op4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues in ascending
/// order and the unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: SMatrix<C64, N, N>,
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot, then applies the
/// real symmetric Jacobi rotation. Sweeps continue until the off-diagonal
/// Frobenius norm drops below `JACOBI_TOL` times the matrix norm.
pub fn eigh<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<HermitianEigen<N>> {
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v = SMatrix::<C64, N, N>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let tol = JACOBI_TOL * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps \
             (off-diagonal norm {:e})",
            off_diagonal_norm(&a)
        )));
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let mut values = [0.0; N];
    let mut vectors = SMatrix::<C64, N, N>::zeros();
    for (k, &idx) in order.iter().enumerate() {
        values[k] = a[(idx, idx)].re;
        vectors.set_column(k, &v.column(idx));
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<const N: usize>(
    a: &mut SMatrix<C64, N, N>,
    v: &mut SMatrix<C64, N, N>,
    p: usize,
    q: usize,
) {
    let apq = a[(p, q)];
    let r = apq.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r == 0.0 || r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Hermitian square root of a positive semidefinite matrix. Negative
/// eigenvalues are treated as zero.
pub fn psd_sqrt<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<SMatrix<C64, N, N>> {
    let eig = eigh(m)?;
    let mut d = SMatrix::<C64, N, N>::zeros();
    for k in 0..N {
        d[(k, k)] = C64::new(eig.values[k].max(0.0).sqrt(), 0.0);
    }
    Ok(eig.vectors * d * eig.vectors.adjoint())
}

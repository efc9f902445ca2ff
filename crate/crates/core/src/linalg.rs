//! Small dense complex linear algebra.
//!
//! Everything in this crate works on matrices of dimension at most a few
//! dozen, so the routines here favour determinism and accuracy over
//! asymptotic speed. The eigensolver is a two-sided complex Jacobi
//! iteration specialized to Hermitian input; it always returns real
//! eigenvalues and orthonormal eigenvectors.

use ndarray::Array2;
use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = Array2<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// Kronecker product; left factor indexes the major (slow) axis.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let aij = a[[ia, ja]];
            for ib in 0..rb {
                for jb in 0..cb {
                    out[[ia * rb + ib, ja * cb + jb]] = aij * b[[ib, jb]];
                }
            }
        }
    }
    out
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diag().sum()
}

/// Largest entry-wise modulus of a - b.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest |a_ij - conj(a_ji)|.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Largest entry of U†U - I.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&dagger(u).dot(u), &identity(n))
}

/// U† A U.
pub fn conjugate_by(a: &CMatrix, u: &CMatrix) -> CMatrix {
    dagger(u).dot(&a.dot(u))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns `(values, vectors)` with eigenvalues sorted in descending
/// order and eigenvectors as the corresponding columns, so that
/// `a ≈ V diag(values) V†`. The input is symmetrized as (A + A†)/2
/// before iterating, which makes real output unconditional.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen needs a square matrix");

    let mut m: CMatrix = (a + &dagger(a)).mapv(|z| 0.5 * z);
    let mut v = identity(n);
    if n <= 1 {
        let vals = m.diag().iter().map(|z| z.re).collect();
        return (vals, v);
    }

    let scale = max_abs(&m).max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off = off.max(m[[p, q]].norm());
            }
        }
        if off <= tol {
            break;
        }

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let r = apq.norm();
                if r <= tol * 1e-2 {
                    continue;
                }
                // Phase factor turns the 2x2 block real, then a classic
                // symmetric Jacobi rotation annihilates it.
                let phase = apq / r;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column rotation W restricted to the (p, q) plane:
                // W[p,p] = c*phase, W[p,q] = s*phase, W[q,p] = -s, W[q,q] = c,
                // applied as M <- W† M W, V <- V W.
                let wpp = phase * c;
                let wpq = phase * s;
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = mip * wpp - miq * s;
                    m[[i, q]] = mip * wpq + miq * c;
                }
                for jcol in 0..n {
                    let mpj = m[[p, jcol]];
                    let mqj = m[[q, jcol]];
                    m[[p, jcol]] = mpj * wpp.conj() - mqj * s;
                    m[[q, jcol]] = mpj * wpq.conj() + mqj * c;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * wpp - viq * s;
                    v[[i, q]] = vip * wpq + viq * c;
                }
                m[[p, q]] = Complex64::new(0.0, 0.0);
                m[[q, p]] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = m.diag().iter().map(|z| z.re).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());

    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            sorted_vecs[[i, new]] = v[[i, old]];
        }
    }
    (sorted_vals, sorted_vecs)
}

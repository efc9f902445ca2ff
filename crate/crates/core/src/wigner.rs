//! Wigner small-d and D matrices and Wigner 3j symbols.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - Matrix rows and columns are indexed by the projection m running from
//!   +j (index 0) down to -j.
//! - `wigner_small_d` is the standard real orthogonal small-d matrix with
//!   d^{1/2}(θ) = [[cos(θ/2), -sin(θ/2)], [sin(θ/2), cos(θ/2)]].
//! - `wigner_d_matrix` assembles D(φ,θ,ψ) = diag(e^{imφ}) · dᵀ(θ) ·
//!   diag(e^{imψ}), which for j = 1/2 reproduces [`su2::su2_fundamental`]
//!   element for element. Rows carry the φ phases, columns the ψ phases,
//!   so diagonal elements of D†ρD never depend on ψ.
//! - `wigner_d_from_su2` evaluates the same representation directly from
//!   the entries of a 2×2 SU(2) matrix (the action on homogeneous
//!   polynomials). It is single valued on SU(2) and satisfies
//!   D(uv) = D(u)D(v) exactly, which makes it the reference for
//!   homomorphism tests.
//!
//! Factorial sums are evaluated with exact f64 factorials up to 2j = 60
//! (small-d) and exact big-rational arithmetic up to 2j = 30 (3j
//! symbols); beyond that both switch to log-domain evaluation with
//! compensated summation.

use std::sync::OnceLock;

use ndarray::Array2;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::half_integer::HalfInteger;
use crate::linalg::CMatrix;
use crate::su2::{EulerAngles, Su2};
use crate::{Error, Result};

/// Largest supported 2j for any representation matrix.
const MAX_TWICE_J: i64 = 400;
/// Direct f64 factorial evaluation is used up to this 2j.
const DIRECT_TWICE_J: i64 = 60;
/// Exact big-rational 3j evaluation is used while every 2j is at most this.
const EXACT_3J_TWICE_J: i64 = 30;

fn factorials_f64() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![1.0f64; 171];
        for n in 1..t.len() {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0f64; 1302];
        let mut acc = 0.0f64;
        for n in 1..t.len() {
            acc += (n as f64).ln();
            t[n] = acc;
        }
        t
    })
}

fn big_factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Kahan-compensated sum of an iterator of f64 terms.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for t in terms {
        let y = t - carry;
        let s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    sum
}

fn check_spin_size(j: HalfInteger) -> Result<()> {
    j.check_spin()?;
    if j.twice() > MAX_TWICE_J {
        return Err(Error::SpinTooLarge(j.twice()));
    }
    Ok(())
}

/// Standard Wigner small-d matrix d^j(θ), rows and columns indexed by
/// m = j down to -j. Orthogonal; d(0) is the identity.
pub fn wigner_small_d(j: HalfInteger, theta: f64) -> Result<Array2<f64>> {
    check_spin_size(j)?;
    let n = j.multiplicity();
    let tj = j.twice();
    let cos_half = (0.5 * theta).cos();
    let sin_half = (0.5 * theta).sin();

    let mut d = Array2::zeros((n, n));
    for (row, mp) in j.projections_desc().enumerate() {
        for (col, m) in j.projections_desc().enumerate() {
            d[[row, col]] = if tj <= DIRECT_TWICE_J {
                small_d_element_direct(j, mp, m, cos_half, sin_half)
            } else {
                small_d_element_log(j, mp, m, cos_half, sin_half)
            };
        }
    }
    Ok(d)
}

/// Summation bounds shared by both evaluation routes: k runs over
/// max(0, m - m') ..= min(j + m, j - m'), in twice-value units.
fn small_d_k_range(tj: i64, tmp: i64, tm: i64) -> (i64, i64) {
    let lo = 0i64.max((tm - tmp) / 2);
    let hi = ((tj + tm) / 2).min((tj - tmp) / 2);
    (lo, hi)
}

fn small_d_element_direct(
    j: HalfInteger,
    mp: HalfInteger,
    m: HalfInteger,
    cos_half: f64,
    sin_half: f64,
) -> f64 {
    let f = factorials_f64();
    let (tj, tmp, tm) = (j.twice(), mp.twice(), m.twice());
    let jpm = ((tj + tm) / 2) as usize;
    let jmm = ((tj - tm) / 2) as usize;
    let jpmp = ((tj + tmp) / 2) as usize;
    let jmmp = ((tj - tmp) / 2) as usize;
    let pref = f[jpmp].sqrt() * f[jmmp].sqrt() * f[jpm].sqrt() * f[jmm].sqrt();

    let (klo, khi) = small_d_k_range(tj, tmp, tm);
    let terms = (klo..=khi).map(|k| {
        let sign = if (k + (tmp - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = f[jpm - k as usize]
            * f[k as usize]
            * f[jmmp - k as usize]
            * f[((tmp - tm) / 2 + k) as usize];
        let cos_pow = (tj - 2 * k + (tm - tmp) / 2) as i32;
        let sin_pow = ((tmp - tm) / 2 + 2 * k) as i32;
        sign * cos_half.powi(cos_pow) * sin_half.powi(sin_pow) / denom
    });
    pref * compensated_sum(terms)
}

fn small_d_element_log(
    j: HalfInteger,
    mp: HalfInteger,
    m: HalfInteger,
    cos_half: f64,
    sin_half: f64,
) -> f64 {
    let lf = ln_factorials();
    let (tj, tmp, tm) = (j.twice(), mp.twice(), m.twice());
    let jpm = (tj + tm) / 2;
    let jmm = (tj - tm) / 2;
    let jpmp = (tj + tmp) / 2;
    let jmmp = (tj - tmp) / 2;
    let ln_pref = 0.5
        * (lf[jpmp as usize] + lf[jmmp as usize] + lf[jpm as usize] + lf[jmm as usize]);
    let ln_cos = if cos_half > 0.0 { cos_half.ln() } else { f64::NEG_INFINITY };
    let ln_sin = if sin_half > 0.0 { sin_half.ln() } else { f64::NEG_INFINITY };

    let (klo, khi) = small_d_k_range(tj, tmp, tm);
    let mut entries: Vec<(f64, f64)> = Vec::with_capacity((khi - klo + 1).max(0) as usize);
    for k in klo..=khi {
        let cos_pow = tj - 2 * k + (tm - tmp) / 2;
        let sin_pow = (tmp - tm) / 2 + 2 * k;
        // 0^0 = 1; any positive power of an exact zero kills the term.
        if (cos_pow > 0 && cos_half == 0.0) || (sin_pow > 0 && sin_half == 0.0) {
            continue;
        }
        let mut ln_mag = ln_pref
            - lf[(jpm - k) as usize]
            - lf[k as usize]
            - lf[(jmmp - k) as usize]
            - lf[((tmp - tm) / 2 + k) as usize];
        if cos_pow > 0 {
            ln_mag += cos_pow as f64 * ln_cos;
        }
        if sin_pow > 0 {
            ln_mag += sin_pow as f64 * ln_sin;
        }
        let sign = if (k + (tmp - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        entries.push((ln_mag, sign));
    }
    if entries.is_empty() {
        return 0.0;
    }
    let peak = entries.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let sum = compensated_sum(entries.iter().map(|&(l, s)| s * (l - peak).exp()));
    sum * peak.exp()
}

/// Wigner D matrix D^j(φ,θ,ψ) = diag(e^{imφ}) · d^j(θ)ᵀ · diag(e^{imψ}).
///
/// Unitary; D^{1/2} equals the fundamental SU(2) matrix exactly, and the
/// diagonal of D†ρD is independent of ψ by construction.
pub fn wigner_d_matrix(j: HalfInteger, angles: &EulerAngles) -> Result<CMatrix> {
    let small = wigner_small_d(j, angles.theta())?;
    let n = j.multiplicity();
    let mut d = Array2::zeros((n, n));
    for (row, mrow) in j.projections_desc().enumerate() {
        let row_phase = Complex64::from_polar(1.0, mrow.to_f64() * angles.phi());
        for (col, mcol) in j.projections_desc().enumerate() {
            let col_phase = Complex64::from_polar(1.0, mcol.to_f64() * angles.psi());
            d[[row, col]] = row_phase * small[[col, row]] * col_phase;
        }
    }
    Ok(d)
}

/// Spin-j representation matrix of an explicit SU(2) element, from its
/// action on homogeneous polynomials of degree 2j.
///
/// Exactly multiplicative: D(u·v) = D(u)·D(v) with no Euler-angle
/// extraction involved, so this is the reference implementation for
/// homomorphism checks. Supports 2j up to 60.
pub fn wigner_d_from_su2(j: HalfInteger, u: &Su2) -> Result<CMatrix> {
    j.check_spin()?;
    if j.twice() > DIRECT_TWICE_J {
        return Err(Error::SpinTooLarge(j.twice()));
    }
    let f = factorials_f64();
    let e = u.entries();
    let (u11, u12, u21, u22) = (e[0][0], e[0][1], e[1][0], e[1][1]);
    let tj = j.twice();
    let n = j.multiplicity();

    let mut d = Array2::zeros((n, n));
    for (row, mp) in j.projections_desc().enumerate() {
        for (col, m) in j.projections_desc().enumerate() {
            let (tmp, tm) = (mp.twice(), m.twice());
            let jpm = (tj + tm) / 2;
            let jpmp = (tj + tmp) / 2;
            let jmm = (tj - tm) / 2;
            let jmmp = (tj - tmp) / 2;
            let pref = f[jpmp as usize].sqrt()
                * f[jmmp as usize].sqrt()
                * f[jpm as usize].sqrt()
                * f[jmm as usize].sqrt();
            let klo = 0i64.max((tm + tmp) / 2);
            let khi = jpm.min(jpmp);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in klo..=khi {
                let denom = f[k as usize]
                    * f[(jpmp - k) as usize]
                    * f[(jpm - k) as usize]
                    * f[(k - (tm + tmp) / 2) as usize];
                acc += u11.powi(k as i32)
                    * u12.powi((jpmp - k) as i32)
                    * u21.powi((jpm - k) as i32)
                    * u22.powi((k - (tm + tmp) / 2) as i32)
                    / denom;
            }
            d[[row, col]] = pref * acc;
        }
    }
    Ok(d)
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
///
/// Selection-rule violations (triangle inequality, m1+m2+m3 ≠ 0,
/// |m| > j, non-integral j-m) return 0 by convention rather than
/// erroring, which lets reconstruction sums run over full index ranges.
pub fn wigner_3j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> f64 {
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());

    // Selection rules.
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tj3 < (tj1 - tj2).abs() || tj3 > tj1 + tj2 || (tj1 + tj2 + tj3) % 2 != 0 {
        return 0.0;
    }
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tm.abs() > tj || (tj - tm) % 2 != 0 {
            return 0.0;
        }
    }

    // Racah sum bounds, in ordinary (not doubled) integers.
    let t1 = (tj1 + tj2 - tj3) / 2;
    let klo = 0i64
        .max((tj2 - tj3 - tm1) / 2)
        .max((tj1 - tj3 + tm2) / 2);
    let khi = t1.min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    if klo > khi {
        return 0.0;
    }

    let phase = (j1 - j2 - m3).parity_sign();
    if tj1.max(tj2).max(tj3) <= EXACT_3J_TWICE_J {
        phase * wigner_3j_exact(tj1, tj2, tj3, tm1, tm2, klo, khi)
    } else {
        phase * wigner_3j_log(tj1, tj2, tj3, tm1, tm2, klo, khi)
    }
}

/// Exact route: the sum over k and the squared prefactor are evaluated in
/// big-rational arithmetic; the only roundings are the final conversion
/// and square root.
fn wigner_3j_exact(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, klo: i64, khi: i64) -> f64 {
    let fact = |n: i64| big_factorial(n);

    let mut series = BigRational::zero();
    for k in klo..=khi {
        let denom = fact(k)
            * fact((tj1 + tj2 - tj3) / 2 - k)
            * fact((tj1 - tm1) / 2 - k)
            * fact((tj2 + tm2) / 2 - k)
            * fact((tj3 - tj2 + tm1) / 2 + k)
            * fact((tj3 - tj1 - tm2) / 2 + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
    }
    if series.is_zero() {
        return 0.0;
    }

    let triangle = BigRational::new(
        fact((tj1 + tj2 - tj3) / 2) * fact((tj1 - tj2 + tj3) / 2) * fact((-tj1 + tj2 + tj3) / 2),
        fact((tj1 + tj2 + tj3) / 2 + 1),
    );
    let projections = fact((tj1 + tm1) / 2)
        * fact((tj1 - tm1) / 2)
        * fact((tj2 + tm2) / 2)
        * fact((tj2 - tm2) / 2)
        * fact((tj3 + tm1 + tm2) / 2)
        * fact((tj3 - tm1 - tm2) / 2);

    let squared = triangle * BigRational::from(projections) * series.clone() * series.clone();
    let magnitude = squared.to_f64().expect("3j magnitude fits in f64").sqrt();
    if series.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Log-gamma route for large spins: terms are exponentiated relative to
/// the largest one and combined with compensated summation.
fn wigner_3j_log(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, klo: i64, khi: i64) -> f64 {
    let lf = ln_factorials();
    let lfi = |n: i64| lf[n as usize];

    let ln_fixed = 0.5
        * (lfi((tj1 + tj2 - tj3) / 2) + lfi((tj1 - tj2 + tj3) / 2)
            + lfi((-tj1 + tj2 + tj3) / 2)
            - lfi((tj1 + tj2 + tj3) / 2 + 1)
            + lfi((tj1 + tm1) / 2)
            + lfi((tj1 - tm1) / 2)
            + lfi((tj2 + tm2) / 2)
            + lfi((tj2 - tm2) / 2)
            + lfi((tj3 + tm1 + tm2) / 2)
            + lfi((tj3 - tm1 - tm2) / 2));

    let ln_terms: Vec<(f64, f64)> = (klo..=khi)
        .map(|k| {
            let ln_denom = lfi(k)
                + lfi((tj1 + tj2 - tj3) / 2 - k)
                + lfi((tj1 - tm1) / 2 - k)
                + lfi((tj2 + tm2) / 2 - k)
                + lfi((tj3 - tj2 + tm1) / 2 + k)
                + lfi((tj3 - tj1 - tm2) / 2 + k);
            (-ln_denom, if k % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect();
    let peak = ln_terms.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let series = compensated_sum(ln_terms.iter().map(|&(l, s)| s * (l - peak).exp()));
    series * (peak + ln_fixed).exp()
}

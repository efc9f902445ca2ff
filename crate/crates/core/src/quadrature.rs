//! Product quadrature over the Euler-angle manifold.
//!
//! The integration measure is dΩ = dφ dψ sinθ dθ with φ, ψ ∈ [0, 2π) and
//! θ ∈ [0, π]; the total volume is 8π². Band-limited integrands (products
//! of representation matrix elements) are trigonometric polynomials in φ
//! and ψ and, once the zero-frequency part is selected, polynomials in
//! cosθ, so a trapezoidal × trapezoidal × Gauss-Legendre product rule is
//! exact:
//!
//! - φ, ψ: band_limit + 1 equispaced nodes each (exact for harmonics up
//!   to frequency band_limit),
//! - cosθ: ⌈(band_limit+1)/2⌉ Gauss-Legendre nodes with the sinθ Jacobian
//!   folded into the weights (exact for polynomial degree ≥ band_limit).

use std::f64::consts::{PI, TAU};

use crate::su2::EulerAngles;
use crate::{Error, Result};

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

/// Quadrature nodes and weights integrating every product of D-matrix
/// elements of total degree ≤ `band_limit` exactly.
#[derive(Clone, Debug)]
pub struct GroupQuadrature {
    nodes: Vec<(EulerAngles, f64)>,
    band_limit: u32,
}

impl GroupQuadrature {
    pub fn nodes(&self) -> &[(EulerAngles, f64)] {
        &self.nodes
    }

    pub fn band_limit(&self) -> u32 {
        self.band_limit
    }

    /// Sum of all weights; equals 8π² up to rounding.
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }

    /// Integrates `f` over the group with the full dΩ measure
    /// (not normalized; divide by 8π² for a group average).
    pub fn integrate<F: Fn(&EulerAngles) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|(a, w)| w * f(a)).sum()
    }
}

/// Builds the product rule for a given band limit with the default node
/// cap of 10⁷.
pub fn quadrature_grid(band_limit: u32) -> Result<GroupQuadrature> {
    quadrature_grid_with_cap(band_limit, DEFAULT_NODE_CAP)
}

pub fn quadrature_grid_with_cap(band_limit: u32, cap: u64) -> Result<GroupQuadrature> {
    let n_angle = band_limit as u64 + 1;
    let n_theta = (band_limit as u64 + 2) / 2; // ⌈(band+1)/2⌉
    let n_theta = n_theta.max(1);
    let total = (n_angle as u128) * (n_angle as u128) * (n_theta as u128);
    if total > cap as u128 {
        return Err(Error::QuadratureTooLarge { nodes: total, cap });
    }

    let (xs, ws) = gauss_legendre(n_theta as usize);
    let w_angle = TAU / n_angle as f64;

    let mut nodes = Vec::with_capacity(total as usize);
    for ip in 0..n_angle {
        let phi = TAU * ip as f64 / n_angle as f64;
        for is in 0..n_angle {
            let psi = TAU * is as f64 / n_angle as f64;
            for (x, w) in xs.iter().zip(ws.iter()) {
                let theta = x.clamp(-1.0, 1.0).acos();
                let angles = EulerAngles::new(phi, theta, psi)?;
                // sinθ dθ = -d(cosθ): the GL weight on [-1, 1] already
                // carries the Jacobian.
                nodes.push((angles, w_angle * w_angle * w));
            }
        }
    }
    Ok(GroupQuadrature { nodes, band_limit })
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0f64; n];
    let mut ws = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        xs[n / 2] = 0.0;
        ws[n / 2] = 2.0 / (d * d);
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

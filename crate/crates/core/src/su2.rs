//! Euler-angle parametrization of SU(2).
//!
//! The fundamental matrix used throughout the crate is
//!
//! ```text
//! u(φ,θ,ψ) = | cos(θ/2) e^{ i(φ+ψ)/2}   sin(θ/2) e^{ i(φ-ψ)/2} |
//!            | -sin(θ/2) e^{-i(φ-ψ)/2}   cos(θ/2) e^{-i(φ+ψ)/2} |
//! ```
//!
//! so the row index carries the φ phase and the column index the ψ phase.
//! With this choice the tomogram of any state is independent of ψ, which
//! pins the sign of the off-diagonal exponents (the two off-diagonal
//! phases must be opposite for unitarity).
//!
//! The canonical chart φ, ψ ∈ [0, 2π), θ ∈ [0, π] reaches every element
//! of SU(2) only up to the center ±1: for a generic matrix w exactly one
//! of w, -w has canonical angles. [`EulerAngles::decompose`] therefore
//! reports the sign alongside the angles.

use std::f64::consts::{PI, TAU};

use ndarray::Array2;
use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Euler angles in the canonical ranges φ, ψ ∈ [0, 2π), θ ∈ [0, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    phi: f64,
    theta: f64,
    psi: f64,
}

impl EulerAngles {
    /// Normalizes φ and ψ modulo 2π; rejects θ outside [0, π].
    pub fn new(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(EulerAngles {
            phi: wrap_tau(phi),
            theta,
            psi: wrap_tau(psi),
        })
    }

    pub fn zero() -> Self {
        EulerAngles {
            phi: 0.0,
            theta: 0.0,
            psi: 0.0,
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Same direction (φ, θ) with ψ reset to 0.
    pub fn with_zero_psi(&self) -> Self {
        EulerAngles {
            phi: self.phi,
            theta: self.theta,
            psi: 0.0,
        }
    }

    /// Canonical angles of an SU(2) element, together with the sign s
    /// such that `su2_fundamental(angles) == s * u`.
    ///
    /// Gimbal-locked elements (θ = 0 or π) use the convention ψ = 0.
    pub fn decompose(u: &Su2) -> (Self, f64) {
        let (a, b) = (u.a, u.b);
        let theta = 2.0 * b.norm().atan2(a.norm());
        let angles = if b.norm() < 1e-15 {
            // θ ≈ 0: only φ+ψ matters; put everything in φ.
            EulerAngles::new(wrap_tau(2.0 * a.arg()), 0.0, 0.0).unwrap()
        } else if a.norm() < 1e-15 {
            // θ ≈ π: only φ-ψ matters.
            EulerAngles::new(wrap_tau(2.0 * b.arg()), PI, 0.0).unwrap()
        } else {
            let half_sum = a.arg(); // (φ+ψ)/2 mod 2π
            let half_diff = b.arg(); // (φ-ψ)/2 mod 2π
            EulerAngles::new(
                wrap_tau(half_sum + half_diff),
                theta.clamp(0.0, PI),
                wrap_tau(half_sum - half_diff),
            )
            .unwrap()
        };
        let rebuilt = Su2::from_angles(&angles);
        // rebuilt is ±u; probe with the larger of a, b.
        let sign = if a.norm() >= b.norm() {
            if (rebuilt.a - a).norm() <= (rebuilt.a + a).norm() {
                1.0
            } else {
                -1.0
            }
        } else if (rebuilt.b - b).norm() <= (rebuilt.b + b).norm() {
            1.0
        } else {
            -1.0
        };
        (angles, sign)
    }

    /// Angles of the composed rotation u(self)·u(other), canonicalized.
    ///
    /// The result represents the product only up to the center of SU(2);
    /// every integer-spin representation and every tomogram is blind to
    /// that sign.
    pub fn compose(&self, other: &EulerAngles) -> EulerAngles {
        let product = Su2::from_angles(self).mul(&Su2::from_angles(other));
        EulerAngles::decompose(&product).0
    }
}

fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can return TAU itself when x is a tiny negative number.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// An SU(2) matrix [[a, b], [-conj(b), conj(a)]] with |a|² + |b|² = 1;
/// unitarity and det = 1 hold by construction.
#[derive(Clone, Copy, Debug)]
pub struct Su2 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Su2 {
    pub fn from_angles(angles: &EulerAngles) -> Self {
        let half = 0.5 * angles.theta;
        let (c, s) = (half.cos(), half.sin());
        let plus = 0.5 * (angles.phi + angles.psi);
        let minus = 0.5 * (angles.phi - angles.psi);
        Su2 {
            a: c * Complex64::from_polar(1.0, plus),
            b: s * Complex64::from_polar(1.0, minus),
        }
    }

    pub fn identity() -> Self {
        Su2 {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn mul(&self, rhs: &Su2) -> Su2 {
        // [[a1,b1],[-b̄1,ā1]]·[[a2,b2],[-b̄2,ā2]]
        Su2 {
            a: self.a * rhs.a - self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [
            [self.a, self.b],
            [-self.b.conj(), self.a.conj()],
        ]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let e = self.entries();
        let mut m = Array2::zeros((2, 2));
        for (i, row) in e.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                m[[i, j]] = *z;
            }
        }
        m
    }
}

/// The 2×2 SU(2) element for the given Euler angles.
pub fn su2_fundamental(angles: &EulerAngles) -> CMatrix {
    Su2::from_angles(angles).to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_deviation};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn angles(phi: f64, theta: f64, psi: f64) -> EulerAngles {
        EulerAngles::new(phi, theta, psi).unwrap()
    }

    fn random_angles(rng: &mut impl Rng) -> EulerAngles {
        angles(
            rng.gen::<f64>() * TAU,
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * TAU,
        )
    }

    #[test]
    fn zero_angles_give_identity() {
        let u = su2_fundamental(&EulerAngles::zero());
        assert!(max_abs_diff(&u, &Array2::eye(2)) < 1e-15);
    }

    #[test]
    fn theta_pi_gives_antisymmetric_swap() {
        let u = su2_fundamental(&angles(0.0, PI, 0.0));
        let mut expect: CMatrix = Array2::zeros((2, 2));
        expect[[0, 1]] = Complex64::new(1.0, 0.0);
        expect[[1, 0]] = Complex64::new(-1.0, 0.0);
        assert!(max_abs_diff(&u, &expect) < 1e-15);
    }

    #[test]
    fn quarter_rotation_entries_evaluated_by_hand() {
        // φ = π/2, θ = π/2, ψ = 0:
        //   a = cos(π/4) e^{iπ/4} = 0.5 + 0.5i, b = sin(π/4) e^{iπ/4} = 0.5 + 0.5i
        let u = su2_fundamental(&angles(0.5 * PI, 0.5 * PI, 0.0));
        let expect = [
            [Complex64::new(0.5, 0.5), Complex64::new(0.5, 0.5)],
            [Complex64::new(-0.5, 0.5), Complex64::new(0.5, -0.5)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((u[[i, j]] - expect[i][j]).norm() < 1e-15);
            }
        }
        assert!((u[[0, 0]].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((u[[0, 1]].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fundamental_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u = su2_fundamental(&random_angles(&mut rng));
            assert!(unitarity_deviation(&u) < 1e-14);
            let det = u[[0, 0]] * u[[1, 1]] - u[[0, 1]] * u[[1, 0]];
            assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn constructor_normalizes_and_rejects() {
        let a = angles(TAU + 0.25, 0.5, -0.25);
        assert!((a.phi() - 0.25).abs() < 1e-12);
        assert!((a.psi() - (TAU - 0.25)).abs() < 1e-12);
        assert!(EulerAngles::new(0.0, -0.1, 0.0).is_err());
        assert!(EulerAngles::new(0.0, PI + 0.1, 0.0).is_err());
    }

    #[test]
    fn decompose_round_trips_up_to_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let w = Su2::from_angles(&random_angles(&mut rng))
                .mul(&Su2::from_angles(&random_angles(&mut rng)));
            let (ang, sign) = EulerAngles::decompose(&w);
            let rebuilt = Su2::from_angles(&ang);
            assert!((rebuilt.a - sign * w.a).norm() < 1e-12);
            assert!((rebuilt.b - sign * w.b).norm() < 1e-12);
        }
    }

    #[test]
    fn decompose_handles_gimbal_lock() {
        // -I is reachable only with nonzero ψ; the ψ=0 convention returns
        // sign -1 instead.
        let minus_i = Su2 {
            a: Complex64::new(-1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let (ang, sign) = EulerAngles::decompose(&minus_i);
        assert_eq!(ang.psi(), 0.0);
        let rebuilt = Su2::from_angles(&ang);
        assert!((rebuilt.a - sign * minus_i.a).norm() < 1e-12);

        let flip = Su2 {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 1.0),
        };
        let (ang, sign) = EulerAngles::decompose(&flip);
        assert!((ang.theta() - PI).abs() < 1e-12);
        let rebuilt = Su2::from_angles(&ang);
        assert!((rebuilt.b - sign * flip.b).norm() < 1e-12);
    }

    #[test]
    fn compose_matches_matrix_product_up_to_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let a1 = random_angles(&mut rng);
            let a2 = random_angles(&mut rng);
            let composed = su2_fundamental(&a1.compose(&a2));
            let product = su2_fundamental(&a1).dot(&su2_fundamental(&a2));
            let direct = max_abs_diff(&composed, &product);
            let flipped = max_abs_diff(&composed, &product.mapv(|z| -z));
            assert!(direct.min(flipped) < 1e-12);
        }
    }
}

//! Spin tomograms: forward maps ρ → ω and the inverse reconstruction.
//!
//! The tomogram of a spin-j state in a measurement frame U is the
//! diagonal of U†ρU — the probability distribution of the projection m
//! in the rotated basis. Sphere frames are the subgroup U = D^j(φ,θ,ψ);
//! their tomograms depend only on the direction (θ, φ), never on ψ.
//!
//! Reconstruction inverts the sphere tomogram by integrating it against
//! D-matrix elements over the group, contracting with two Wigner 3j
//! symbols per harmonic. With the phase conventions of [`crate::wigner`]
//! the kernel reads
//!
//! ```text
//! ρ_{mm'} = e^{-iπm} Σ_{k=0}^{2j} (2k+1)² (j j k; -m m' m-m')
//!           Σ_i e^{iπi} (j j k; -i i 0) ∫ ω(i,u) D^k_{m-m',0}(u) dΩ/8π²
//! ```
//!
//! which is exact for band limits ≥ 4j. The half-integer phases e^{±iπx}
//! are evaluated exactly from twice-values.

use ndarray::Array2;
use num_complex::Complex64;

use crate::half_integer::HalfInteger;
use crate::linalg::{self, CMatrix};
use crate::quadrature::GroupQuadrature;
use crate::state::{BipartiteShape, DensityMatrix, Subsystem, ValidationTolerances};
use crate::su2::EulerAngles;
use crate::wigner::{wigner_3j, wigner_d_matrix};
use crate::{Error, Result};

/// Negative values above this magnitude are treated as data errors, not
/// numerical noise; smaller ones are clamped to zero.
const NOISE_FLOOR: f64 = 1e-9;
/// Probability sums are renormalized only when they deviate from 1 by
/// more than this (so exact inputs pass through bit for bit).
const RENORMALIZE_ABOVE: f64 = 1e-12;
/// Conditioning on outcomes at or below this probability is an error.
const CONDITION_FLOOR: f64 = 1e-12;

/// An element of U(n) used as a measurement frame.
#[derive(Clone, Debug)]
pub struct UnitaryFrame {
    matrix: CMatrix,
}

impl UnitaryFrame {
    /// Validates ‖U†U - I‖_max ≤ 1e-12.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        assert_eq!(matrix.nrows(), matrix.ncols(), "frame must be square");
        let dev = linalg::unitarity_deviation(&matrix);
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(UnitaryFrame { matrix })
    }

    pub fn identity(n: usize) -> Self {
        UnitaryFrame {
            matrix: linalg::identity(n),
        }
    }

    /// The spin-j rotation D^j(φ,θ,ψ) as a frame.
    pub fn from_wigner_d(j: HalfInteger, angles: &EulerAngles) -> Result<Self> {
        Ok(UnitaryFrame {
            matrix: wigner_d_matrix(j, angles)?,
        })
    }

    /// The frame whose columns are the eigenvectors of ρ (descending
    /// eigenvalues); measuring in it yields exactly the spectrum.
    pub fn from_eigenvectors(rho: &DensityMatrix) -> Self {
        UnitaryFrame {
            matrix: rho.eigen().1,
        }
    }

    pub fn kron(&self, other: &UnitaryFrame) -> UnitaryFrame {
        UnitaryFrame {
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// The measurement context of a single-spin tomogram.
#[derive(Clone, Debug)]
pub enum Frame {
    /// Direction on the sphere; ψ is canonicalized to 0.
    Sphere(EulerAngles),
    /// Arbitrary unitary frame. For marginals of joint unitary tomograms
    /// this records the joint U(n₁n₂) element.
    Unitary(UnitaryFrame),
}

/// The measurement context of a two-spin tomogram.
#[derive(Clone, Debug)]
pub enum JointFrame {
    Spheres(EulerAngles, EulerAngles),
    Unitary(UnitaryFrame),
}

/// Probability distribution of a spin projection, indexed by m
/// descending from +j.
#[derive(Clone, Debug)]
pub struct SpinTomogram {
    j: HalfInteger,
    frame: Frame,
    probabilities: Vec<f64>,
}

impl SpinTomogram {
    /// Clamps sub-noise negatives to zero and renormalizes; rejects
    /// larger deficits instead of hiding them.
    pub fn new(j: HalfInteger, frame: Frame, probabilities: Vec<f64>) -> Result<Self> {
        j.check_spin()?;
        if probabilities.len() != j.multiplicity() {
            return Err(Error::DimensionMismatch {
                expected: j.multiplicity(),
                got: probabilities.len(),
            });
        }
        let probabilities = clean_probabilities(probabilities)?;
        Ok(SpinTomogram {
            j,
            frame,
            probabilities,
        })
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, m: HalfInteger) -> Result<f64> {
        self.j.check_projection(m)?;
        Ok(self.probabilities[self.j.projection_index(m)])
    }
}

/// Joint probability distribution of two spin projections,
/// (m₁ descending) × (m₂ descending).
#[derive(Clone, Debug)]
pub struct JointTomogram {
    shape: BipartiteShape,
    frame: JointFrame,
    probabilities: Array2<f64>,
}

impl JointTomogram {
    pub fn new(
        shape: BipartiteShape,
        frame: JointFrame,
        probabilities: Array2<f64>,
    ) -> Result<Self> {
        if probabilities.dim() != (shape.n1(), shape.n2()) {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                got: probabilities.len(),
            });
        }
        let flat = clean_probabilities(probabilities.iter().copied().collect())?;
        let probabilities =
            Array2::from_shape_vec((shape.n1(), shape.n2()), flat).expect("shape preserved");
        Ok(JointTomogram {
            shape,
            frame,
            probabilities,
        })
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    pub fn frame(&self) -> &JointFrame {
        &self.frame
    }

    pub fn probabilities(&self) -> &Array2<f64> {
        &self.probabilities
    }

    /// Marginal distribution of one spin (sum over the other).
    pub fn marginal(&self, keep: Subsystem) -> SpinTomogram {
        let (j, probs): (HalfInteger, Vec<f64>) = match keep {
            Subsystem::First => (
                self.shape.j1,
                self.probabilities
                    .rows()
                    .into_iter()
                    .map(|r| r.sum())
                    .collect(),
            ),
            Subsystem::Second => (
                self.shape.j2,
                self.probabilities
                    .columns()
                    .into_iter()
                    .map(|c| c.sum())
                    .collect(),
            ),
        };
        let frame = match (&self.frame, keep) {
            (JointFrame::Spheres(a1, _), Subsystem::First) => Frame::Sphere(*a1),
            (JointFrame::Spheres(_, a2), Subsystem::Second) => Frame::Sphere(*a2),
            (JointFrame::Unitary(u), _) => Frame::Unitary(u.clone()),
        };
        SpinTomogram::new(j, frame, probs).expect("marginal of a valid tomogram is valid")
    }

    /// Distribution of the other spin conditioned on `outcome` of the
    /// `given` spin. Conditioning on an outcome of probability ≤ 1e-12
    /// is an error rather than a NaN.
    pub fn conditional(&self, given: Subsystem, outcome: HalfInteger) -> Result<SpinTomogram> {
        let (given_j, kept_j) = match given {
            Subsystem::First => (self.shape.j1, self.shape.j2),
            Subsystem::Second => (self.shape.j2, self.shape.j1),
        };
        given_j.check_projection(outcome)?;
        let idx = given_j.projection_index(outcome);
        let slice: Vec<f64> = match given {
            Subsystem::First => self.probabilities.row(idx).to_vec(),
            Subsystem::Second => self.probabilities.column(idx).to_vec(),
        };
        let total: f64 = slice.iter().sum();
        if total <= CONDITION_FLOOR {
            return Err(Error::ZeroProbabilityCondition {
                prob: total,
                tol: CONDITION_FLOOR,
            });
        }
        let frame = match (&self.frame, given) {
            (JointFrame::Spheres(_, a2), Subsystem::First) => Frame::Sphere(*a2),
            (JointFrame::Spheres(a1, _), Subsystem::Second) => Frame::Sphere(*a1),
            (JointFrame::Unitary(u), _) => Frame::Unitary(u.clone()),
        };
        SpinTomogram::new(kept_j, frame, slice.iter().map(|p| p / total).collect())
    }
}

fn clean_probabilities(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for (index, v) in values.iter_mut().enumerate() {
        if *v < -NOISE_FLOOR {
            return Err(Error::NegativeProbability {
                index,
                value: *v,
                tol: NOISE_FLOOR,
            });
        }
        *v = v.clamp(0.0, 1.0);
    }
    let sum: f64 = values.iter().sum();
    let deviation = sum - 1.0;
    if deviation.abs() > NOISE_FLOOR {
        return Err(Error::NotAProbabilityDistribution {
            deviation,
            tol: NOISE_FLOOR,
        });
    }
    if deviation.abs() > RENORMALIZE_ABOVE {
        for v in values.iter_mut() {
            *v /= sum;
        }
    }
    Ok(values)
}

fn check_dim(rho: &DensityMatrix, expected: usize) -> Result<()> {
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: rho.dim(),
        });
    }
    Ok(())
}

fn diagonal_probabilities(rho: &DensityMatrix, u: &CMatrix) -> Vec<f64> {
    linalg::conjugate_by(rho.entries(), u)
        .diag()
        .iter()
        .map(|z| z.re)
        .collect()
}

/// Tomogram of a spin-j state along the direction (θ, φ).
///
/// The result never depends on ψ; the stored frame records ψ = 0.
pub fn spin_tomogram(
    rho: &DensityMatrix,
    j: HalfInteger,
    angles: &EulerAngles,
) -> Result<SpinTomogram> {
    j.check_spin()?;
    check_dim(rho, j.multiplicity())?;
    let d = wigner_d_matrix(j, angles)?;
    SpinTomogram::new(
        j,
        Frame::Sphere(angles.with_zero_psi()),
        diagonal_probabilities(rho, &d),
    )
}

/// Tomogram of a state in an arbitrary unitary frame: diag(U†ρU).
pub fn unitary_tomogram(rho: &DensityMatrix, frame: &UnitaryFrame) -> Result<SpinTomogram> {
    check_dim(rho, frame.n())?;
    let j = HalfInteger::from_twice(frame.n() as i64 - 1);
    SpinTomogram::new(
        j,
        Frame::Unitary(frame.clone()),
        diagonal_probabilities(rho, frame.matrix()),
    )
}

/// Joint tomogram of a two-spin state with independent rotations of the
/// two factors.
pub fn two_spin_tomogram(
    rho: &DensityMatrix,
    shape: &BipartiteShape,
    angles1: &EulerAngles,
    angles2: &EulerAngles,
) -> Result<JointTomogram> {
    shape.check_dim(rho.dim())?;
    let d = linalg::kron(
        &wigner_d_matrix(shape.j1, angles1)?,
        &wigner_d_matrix(shape.j2, angles2)?,
    );
    let flat = diagonal_probabilities(rho, &d);
    let probabilities =
        Array2::from_shape_vec((shape.n1(), shape.n2()), flat).expect("n1*n2 entries");
    JointTomogram::new(
        *shape,
        JointFrame::Spheres(angles1.with_zero_psi(), angles2.with_zero_psi()),
        probabilities,
    )
}

/// Joint tomogram in an arbitrary U(n₁n₂) frame.
pub fn two_spin_unitary_tomogram(
    rho: &DensityMatrix,
    shape: &BipartiteShape,
    frame: &UnitaryFrame,
) -> Result<JointTomogram> {
    shape.check_dim(rho.dim())?;
    if frame.n() != shape.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.dim(),
            got: frame.n(),
        });
    }
    let flat = diagonal_probabilities(rho, frame.matrix());
    let probabilities =
        Array2::from_shape_vec((shape.n1(), shape.n2()), flat).expect("n1*n2 entries");
    JointTomogram::new(*shape, JointFrame::Unitary(frame.clone()), probabilities)
}

/// Reconstructs the density matrix from the sphere tomogram by group
/// integration.
///
/// `tomogram_fn` is evaluated exactly at the quadrature nodes (no
/// interpolation) and must be safe for concurrent invocation; it
/// receives every node of `quad`. The quadrature band limit must be at
/// least 4j. The output is validated with a uniform 1e-6 gate, looser
/// than the hand-built default because it carries quadrature noise.
pub fn reconstruct_density<F>(
    tomogram_fn: F,
    j: HalfInteger,
    quad: &GroupQuadrature,
) -> Result<DensityMatrix>
where
    F: Fn(&EulerAngles) -> SpinTomogram + Sync,
{
    j.check_spin()?;
    let required = 2 * j.twice() as u32; // band limit 4j
    if quad.band_limit() < required {
        return Err(Error::BandLimitTooSmall {
            required,
            got: quad.band_limit(),
            j,
        });
    }

    let n = j.multiplicity();
    let k_count = j.twice() as usize + 1; // k = 0..=2j

    // 3j(j j k; -i, i, 0) with the exact phase e^{iπi}, per k and i.
    let mut projection_weights = vec![vec![Complex64::new(0.0, 0.0); n]; k_count];
    for (ki, weights) in projection_weights.iter_mut().enumerate() {
        let k = HalfInteger::from_int(ki as i64);
        for (ii, i) in j.projections_desc().enumerate() {
            weights[ii] =
                i.unit_phase() * wigner_3j(j, j, k, -i, i, HalfInteger::ZERO);
        }
    }

    // A[k][l-index] = ∫ Σ_i e^{iπi} (jjk;-i,i,0) ω(i,u) D^k_{l,0}(u) dΩ
    let mut harmonics: Vec<Vec<Complex64>> = (0..k_count)
        .map(|ki| vec![Complex64::new(0.0, 0.0); 2 * ki + 1])
        .collect();

    for (angles, weight) in quad.nodes() {
        let tomogram = tomogram_fn(angles);
        assert_eq!(
            tomogram.j(),
            j,
            "tomogram callable returned spin {} instead of {j}",
            tomogram.j()
        );
        let omega = tomogram.probabilities();
        for ki in 0..k_count {
            let k = HalfInteger::from_int(ki as i64);
            let mut g = Complex64::new(0.0, 0.0);
            for (ii, w3) in projection_weights[ki].iter().enumerate() {
                g += w3 * omega[ii];
            }
            if g.norm_sqr() == 0.0 {
                continue;
            }
            let dk = wigner_d_matrix(k, angles)?;
            let zero_idx = k.projection_index(HalfInteger::ZERO);
            for (li, _l) in k.projections_desc().enumerate() {
                harmonics[ki][li] += *weight * g * dk[[li, zero_idx]];
            }
        }
    }

    let norm = 8.0 * std::f64::consts::PI * std::f64::consts::PI;
    let mut rho: CMatrix = Array2::zeros((n, n));
    for (row, m) in j.projections_desc().enumerate() {
        let row_phase = (-m).unit_phase(); // e^{-iπm}
        for (col, mp) in j.projections_desc().enumerate() {
            let l = m - mp;
            let mut acc = Complex64::new(0.0, 0.0);
            for (ki, harmonic) in harmonics.iter().enumerate() {
                let k = HalfInteger::from_int(ki as i64);
                if l.twice().abs() > k.twice() {
                    continue;
                }
                let coupling = wigner_3j(j, j, k, -m, mp, l);
                if coupling == 0.0 {
                    continue;
                }
                let scale = ((2 * ki + 1) * (2 * ki + 1)) as f64;
                acc += scale * coupling * harmonic[k.projection_index(l)];
            }
            rho[[row, col]] = row_phase * acc / norm;
        }
    }

    DensityMatrix::validate(rho, &ValidationTolerances::uniform(1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::quadrature::quadrature_grid;
    use crate::state::PureState;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn h(twice: i64) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

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
    fn spin_half_tomogram_is_cos_squared() {
        let rho = DensityMatrix::from_pure(&PureState::basis_vector(2, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            let tom = spin_tomogram(&rho, h(1), &a).unwrap();
            let want = (a.theta() / 2.0).cos().powi(2);
            assert!((tom.probability(h(1)).unwrap() - want).abs() < 1e-13);
            assert!((tom.probability(h(-1)).unwrap() - (1.0 - want)).abs() < 1e-13);
        }
    }

    #[test]
    fn maximally_mixed_tomogram_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for tj in [1i64, 2, 3] {
            let j = h(tj);
            let rho = DensityMatrix::maximally_mixed(j.multiplicity());
            let tom = spin_tomogram(&rho, j, &random_angles(&mut rng)).unwrap();
            for &p in tom.probabilities() {
                assert!((p - 1.0 / j.multiplicity() as f64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_rotation_reads_off_the_diagonal() {
        let rho = DensityMatrix::random(4, 3, 5).unwrap();
        let tom = spin_tomogram(&rho, h(3), &EulerAngles::zero()).unwrap();
        for (k, &p) in tom.probabilities().iter().enumerate() {
            assert!((p - rho.entries()[[k, k]].re).abs() < 1e-14);
        }
    }

    #[test]
    fn tomogram_ignores_psi() {
        let rho = DensityMatrix::random(3, 2, 9).unwrap();
        let base = spin_tomogram(&rho, h(2), &angles(1.1, 0.7, 0.0)).unwrap();
        for psi in [1.0, 2.0, PI] {
            let other = spin_tomogram(&rho, h(2), &angles(1.1, 0.7, psi)).unwrap();
            for (a, b) in base.probabilities().iter().zip(other.probabilities()) {
                assert!((a - b).abs() < 1e-12);
            }
            match other.frame() {
                Frame::Sphere(a) => assert_eq!(a.psi(), 0.0),
                _ => panic!("sphere frame expected"),
            }
        }
    }

    #[test]
    fn unitary_frame_consistency_with_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for tj in [1i64, 2, 4] {
            let j = h(tj);
            let rho = DensityMatrix::random(j.multiplicity(), j.multiplicity(), 21).unwrap();
            let a = random_angles(&mut rng);
            let sphere = spin_tomogram(&rho, j, &a).unwrap();
            let frame = UnitaryFrame::from_wigner_d(j, &a).unwrap();
            let unitary = unitary_tomogram(&rho, &frame).unwrap();
            for (x, y) in sphere.probabilities().iter().zip(unitary.probabilities()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_frame_and_eigenframe() {
        let rho = DensityMatrix::random(3, 3, 33).unwrap();
        let tom = unitary_tomogram(&rho, &UnitaryFrame::identity(3)).unwrap();
        for (k, &p) in tom.probabilities().iter().enumerate() {
            assert!((p - rho.entries()[[k, k]].re).abs() < 1e-14);
        }

        let eigenframe = UnitaryFrame::from_eigenvectors(&rho);
        let tom = unitary_tomogram(&rho, &eigenframe).unwrap();
        let spectrum = rho.spectrum();
        for (p, lam) in tom.probabilities().iter().zip(spectrum.iter()) {
            assert!((p - lam).abs() < 1e-12);
        }

        let mixed = DensityMatrix::maximally_mixed(4);
        let frame = UnitaryFrame::from_eigenvectors(&DensityMatrix::random(4, 4, 8).unwrap());
        let tom = unitary_tomogram(&mixed, &frame).unwrap();
        for &p in tom.probabilities() {
            assert!((p - 0.25).abs() < 1e-13);
        }
    }

    #[test]
    fn product_state_tomogram_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let shape = BipartiteShape::new(h(1), h(2)).unwrap();
        let rho1 = DensityMatrix::random(2, 2, 1).unwrap();
        let rho2 = DensityMatrix::random(3, 3, 2).unwrap();
        let joint_state = DensityMatrix::tensor_product(&rho1, &rho2);
        let (a1, a2) = (random_angles(&mut rng), random_angles(&mut rng));
        let joint = two_spin_tomogram(&joint_state, &shape, &a1, &a2).unwrap();
        let t1 = spin_tomogram(&rho1, h(1), &a1).unwrap();
        let t2 = spin_tomogram(&rho2, h(2), &a2).unwrap();
        for (i, &p1) in t1.probabilities().iter().enumerate() {
            for (k, &p2) in t2.probabilities().iter().enumerate() {
                assert!((joint.probabilities()[[i, k]] - p1 * p2).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bell_state_corner_distribution() {
        let shape = BipartiteShape::new(h(1), h(1)).unwrap();
        let bell = DensityMatrix::from_pure(&PureState::bell(2, 2));
        let joint =
            two_spin_tomogram(&bell, &shape, &EulerAngles::zero(), &EulerAngles::zero()).unwrap();
        let p = joint.probabilities();
        assert!((p[[0, 0]] - 0.5).abs() < 1e-14);
        assert!((p[[1, 1]] - 0.5).abs() < 1e-14);
        assert!(p[[0, 1]].abs() < 1e-14 && p[[1, 0]].abs() < 1e-14);

        let mixed = DensityMatrix::maximally_mixed(4);
        let joint = two_spin_unitary_tomogram(&mixed, &shape, &UnitaryFrame::identity(4)).unwrap();
        for &v in joint.probabilities().iter() {
            assert!((v - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn hadamard_pair_leaves_bell_corners() {
        let shape = BipartiteShape::new(h(1), h(1)).unwrap();
        let bell = DensityMatrix::from_pure(&PureState::bell(2, 2));
        let r = 1.0 / 2.0f64.sqrt();
        let mut hadamard: CMatrix = Array2::zeros((2, 2));
        hadamard[[0, 0]] = Complex64::new(r, 0.0);
        hadamard[[0, 1]] = Complex64::new(r, 0.0);
        hadamard[[1, 0]] = Complex64::new(r, 0.0);
        hadamard[[1, 1]] = Complex64::new(-r, 0.0);
        let hh = UnitaryFrame::new(hadamard).unwrap();
        let frame = hh.kron(&hh);
        let joint = two_spin_unitary_tomogram(&bell, &shape, &frame).unwrap();
        let p = joint.probabilities();
        assert!((p[[0, 0]] - 0.5).abs() < 1e-13);
        assert!((p[[1, 1]] - 0.5).abs() < 1e-13);
        assert!(p[[0, 1]].abs() < 1e-13 && p[[1, 0]].abs() < 1e-13);
    }

    #[test]
    fn joint_unitary_frame_matches_product_of_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let shape = BipartiteShape::new(h(1), h(2)).unwrap();
        let rho = DensityMatrix::random(6, 6, 77).unwrap();
        let (a1, a2) = (random_angles(&mut rng), random_angles(&mut rng));
        let spheres = two_spin_tomogram(&rho, &shape, &a1, &a2).unwrap();
        let frame = UnitaryFrame::from_wigner_d(h(1), &a1)
            .unwrap()
            .kron(&UnitaryFrame::from_wigner_d(h(2), &a2).unwrap());
        let unitary = two_spin_unitary_tomogram(&rho, &shape, &frame).unwrap();
        for (x, y) in spheres
            .probabilities()
            .iter()
            .zip(unitary.probabilities().iter())
        {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_sum_rows_and_columns() {
        let shape = BipartiteShape::new(h(1), h(1)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        let joint =
            two_spin_unitary_tomogram(&mixed, &shape, &UnitaryFrame::identity(4)).unwrap();
        for keep in [Subsystem::First, Subsystem::Second] {
            let m = joint.marginal(keep);
            for &p in m.probabilities() {
                assert!((p - 0.5).abs() < 1e-13);
            }
        }

        let bell = DensityMatrix::from_pure(&PureState::bell(2, 2));
        let joint =
            two_spin_tomogram(&bell, &shape, &EulerAngles::zero(), &EulerAngles::zero()).unwrap();
        for keep in [Subsystem::First, Subsystem::Second] {
            let m = joint.marginal(keep);
            for &p in m.probabilities() {
                assert!((p - 0.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn marginal_of_product_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let shape = BipartiteShape::new(h(2), h(1)).unwrap();
        let rho1 = DensityMatrix::random(3, 3, 4).unwrap();
        let rho2 = DensityMatrix::random(2, 1, 5).unwrap();
        let joint_state = DensityMatrix::tensor_product(&rho1, &rho2);
        let (a1, a2) = (random_angles(&mut rng), random_angles(&mut rng));
        let joint = two_spin_tomogram(&joint_state, &shape, &a1, &a2).unwrap();
        let marginal = joint.marginal(Subsystem::First);
        let direct = spin_tomogram(&rho1, h(2), &a1).unwrap();
        for (x, y) in marginal
            .probabilities()
            .iter()
            .zip(direct.probabilities())
        {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn conditionals() {
        let shape = BipartiteShape::new(h(1), h(1)).unwrap();
        let bell = DensityMatrix::from_pure(&PureState::bell(2, 2));
        let joint =
            two_spin_tomogram(&bell, &shape, &EulerAngles::zero(), &EulerAngles::zero()).unwrap();
        // Given the second spin is up, the first is deterministically up.
        let cond = joint.conditional(Subsystem::Second, h(1)).unwrap();
        assert!((cond.probabilities()[0] - 1.0).abs() < 1e-13);
        assert!(cond.probabilities()[1].abs() < 1e-13);

        // Independence: conditioning does not move the other marginal.
        let rho1 = DensityMatrix::random(2, 2, 6).unwrap();
        let rho2 = DensityMatrix::random(2, 2, 7).unwrap();
        let product = DensityMatrix::tensor_product(&rho1, &rho2);
        let joint = two_spin_unitary_tomogram(&product, &shape, &UnitaryFrame::identity(4))
            .unwrap();
        for outcome in [h(1), h(-1)] {
            let cond = joint.conditional(Subsystem::Second, outcome).unwrap();
            for (p, want) in cond.probabilities().iter().zip(joint.marginal(Subsystem::First).probabilities()) {
                assert!((p - want).abs() < 1e-12);
            }
        }

        // Uniform joint conditions to uniform.
        let mixed = DensityMatrix::maximally_mixed(4);
        let joint =
            two_spin_unitary_tomogram(&mixed, &shape, &UnitaryFrame::identity(4)).unwrap();
        let cond = joint.conditional(Subsystem::First, h(-1)).unwrap();
        for &p in cond.probabilities() {
            assert!((p - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn conditioning_on_zero_probability_is_an_error() {
        let shape = BipartiteShape::new(h(1), h(1)).unwrap();
        let rho = DensityMatrix::from_pure(&PureState::basis_vector(4, 0));
        let joint =
            two_spin_unitary_tomogram(&rho, &shape, &UnitaryFrame::identity(4)).unwrap();
        match joint.conditional(Subsystem::First, h(-1)) {
            Err(Error::ZeroProbabilityCondition { .. }) => {}
            other => panic!("expected zero-probability error, got {other:?}"),
        }
    }

    #[test]
    fn tomograms_are_affine_in_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let j = h(2);
        let rho1 = DensityMatrix::random(3, 3, 10).unwrap();
        let rho2 = DensityMatrix::random(3, 3, 11).unwrap();
        let alpha = 0.3;
        let blended = DensityMatrix::new(
            rho1.entries() * Complex64::new(alpha, 0.0)
                + rho2.entries() * Complex64::new(1.0 - alpha, 0.0),
        )
        .unwrap();
        let a = random_angles(&mut rng);
        let t1 = spin_tomogram(&rho1, j, &a).unwrap();
        let t2 = spin_tomogram(&rho2, j, &a).unwrap();
        let tb = spin_tomogram(&blended, j, &a).unwrap();
        for k in 0..3 {
            let want = alpha * t1.probabilities()[k] + (1.0 - alpha) * t2.probabilities()[k];
            assert!((tb.probabilities()[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_cleanup_rules() {
        // Tiny negatives are clamped.
        let t = SpinTomogram::new(h(1), Frame::Sphere(EulerAngles::zero()), vec![1.0, -1e-12]);
        assert_eq!(t.unwrap().probabilities()[1], 0.0);
        // Large negatives are errors.
        assert!(matches!(
            SpinTomogram::new(h(1), Frame::Sphere(EulerAngles::zero()), vec![1.0, -1e-6]),
            Err(Error::NegativeProbability { .. })
        ));
        // Large deficits are errors.
        assert!(matches!(
            SpinTomogram::new(h(1), Frame::Sphere(EulerAngles::zero()), vec![0.5, 0.4]),
            Err(Error::NotAProbabilityDistribution { .. })
        ));
        // Small deficits renormalize.
        let t = SpinTomogram::new(
            h(1),
            Frame::Sphere(EulerAngles::zero()),
            vec![0.5, 0.5 - 1e-10],
        )
        .unwrap();
        assert!((t.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    // ---- reconstruction ----

    fn round_trip_error(rho: &DensityMatrix, j: HalfInteger, band: u32) -> f64 {
        let quad = quadrature_grid(band).unwrap();
        let recon = reconstruct_density(
            |a: &EulerAngles| spin_tomogram(rho, j, a).unwrap(),
            j,
            &quad,
        )
        .unwrap();
        max_abs_diff(rho.entries(), recon.entries())
    }

    #[test]
    fn reconstruct_pure_up_spin_half() {
        let rho = DensityMatrix::from_pure(&PureState::basis_vector(2, 0));
        assert!(round_trip_error(&rho, h(1), 2) < 1e-10);
    }

    #[test]
    fn reconstruct_maximally_mixed() {
        for tj in [1i64, 2, 3] {
            let j = h(tj);
            let rho = DensityMatrix::maximally_mixed(j.multiplicity());
            assert!(round_trip_error(&rho, j, 2 * tj as u32) < 1e-10);
        }
    }

    #[test]
    fn reconstruct_random_spin_one_state() {
        let rho = DensityMatrix::random(3, 3, 3141).unwrap();
        assert!(round_trip_error(&rho, h(2), 4) < 1e-8);
    }

    #[test]
    fn reconstruct_rejects_small_band_limit() {
        let quad = quadrature_grid(1).unwrap();
        let rho = DensityMatrix::random(3, 3, 1).unwrap();
        let result = reconstruct_density(
            |a: &EulerAngles| spin_tomogram(&rho, h(2), a).unwrap(),
            h(2),
            &quad,
        );
        assert!(matches!(result, Err(Error::BandLimitTooSmall { .. })));
    }
}

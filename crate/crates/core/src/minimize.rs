//! Minimization of the tomographic entropy over the unitary group.
//!
//! The entropy S(U) of the tomogram diag(U†ρU) is bounded below by the
//! von Neumann entropy of ρ, with equality exactly on frames that
//! diagonalize ρ. The minimizer demonstrates that variational statement
//! numerically: multi-start Nelder-Mead descent over the chart
//! U = exp(iH), H Hermitian (n² real parameters), followed by a
//! central-difference gradient polish. The exact spectrum is used as an
//! internal oracle for the target value only — never as a starting
//! point.
//!
//! Degenerate spectra make the minimizing set a manifold, so convergence
//! is declared on the objective value, never on parameter distance.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entropy::{tomographic_entropy, von_neumann_entropy};
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;
use crate::tomography::{unitary_tomogram, UnitaryFrame};
use crate::{Error, Result};

/// Hermitian generator H of the frame U = exp(iH).
///
/// The n² real parameters are the n diagonal entries followed by the
/// real and imaginary parts of the strictly upper-triangular entries in
/// row-major order; the map is smooth and onto U(n).
#[derive(Clone, Debug)]
pub struct UnitaryParametrization {
    n: usize,
    params: Vec<f64>,
}

impl UnitaryParametrization {
    pub fn zero(n: usize) -> Self {
        UnitaryParametrization {
            n,
            params: vec![0.0; n * n],
        }
    }

    pub fn from_params(n: usize, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), n * n, "U(n) needs n² real parameters");
        UnitaryParametrization { n, params }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The generator as an explicit Hermitian matrix.
    pub fn generator(&self) -> CMatrix {
        let n = self.n;
        let mut h: CMatrix = Array2::zeros((n, n));
        for i in 0..n {
            h[[i, i]] = Complex64::new(self.params[i], 0.0);
        }
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                let z = Complex64::new(self.params[k], self.params[k + 1]);
                k += 2;
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
        h
    }

    /// exp(iH) through the Hermitian eigendecomposition of H, which is
    /// unitary to machine precision.
    pub fn to_unitary(&self) -> UnitaryFrame {
        let h = self.generator();
        let (vals, vecs) = linalg::hermitian_eigen(&h);
        let phases = Array2::from_diag(&ndarray::Array1::from(
            vals.iter()
                .map(|&lam| Complex64::from_polar(1.0, lam))
                .collect::<Vec<_>>(),
        ));
        let u = vecs.dot(&phases).dot(&linalg::dagger(&vecs));
        UnitaryFrame::new(u).expect("exp(iH) is unitary")
    }
}

/// Settings for [`minimize`].
#[derive(Clone, Copy, Debug)]
pub struct MinimizeConfig {
    /// Independent starts (the first is the identity frame H = 0).
    pub restarts: usize,
    /// Objective-evaluation budget per restart for the simplex phase.
    pub max_iters: usize,
    /// Convergence gate on best_entropy - S_N.
    pub tol: f64,
    pub seed: u64,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            restarts: 8,
            max_iters: 6000,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// Outcome of a minimization run.
#[derive(Clone, Debug)]
pub struct MinimizationResult {
    pub best_frame: UnitaryFrame,
    /// Minimum tomographic entropy found (nats).
    pub best_entropy: f64,
    /// Exact von Neumann entropy from the spectrum.
    pub von_neumann: f64,
    /// best_entropy - von_neumann, never below -1e-10.
    pub entropy_gap: f64,
    /// Objective evaluations spent across all restarts.
    pub iterations: usize,
    pub restarts_used: usize,
    /// Whether the gap closed to within the configured tolerance.
    pub converged: bool,
}

/// Tomographic entropy of ρ measured in the frame exp(iH).
pub fn entropy_objective(rho: &DensityMatrix, params: &UnitaryParametrization) -> f64 {
    let frame = params.to_unitary();
    let tomogram = unitary_tomogram(rho, &frame).expect("dimensions match by construction");
    tomographic_entropy(&tomogram)
}

/// Minimizes S(exp(iH)) over H by multi-start simplex descent with
/// gradient polishing. Non-convergence is reported through
/// `converged = false` with the best value found, not as an error.
pub fn minimize(rho: &DensityMatrix, config: &MinimizeConfig) -> Result<MinimizationResult> {
    if config.restarts == 0 {
        return Err(Error::NoRestarts);
    }
    let n = rho.dim();
    let dim = n * n;
    let s_n = von_neumann_entropy(rho);

    let objective = |x: &[f64]| {
        entropy_objective(rho, &UnitaryParametrization::from_params(n, x.to_vec()))
    };

    let mut best_x: Option<Vec<f64>> = None;
    let mut best_f = f64::INFINITY;
    let mut evals_total = 0usize;
    let mut restarts_used = 0usize;

    for restart in 0..config.restarts {
        restarts_used = restart + 1;
        // Distinct deterministic sub-seed per restart; results do not
        // depend on how restarts would be scheduled.
        let mut rng = ChaCha8Rng::seed_from_u64(
            config.seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        );
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; dim]
        } else {
            (0..dim).map(|_| 0.8 * standard_normal(&mut rng)).collect()
        };

        let target = s_n + 0.1 * config.tol;
        let (x, f, evals) = nelder_mead(&objective, &start, 0.4, config.max_iters, target);
        evals_total += evals;
        let (x, f, evals) = gradient_polish(&objective, &x, f, target);
        evals_total += evals;

        if f < best_f {
            best_f = f;
            best_x = Some(x);
        }
        if best_f - s_n <= config.tol {
            break;
        }
    }

    let best_params = UnitaryParametrization::from_params(n, best_x.expect("restarts >= 1"));
    let entropy_gap = best_f - s_n;
    Ok(MinimizationResult {
        best_frame: best_params.to_unitary(),
        best_entropy: best_f,
        von_neumann: s_n,
        entropy_gap,
        iterations: evals_total,
        restarts_used,
        converged: entropy_gap <= config.tol,
    })
}

/// Entropies at `samples` random frames exp(iH) with standard Gaussian
/// generator entries; a deterministic frame hash tags every sample.
pub fn entropy_landscape_scan(
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Vec<(u64, f64)> {
    let n = rho.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let params: Vec<f64> = (0..n * n).map(|_| standard_normal(&mut rng)).collect();
            let hash = fnv1a(&params);
            let entropy =
                entropy_objective(rho, &UnitaryParametrization::from_params(n, params));
            (hash, entropy)
        })
        .collect()
}

/// Min/mean/max of one landscape scan.
pub fn landscape_summary(scan: &[(u64, f64)]) -> (f64, f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &(_, s) in scan {
        min = min.min(s);
        max = max.max(s);
        sum += s;
    }
    (min, sum / scan.len().max(1) as f64, max)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// FNV-1a over the parameter bit patterns; stable across runs and
/// platforms for identical inputs.
fn fnv1a(params: &[f64]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for p in params {
        for byte in p.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Standard Nelder-Mead with adaptive-free classic coefficients.
/// Stops on evaluation budget, simplex collapse, or hitting `target`.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_evals: usize,
    target: f64,
) -> (Vec<f64>, f64, usize) {
    let dim = start.len();
    let (alpha, gamma, rho_c, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), f0));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if best <= target || evals >= max_evals || (worst - best) < 1e-13 * (1.0 + best.abs()) {
            return (simplex[0].0.clone(), simplex[0].1, evals);
        }

        // Centroid of all but the worst point.
        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }

        let lerp = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
        };

        let reflected = lerp(&centroid, &simplex[dim].0, -alpha);
        let f_r = eval(&reflected, &mut evals);

        if f_r < simplex[0].1 {
            let expanded = lerp(&centroid, &simplex[dim].0, -gamma);
            let f_e = eval(&expanded, &mut evals);
            simplex[dim] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_r);
        } else {
            let contracted = lerp(&centroid, &simplex[dim].0, rho_c);
            let f_c = eval(&contracted, &mut evals);
            if f_c < simplex[dim].1 {
                simplex[dim] = (contracted, f_c);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = lerp(&best_x, &entry.0, sigma);
                    entry.1 = eval(&entry.0, &mut evals);
                }
            }
        }
    }
}

/// Central-difference steepest descent with backtracking; refines the
/// simplex result to the flat bottom of the basin.
fn gradient_polish(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    f_start: f64,
    target: f64,
) -> (Vec<f64>, f64, usize) {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut fx = f_start;
    let mut evals = 0usize;
    let mut step = 0.5;

    for _ in 0..60 {
        if fx <= target {
            break;
        }
        // 1e-6 relative central differences.
        let h = 1e-6 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let mut grad = vec![0.0; dim];
        let mut norm2 = 0.0;
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            grad[i] = (f(&xp) - f(&xm)) / (2.0 * h);
            evals += 2;
            norm2 += grad[i] * grad[i];
        }
        let norm = norm2.sqrt();
        if norm < 1e-12 {
            break;
        }

        let mut improved = false;
        for _ in 0..40 {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - step * gi / norm)
                .collect();
            let fc = f(&candidate);
            evals += 1;
            if fc < fx - 1e-15 {
                x = candidate;
                fx = fc;
                step *= 1.6;
                improved = true;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    (x, fx, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;

    #[test]
    fn identity_frame_objective_reads_the_diagonal() {
        let rho = DensityMatrix::random(3, 3, 50).unwrap();
        let at_zero = entropy_objective(&rho, &UnitaryParametrization::zero(3));
        let diag: f64 = (0..3)
            .map(|i| {
                let p = rho.entries()[[i, i]].re;
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            })
            .sum();
        assert!((at_zero - diag).abs() < 1e-12);

        // Already diagonal: identity frame gives exactly the von Neumann
        // entropy.
        let diag_rho = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let at_zero = entropy_objective(&diag_rho, &UnitaryParametrization::zero(3));
        assert!((at_zero - von_neumann_entropy(&diag_rho)).abs() < 1e-12);
    }

    #[test]
    fn parametrization_is_unitary_and_smoothly_centered() {
        let p = UnitaryParametrization::from_params(
            2,
            vec![0.3, -0.4, 0.2, 0.7],
        );
        let u = p.to_unitary();
        assert!(crate::linalg::unitarity_deviation(u.matrix()) < 1e-13);
        let id = UnitaryParametrization::zero(3).to_unitary();
        assert!(crate::linalg::max_abs_diff(id.matrix(), &crate::linalg::identity(3)) < 1e-13);
    }

    #[test]
    fn eigenframe_beats_identity_for_rotated_state() {
        let rho = DensityMatrix::random(2, 2, 1234).unwrap();
        let identity_value = entropy_objective(&rho, &UnitaryParametrization::zero(2));
        let eigenframe = UnitaryFrame::from_eigenvectors(&rho);
        let tom = unitary_tomogram(&rho, &eigenframe).unwrap();
        let eigen_value = tomographic_entropy(&tom);
        assert!(eigen_value <= identity_value + 1e-12);
        assert!((eigen_value - von_neumann_entropy(&rho)).abs() < 1e-12);
    }

    #[test]
    fn minimize_reaches_the_spectrum_entropy() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let result = minimize(&rho, &MinimizeConfig::default()).unwrap();
        assert!(result.converged);
        assert!((result.best_entropy - 0.6108643020548935).abs() < 1e-6);
        assert!(result.entropy_gap >= -1e-10);
    }

    #[test]
    fn minimize_pure_states_to_zero() {
        for dim in [2usize, 3, 4] {
            let rho = DensityMatrix::from_pure(&PureState::basis_vector(dim, dim - 1));
            let result = minimize(&rho, &MinimizeConfig::default()).unwrap();
            assert!(result.converged, "dim {dim}: gap {}", result.entropy_gap);
            assert!(result.best_entropy <= 1e-6);
        }
    }

    #[test]
    fn minimize_flat_landscape_converges_immediately() {
        let rho = DensityMatrix::maximally_mixed(3);
        let result = minimize(&rho, &MinimizeConfig::default()).unwrap();
        assert!(result.converged);
        assert_eq!(result.restarts_used, 1);
        assert!((result.best_entropy - 3.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn minimize_is_invariant_under_conjugation() {
        let rho = DensityMatrix::random(3, 3, 910).unwrap();
        let u = UnitaryFrame::from_eigenvectors(&DensityMatrix::random(3, 3, 911).unwrap());
        let rotated = DensityMatrix::new(crate::linalg::conjugate_by(
            rho.entries(),
            u.matrix(),
        ))
        .unwrap();
        let a = minimize(&rho, &MinimizeConfig::default()).unwrap();
        let b = minimize(&rotated, &MinimizeConfig::default()).unwrap();
        assert!((a.best_entropy - b.best_entropy).abs() < 1e-6);
    }

    #[test]
    fn minimize_is_deterministic() {
        let rho = DensityMatrix::random(3, 2, 846).unwrap();
        let config = MinimizeConfig {
            seed: 99,
            ..Default::default()
        };
        let a = minimize(&rho, &config).unwrap();
        let b = minimize(&rho, &config).unwrap();
        assert_eq!(a.best_entropy.to_bits(), b.best_entropy.to_bits());
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.restarts_used, b.restarts_used);
        assert_eq!(
            crate::linalg::max_abs_diff(a.best_frame.matrix(), b.best_frame.matrix()),
            0.0
        );
    }

    #[test]
    fn landscape_scan_respects_the_lower_bound() {
        let rho = DensityMatrix::from_pure(&PureState::basis_vector(2, 0));
        let scan = entropy_landscape_scan(&rho, 100, 5);
        assert_eq!(scan.len(), 100);
        let (min, _, max) = landscape_summary(&scan);
        assert!(min >= -1e-12);
        assert!(max <= 2.0f64.ln() + 1e-12);
        // A random frame almost never lands exactly on the eigenframe.
        assert!(min > 0.0);

        let mixed = DensityMatrix::maximally_mixed(3);
        let scan = entropy_landscape_scan(&mixed, 50, 6);
        for (_, s) in scan {
            assert!((s - 3.0f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn landscape_min_is_close_to_von_neumann_for_many_samples() {
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let scan = entropy_landscape_scan(&rho, 1000, 7);
        let (min, _, _) = landscape_summary(&scan);
        let s_n = 0.3250829733914482;
        assert!(min >= s_n - 1e-10);
        // Empirical smoke bound, not a theorem.
        assert!(min - s_n < 0.05, "empirical min {min} vs S_N {s_n}");
    }

    #[test]
    fn rejects_zero_restarts() {
        let rho = DensityMatrix::maximally_mixed(2);
        let config = MinimizeConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(minimize(&rho, &config).is_err());
    }
}

//! Density matrices: construction, validation, composition and spectra.

use std::fmt;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::half_integer::HalfInteger;
use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

/// Which factor of a bipartite system an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Spins (j₁, j₂) of a bipartite system; the joint basis index is
/// (j₁-m₁)·n₂ + (j₂-m₂), first spin major, m descending within each spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteShape {
    pub j1: HalfInteger,
    pub j2: HalfInteger,
}

impl BipartiteShape {
    pub fn new(j1: HalfInteger, j2: HalfInteger) -> Result<Self> {
        j1.check_spin()?;
        j2.check_spin()?;
        Ok(BipartiteShape { j1, j2 })
    }

    pub fn n1(&self) -> usize {
        self.j1.multiplicity()
    }

    pub fn n2(&self) -> usize {
        self.j2.multiplicity()
    }

    pub fn dim(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

/// Tolerances for the three density-matrix invariants.
///
/// Hand-built states pass the defaults; reconstructed states carry
/// quadrature noise and use a looser uniform gate.
#[derive(Clone, Copy, Debug)]
pub struct ValidationTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    /// Most negative eigenvalue tolerated (as a positive number).
    pub positivity: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        ValidationTolerances {
            hermiticity: 1e-12,
            trace: 1e-12,
            positivity: 1e-10,
        }
    }
}

impl ValidationTolerances {
    pub fn uniform(tol: f64) -> Self {
        ValidationTolerances {
            hermiticity: tol,
            trace: tol,
            positivity: tol,
        }
    }
}

/// One violated invariant with its measured magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Violation {
    /// max |ρ_ij - conj(ρ_ji)|
    Hermiticity(f64),
    /// |Tr ρ - 1|
    Trace(f64),
    /// smallest eigenvalue (negative)
    Positivity(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hermiticity(d) => write!(f, "hermiticity deviation {d:.3e}"),
            Violation::Trace(d) => write!(f, "trace deviation {d:.3e}"),
            Violation::Positivity(e) => write!(f, "negative eigenvalue {e:.3e}"),
        }
    }
}

/// Structured outcome of a failed validation: every violated invariant
/// with its magnitude, plus the raw measurements.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

/// A normalized state vector.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: Array1<Complex64>,
}

impl PureState {
    /// Accepts a vector whose norm deviates from 1 by at most 1e-8 and
    /// stores it renormalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized((norm - 1.0).abs()));
        }
        let amplitudes = Array1::from(amplitudes).mapv(|z| z / norm);
        Ok(PureState { amplitudes })
    }

    pub fn basis_vector(dim: usize, index: usize) -> Self {
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        PureState { amplitudes }
    }

    /// (|0...0⟩ + |1...1⟩)/√2 on an n₁·n₂ product space: the corner Bell
    /// state used throughout the tests.
    pub fn bell(n1: usize, n2: usize) -> Self {
        let dim = n1 * n2;
        let r = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[0] = r;
        amplitudes[dim - 1] = r;
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite within [`ValidationTolerances`].
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Checks all three invariants with default tolerances.
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::validate(entries, &ValidationTolerances::default())
    }

    /// Checks all three invariants; on failure returns a report naming
    /// each violated invariant with its magnitude.
    pub fn validate(entries: CMatrix, tol: &ValidationTolerances) -> Result<Self> {
        assert_eq!(entries.nrows(), entries.ncols(), "density matrix must be square");
        let hermiticity_deviation = linalg::hermiticity_deviation(&entries);
        let trace_deviation = (linalg::trace(&entries) - Complex64::new(1.0, 0.0)).norm();
        let (vals, _) = linalg::hermitian_eigen(&entries);
        let min_eigenvalue = vals.last().copied().unwrap_or(0.0);

        let mut violations = Vec::new();
        if hermiticity_deviation > tol.hermiticity {
            violations.push(Violation::Hermiticity(hermiticity_deviation));
        }
        if trace_deviation > tol.trace {
            violations.push(Violation::Trace(trace_deviation));
        }
        if min_eigenvalue < -tol.positivity {
            violations.push(Violation::Positivity(min_eigenvalue));
        }
        if !violations.is_empty() {
            return Err(Error::Validation(ValidationReport {
                hermiticity_deviation,
                trace_deviation,
                min_eigenvalue,
                violations,
            }));
        }
        Ok(DensityMatrix { entries })
    }

    /// ρ = |ψ⟩⟨ψ|.
    pub fn from_pure(psi: &PureState) -> Self {
        let n = psi.dim();
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                entries[[i, j]] = psi.amplitudes[i] * psi.amplitudes[j].conj();
            }
        }
        DensityMatrix { entries }
    }

    /// I/n.
    pub fn maximally_mixed(dim: usize) -> Self {
        let entries = linalg::identity(dim).mapv(|z| z / dim as f64);
        DensityMatrix { entries }
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let entries = Array2::from_diag(&Array1::from(
            probabilities
                .iter()
                .map(|&p| Complex64::new(p, 0.0))
                .collect::<Vec<_>>(),
        ));
        Self::new(entries)
    }

    /// ρ = GG†/Tr(GG†) with G a dim×rank matrix of standard complex
    /// Gaussian entries from a ChaCha8 stream seeded by `seed`; rank-1
    /// draws are Haar-random pure states, rank = dim is Hilbert-Schmidt.
    pub fn random(dim: usize, rank: usize, seed: u64) -> Result<Self> {
        if rank == 0 || rank > dim {
            return Err(Error::InvalidRank { rank, dim });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Array2::zeros((dim, rank));
        for i in 0..dim {
            for j in 0..rank {
                g[[i, j]] = Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng));
            }
        }
        let gg = g.dot(&linalg::dagger(&g));
        let tr = linalg::trace(&gg).re;
        Ok(DensityMatrix {
            entries: gg.mapv(|z| z / tr),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.entries)
    }

    /// Tr ρ², equal to 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        linalg::trace(&self.entries.dot(&self.entries)).re
    }

    /// Kronecker product in the first-spin-major basis ordering.
    pub fn tensor_product(rho1: &DensityMatrix, rho2: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            entries: linalg::kron(&rho1.entries, &rho2.entries),
        }
    }

    /// Reduced density matrix of one factor of a bipartite state.
    pub fn partial_trace(&self, shape: &BipartiteShape, keep: Subsystem) -> Result<DensityMatrix> {
        shape.check_dim(self.dim())?;
        let (n1, n2) = (shape.n1(), shape.n2());
        let entries = match keep {
            Subsystem::First => {
                let mut out: CMatrix = Array2::zeros((n1, n1));
                for a in 0..n1 {
                    for b in 0..n1 {
                        for k in 0..n2 {
                            out[[a, b]] += self.entries[[a * n2 + k, b * n2 + k]];
                        }
                    }
                }
                out
            }
            Subsystem::Second => {
                let mut out: CMatrix = Array2::zeros((n2, n2));
                for a in 0..n2 {
                    for b in 0..n2 {
                        for k in 0..n1 {
                            out[[a, b]] += self.entries[[k * n2 + a, k * n2 + b]];
                        }
                    }
                }
                out
            }
        };
        Ok(DensityMatrix { entries })
    }

    /// Real eigenvalues in descending order; they sum to Tr ρ = 1.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.entries).0
    }

    /// Eigenvalues (descending) and the unitary whose columns are the
    /// corresponding eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        linalg::hermitian_eigen(&self.entries)
    }
}

/// One standard normal sample by Box-Muller; two uniforms per call keeps
/// the stream layout independent of any distribution-crate version.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

// ---- JSON interchange format (shared with the CLI) ----

/// Serialized density matrix: `dim`, row-major `entries` as [re, im]
/// pairs, optional bipartite `shape` with half-integer spins.
#[derive(Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ShapeJson {
    pub j1: HalfInteger,
    pub j2: HalfInteger,
}

impl StateJson {
    pub fn from_parts(rho: &DensityMatrix, shape: Option<&BipartiteShape>) -> Self {
        StateJson {
            dim: rho.dim(),
            entries: rho.entries().iter().map(|z| [z.re, z.im]).collect(),
            shape: shape.map(|s| ShapeJson { j1: s.j1, j2: s.j2 }),
        }
    }

    /// Raw matrix (not yet validated) plus the optional declared shape.
    pub fn into_parts(self) -> Result<(CMatrix, Option<BipartiteShape>)> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim * self.dim,
                got: self.entries.len(),
            });
        }
        let data: Vec<Complex64> = self
            .entries
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let matrix = Array2::from_shape_vec((self.dim, self.dim), data)
            .expect("length checked above");
        let shape = match self.shape {
            Some(s) => {
                let shape = BipartiteShape::new(s.j1, s.j2)?;
                shape.check_dim(self.dim)?;
                Some(shape)
            }
            None => None,
        };
        Ok((matrix, shape))
    }
}

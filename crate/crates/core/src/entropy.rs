//! Shannon-type entropies and informations for tomograms, and the von
//! Neumann entropy.
//!
//! Everything is in nats. The 0·ln 0 = 0 convention is implemented by
//! branching, never by floating-point limits, so zeros cannot poison
//! sums with NaNs.

use ndarray::Array2;

use crate::state::{DensityMatrix, Subsystem};
use crate::tomography::{JointTomogram, SpinTomogram};
use crate::{Error, Result};

/// -p ln p with 0 ln 0 = 0; tiny negatives from upstream clamping are
/// re-clamped defensively.
#[inline]
fn neg_p_ln_p(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// A checked probability vector (entries in [0,1], sum 1 within 1e-10).
#[derive(Clone, Debug)]
pub struct ProbabilityVector {
    values: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &v) in values.iter().enumerate() {
            if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                return Err(Error::NegativeProbability {
                    index,
                    value: v,
                    tol: 1e-10,
                });
            }
        }
        let deviation = values.iter().sum::<f64>() - 1.0;
        if deviation.abs() > 1e-10 {
            return Err(Error::NotAProbabilityDistribution {
                deviation,
                tol: 1e-10,
            });
        }
        Ok(ProbabilityVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A checked joint probability matrix.
#[derive(Clone, Debug)]
pub struct JointProbabilityMatrix {
    values: Array2<f64>,
}

impl JointProbabilityMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        for (index, &v) in values.iter().enumerate() {
            if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                return Err(Error::NegativeProbability {
                    index,
                    value: v,
                    tol: 1e-10,
                });
            }
        }
        let deviation = values.iter().sum::<f64>() - 1.0;
        if deviation.abs() > 1e-10 {
            return Err(Error::NotAProbabilityDistribution {
                deviation,
                tol: 1e-10,
            });
        }
        Ok(JointProbabilityMatrix { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.values.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn column_marginal(&self) -> Vec<f64> {
        self.values.columns().into_iter().map(|c| c.sum()).collect()
    }
}

/// H(X) = -Σ p ln p.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_of(p.values.iter().copied())
}

fn entropy_of(ps: impl Iterator<Item = f64>) -> f64 {
    ps.map(neg_p_ln_p).sum()
}

/// H(X,Y) over all cells of the joint matrix.
pub fn joint_entropy(p: &JointProbabilityMatrix) -> f64 {
    entropy_of(p.values.iter().copied())
}

/// H(Y|x_i) (or H(X|y_j)): entropy of one normalized slice.
pub fn conditional_entropy_given(
    p: &JointProbabilityMatrix,
    condition_on: Subsystem,
    index: usize,
) -> Result<f64> {
    let slice: Vec<f64> = match condition_on {
        Subsystem::First => p.values.row(index).to_vec(),
        Subsystem::Second => p.values.column(index).to_vec(),
    };
    let total: f64 = slice.iter().sum();
    if total <= 1e-12 {
        return Err(Error::ZeroProbabilityCondition {
            prob: total,
            tol: 1e-12,
        });
    }
    Ok(entropy_of(slice.iter().map(|v| v / total)))
}

/// Complete conditional entropy H(Y|X) = -Σ_{ij} P_ij ln P(y_j|x_i);
/// slices with vanishing marginal contribute 0.
pub fn complete_conditional_entropy(p: &JointProbabilityMatrix, condition_on: Subsystem) -> f64 {
    let marginal = match condition_on {
        Subsystem::First => p.row_marginal(),
        Subsystem::Second => p.column_marginal(),
    };
    let mut acc = 0.0;
    for ((i, j), &v) in p.values.indexed_iter() {
        let m = match condition_on {
            Subsystem::First => marginal[i],
            Subsystem::Second => marginal[j],
        };
        if v > 0.0 && m > 0.0 {
            acc -= v * (v / m).ln();
        }
    }
    acc
}

/// Mutual information I = H(X) + H(Y) - H(X,Y), clamped at 0.
pub fn mutual_information(p: &JointProbabilityMatrix) -> f64 {
    let i = entropy_of(p.row_marginal().into_iter())
        + entropy_of(p.column_marginal().into_iter())
        - joint_entropy(p);
    i.max(0.0)
}

/// Mutual information in the Kullback form
/// Σ P_ij ln[P_ij / (P_i P_j)]; agrees with the entropy-difference form
/// up to rounding and exists for cross-checking it.
pub fn mutual_information_kullback(p: &JointProbabilityMatrix) -> f64 {
    let rows = p.row_marginal();
    let cols = p.column_marginal();
    let mut acc = 0.0;
    for ((i, j), &v) in p.values.indexed_iter() {
        if v > 0.0 {
            acc += v * (v / (rows[i] * cols[j])).ln();
        }
    }
    acc
}

/// Shannon entropy of a tomogram: a function on the sphere for sphere
/// frames and on the unitary group for unitary frames.
pub fn tomographic_entropy(t: &SpinTomogram) -> f64 {
    entropy_of(t.probabilities().iter().copied())
}

/// Shannon entropy of a joint tomogram.
pub fn joint_tomographic_entropy(t: &JointTomogram) -> f64 {
    entropy_of(t.probabilities().iter().copied())
}

/// Entropy of one subsystem's marginal tomogram.
pub fn subsystem_tomographic_entropy(t: &JointTomogram, which: Subsystem) -> f64 {
    entropy_of(t.marginal(which).probabilities().iter().copied())
}

/// Tomographic mutual information I = S₁ + S₂ - S_joint ≥ 0.
///
/// Debug builds cross-check the Kullback form against the
/// entropy-difference form; release builds use only the latter.
pub fn tomographic_mutual_information(t: &JointTomogram) -> f64 {
    let i = subsystem_tomographic_entropy(t, Subsystem::First)
        + subsystem_tomographic_entropy(t, Subsystem::Second)
        - joint_tomographic_entropy(t);
    debug_assert!(
        (i.max(0.0) - tomographic_mutual_information_kullback(t).max(0.0)).abs() < 1e-9,
        "mutual-information forms disagree"
    );
    i.max(0.0)
}

/// Kullback form of the tomographic mutual information.
pub fn tomographic_mutual_information_kullback(t: &JointTomogram) -> f64 {
    let p = t.probabilities();
    let rows: Vec<f64> = p.rows().into_iter().map(|r| r.sum()).collect();
    let cols: Vec<f64> = p.columns().into_iter().map(|c| c.sum()).collect();
    let mut acc = 0.0;
    for ((i, j), &v) in p.indexed_iter() {
        if v > 0.0 {
            acc += v * (v / (rows[i] * cols[j])).ln();
        }
    }
    acc
}

/// Von Neumann entropy S = -Tr ρ ln ρ = -Σ λ ln λ over the spectrum;
/// eigenvalues below 1e-14 count as exact zeros.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.spectrum()
        .iter()
        .map(|&lam| if lam < 1e-14 { 0.0 } else { neg_p_ln_p(lam) })
        .sum()
}

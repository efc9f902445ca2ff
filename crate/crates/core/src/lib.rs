//! Tomographic probability representation of spin states.
//!
//! A spin-j state with density matrix ρ is equivalently described by its
//! *tomogram*: the family of probability distributions ω(m, frame) of the
//! spin projection m measured in a rotated basis. The frame is either a
//! point on the sphere (an SU(2) rotation parametrized by Euler angles) or
//! an arbitrary element of the unitary group U(2j+1).
//!
//! This crate provides
//!
//! - the representation-theoretic machinery behind the map ρ ↔ ω:
//!   Wigner small-d and D matrices, Wigner 3j symbols, and product
//!   quadrature over the Euler-angle manifold ([`wigner`], [`su2`],
//!   [`quadrature`]);
//! - density-matrix construction, validation, tensor products, partial
//!   traces, and Hermitian spectra ([`state`]);
//! - forward tomograms for one and two spins, marginals, conditionals,
//!   and the inverse map reconstructing ρ by integration over the
//!   rotation group ([`tomography`]);
//! - Shannon-type entropies and mutual informations of tomograms together
//!   with the von Neumann entropy ([`entropy`]);
//! - numerical minimization of the tomographic entropy over U(n), whose
//!   minimum is the von Neumann entropy ([`minimize`]).
//!
//! All probability values are natural-log based (nats) unless converted
//! by the caller.

pub mod entropy;
pub mod half_integer;
pub mod linalg;
pub mod minimize;
pub mod quadrature;
pub mod state;
pub mod su2;
pub mod tomography;
pub mod wigner;

pub use half_integer::HalfInteger;
pub use linalg::CMatrix;
pub use quadrature::GroupQuadrature;
pub use state::{BipartiteShape, DensityMatrix, PureState, Subsystem, ValidationReport};
pub use su2::EulerAngles;
pub use tomography::{JointTomogram, SpinTomogram, UnitaryFrame};

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("theta must lie in [0, pi], got {0}")]
    ThetaOutOfRange(f64),

    #[error("spin j must be non-negative, got {0}")]
    NegativeSpin(HalfInteger),

    #[error("invalid projection m = {m} for spin j = {j}")]
    InvalidProjection { j: HalfInteger, m: HalfInteger },

    #[error("spin too large: 2j = {0} exceeds the supported maximum of 400")]
    SpinTooLarge(i64),

    #[error("cannot parse {0:?} as a half-integer (expected e.g. \"2\", \"1/2\", \"-3/2\")")]
    ParseHalfInteger(String),

    #[error("state validation failed: {0}")]
    Validation(#[from] ValidationReport),

    #[error("vector norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),

    #[error("rank must satisfy 1 <= rank <= dim, got rank {rank} for dim {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("matrix is not unitary: max |U\u{2020}U - I| = {0:.3e}")]
    NotUnitary(f64),

    #[error("quadrature grid would need {nodes} nodes, exceeding the cap of {cap}")]
    QuadratureTooLarge { nodes: u128, cap: u64 },

    #[error("band limit {got} is below the minimum {required} needed for spin j = {j}")]
    BandLimitTooSmall {
        required: u32,
        got: u32,
        j: HalfInteger,
    },

    #[error("probability {value:.6e} at index {index} is below the -{tol:.0e} noise floor")]
    NegativeProbability {
        index: usize,
        value: f64,
        tol: f64,
    },

    #[error("probabilities sum to 1{sign}{deviation:.3e}, outside the {tol:.0e} tolerance",
            sign = if *.deviation >= 0.0 { "+" } else { "-" },
            deviation = .deviation.abs())]
    NotAProbabilityDistribution { deviation: f64, tol: f64 },

    #[error("conditioning outcome has probability {prob:.3e}, at or below the {tol:.0e} floor")]
    ZeroProbabilityCondition { prob: f64, tol: f64 },

    #[error("restarts must be >= 1")]
    NoRestarts,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Dense statevector simulation with oracle query accounting.
//!
//! One query is one application of any unitary whose action depends
//! pointwise on the oracle table: the mod-4 adder, a `+-1` phase, or a
//! generalized phase on the marked set. Only the functions in [`oracle`]
//! and the routines built on them touch the query counter.

mod amplify;
mod measure;
mod oracle;
mod state;

pub use amplify::{construct_signed_state, exact_iterations, grover_budget, grover_exact};
pub use measure::{
    basis_distribution, complete_basis, measure_in_basis, measure_projective, measure_register,
    pick_outcome, register_distribution, MeasureMode, MeasurementBasis, Outcome,
};
pub use oracle::{
    encode_answer, kickback, kickback_ancilla, oracle_marked_phase, oracle_phase, oracle_xor4,
    oracle_xor4_inverse, QueryOracle,
};
pub use state::{hadamard, StateVector, MAX_AMPLITUDES};

use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Norm drift allowed by every norm-preserving operation.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Unitarity / orthonormality tolerance for caller-supplied matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Amplitudes below this magnitude are outside a state's support.
pub const SUPPORT_EPS: f64 = 1e-9;
/// Smallest probability a forced measurement branch may have.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("state of {0} amplitudes exceeds the cap of {MAX_AMPLITUDES}")]
    TooLarge(usize),
    #[error("register dimensions must be at least 1")]
    EmptyRegister,
    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("basis is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("register {0} does not exist")]
    NoSuchRegister(usize),
    #[error("index {index} outside dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("oracle value {0} is not in {{-1, 0, +1}}")]
    NonTernary(i8),
    #[error("sign oracle has f({0}) = 0 on the state's support")]
    ZeroOnSupport(usize),
    #[error("index {0} on the state's support lies outside the oracle domain")]
    OutsideDomain(usize),
    #[error("oracle domain {domain} is larger than the register dimension {dim}")]
    DomainTooLarge { domain: usize, dim: usize },
    #[error("forced outcome {index} has probability {probability:e}")]
    ImpossibleBranch { index: usize, probability: f64 },
    #[error("register is not in a product state with the expected ancilla (leakage {0:e})")]
    Entangled(f64),
    #[error("marked count must satisfy 1 <= k <= n, got k = {k}, n = {n}")]
    BadMarkedCount { n: usize, k: usize },
    #[error(
        "amplification ended {0:e} away from the predicted state; k does not match the oracle"
    )]
    AmplificationMismatch(f64),
}

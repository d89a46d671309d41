//! Query-complexity laboratory for weighing-matrix and shifted-Legendre
//! black-box problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: exact arithmetic in `F_{p^k}` and the quadratic character.
//! - [`designs`]: ternary matrices, exact weighing-matrix certification,
//!   Sylvester / Paley / tensor constructions, the Legendre matrix.
//! - [`qsim`]: a dense statevector simulator with a query-counting oracle,
//!   the phase kick-back gadget and exact amplitude amplification.
//! - [`protocols`]: end-to-end quantum and classical solvers, classical
//!   lower bounds and exhaustive optimal decision trees.
//! - [`cli`]: the `wmlab` command-line front end.

pub mod cli;
pub mod designs;
pub mod field;
pub mod protocols;
pub mod qsim;

pub use designs::{TernaryMatrix, WeighingCertificate};
pub use field::{FieldElement, FieldSpec};
pub use protocols::{BoundsReport, RunMode, RunReport};
pub use qsim::{QueryOracle, StateVector};

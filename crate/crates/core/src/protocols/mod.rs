//! End-to-end query protocols and the classical bound machinery.
//!
//! Every solver returns a [`RunReport`]. Quantum runs are simulated on a
//! [`StateVector`](crate::StateVector); classical runs query the same
//! counting [`QueryOracle`](crate::QueryOracle).

mod bounds;
mod bv;
mod sls;
mod tree;
mod wm;

pub use bounds::{
    classical_bounds, corollary_family, sls_bounds, table_rows, BoundsReport, FamilyRow,
    SlsBoundsReport, TableRow, ASYMPTOTIC_ROWS, MAX_FAMILY_DIMENSION,
};
pub use bv::{bv_recover, MAX_BV_BITS};
pub use sls::{
    sls_classical, sls_classical_all, sls_classical_budget, sls_quantum, BranchReport,
    SlsClassicalRun, SlsQuantumRun, SlsQuantumSolver, SlsRound, MAX_SLS_CLASSICAL_Q,
    MAX_SLS_QUANTUM_Q,
};
pub use tree::{matrix_family, optimal_tree, sls_family, DecisionTree, QueryPath, MAX_TREE_FAMILY};
pub use wm::{wm_budget, wm_recover};

use serde::Serialize;
use thiserror::Error;

use crate::designs::DesignError;
use crate::field::FieldError;
use crate::qsim::QsimError;

/// Success probability counted as certain.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("{what} = {value} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("hidden parameter {s} is outside 0..{range}")]
    HiddenOutOfRange { s: usize, range: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("family members {a} and {b} have identical tables")]
    Indistinguishable { a: usize, b: usize },
    #[error("family tables have different lengths ({expected} and {found})")]
    RaggedFamily { expected: usize, found: usize },
    #[error("candidate set shrank from {before} to {after}, not below 3/4")]
    SlowShrink { before: usize, after: usize },
    #[error("protocol failed: {0}")]
    Failed(String),
}

/// How the final measurement of a quantum run is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunMode {
    /// Follow every branch and report exact probabilities.
    #[default]
    Full,
    /// Sample each measurement from a seeded stream.
    Sample(u64),
}

impl RunMode {
    pub fn seed(&self) -> Option<u64> {
        match self {
            RunMode::Full => None,
            RunMode::Sample(seed) => Some(*seed),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Parameters {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub q: Option<usize>,
    pub t: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub protocol: String,
    pub parameters: Parameters,
    pub hidden_s: usize,
    pub recovered_s: usize,
    pub queries_used: u64,
    pub query_budget: u64,
    pub success_probability: f64,
    pub branch_taken: String,
    pub seed: Option<u64>,
}

impl RunReport {
    /// Correct outcome with certainty and within budget.
    pub fn is_exact(&self) -> bool {
        self.recovered_s == self.hidden_s
            && (self.success_probability - 1.0).abs() <= EXACT_TOLERANCE
            && self.queries_used <= self.query_budget
    }

    /// Column names matching [`RunReport::csv_record`].
    pub const CSV_HEADER: [&'static str; 12] = [
        "protocol",
        "n",
        "k",
        "q",
        "t",
        "hidden_s",
        "recovered_s",
        "queries_used",
        "query_budget",
        "success_probability",
        "branch_taken",
        "seed",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        vec![
            self.protocol.clone(),
            opt(&self.parameters.n),
            opt(&self.parameters.k),
            opt(&self.parameters.q),
            opt(&self.parameters.t),
            self.hidden_s.to_string(),
            self.recovered_s.to_string(),
            self.queries_used.to_string(),
            self.query_budget.to_string(),
            format!("{:.12}", self.success_probability),
            self.branch_taken.clone(),
            opt(&self.seed),
        ]
    }
}

/// Index of the largest entry, smallest index on ties.
pub(crate) fn argmax(dist: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p > dist[best] + 1e-15 {
            best = i;
        }
    }
    best
}

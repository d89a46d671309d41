//! Shifted Legendre sequence: recover `s` from `f(i) = chi(i + s)`.
//!
//! Indices and shifts are field elements named by their rank.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{argmax, Parameters, ProtocolError, RunMode, RunReport};
use crate::field::{ChiTable, FieldSpec};
use crate::qsim::{
    basis_distribution, complete_basis, measure_projective, oracle_xor4, oracle_xor4_inverse,
    pick_outcome, register_distribution, CMatrix, MeasureMode, MeasurementBasis, QueryOracle,
    StateVector,
};

pub const MAX_SLS_QUANTUM_Q: usize = 1 << 11;
pub const MAX_SLS_CLASSICAL_Q: usize = 1 << 16;

const QUANTUM_BUDGET: u64 = 2;

fn sls_oracle(chi: &ChiTable, s: usize) -> Result<QueryOracle, ProtocolError> {
    Ok(QueryOracle::new(
        (0..chi.q()).map(|i| chi.shifted(i, s)).collect(),
    )?)
}

fn params(field: &FieldSpec) -> Parameters {
    Parameters {
        n: Some(field.q()),
        q: Some(field.q()),
        t: Some(field.k()),
        ..Parameters::default()
    }
}

fn check_hidden(q: usize, s: usize) -> Result<(), ProtocolError> {
    if s >= q {
        return Err(ProtocolError::HiddenOutOfRange { s, range: q });
    }
    Ok(())
}

/// One measurement branch of the two-query protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    /// `"early"` when the answer register read 0, `"two-query"` otherwise.
    pub label: String,
    pub probability: f64,
    pub recovered_s: usize,
    /// Probability of reading the correct shift within this branch.
    pub success_probability: f64,
    pub queries_used: u64,
    /// Weight on the basis-completion vector; `None` on the early branch.
    pub filler_probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlsQuantumRun {
    pub report: RunReport,
    pub branches: Vec<BranchReport>,
}

/// Two-query quantum solver with the field's character table and the
/// measurement basis `{psi_r} + filler` built once.
pub struct SlsQuantumSolver<'a> {
    field: &'a FieldSpec,
    chi: ChiTable,
    basis: MeasurementBasis,
}

impl<'a> SlsQuantumSolver<'a> {
    pub fn new(field: &'a FieldSpec) -> Result<Self, ProtocolError> {
        let q = field.q();
        if q > MAX_SLS_QUANTUM_Q {
            return Err(ProtocolError::TooLarge {
                what: "q",
                value: q as u64,
                cap: MAX_SLS_QUANTUM_Q as u64,
            });
        }
        let chi = field.chi_table();
        let scale = 1.0 / (q as f64).sqrt();
        let psi: Vec<Vec<Complex64>> = (0..q)
            .map(|r| {
                let mut v: Vec<Complex64> = (0..q)
                    .map(|i| Complex64::new(chi.shifted(i, r) as f64 * scale, 0.0))
                    .collect();
                v.push(Complex64::new(scale, 0.0));
                v
            })
            .collect();
        let basis = complete_basis(&psi, q + 1)?;
        Ok(SlsQuantumSolver { field, chi, basis })
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    fn branch(
        &self,
        s: usize,
        first: MeasureMode,
        last: RunMode,
    ) -> Result<BranchReport, ProtocolError> {
        let q = self.chi.q();
        let dummy = q;
        let mut oracle = sls_oracle(&self.chi, s)?;
        let amp = Complex64::new(1.0 / ((q + 1) as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); (q + 1) * 4];
        for i in 0..q {
            amps[i * 4] = amp;
        }
        amps[dummy * 4 + 1] = amp;
        let mut state = StateVector::from_amplitudes(&[q + 1, 4], amps)?;

        oracle_xor4(&mut state, &mut oracle, 0, 1)?;
        let answer = measure_projective(&state, 1, |a| a != 0, first)?;

        if answer.index == 0 {
            // only i = -s has f(i) = 0
            let dist = register_distribution(&answer.state, 0)?;
            let value = resolve(&dist, last)?;
            if value >= q {
                return Err(ProtocolError::Failed(
                    "early branch collapsed onto the dummy index".into(),
                ));
            }
            let recovered_s = self.chi.neg(value);
            return Ok(BranchReport {
                label: "early".into(),
                probability: answer.probability,
                recovered_s,
                success_probability: dist[self.chi.neg(s)],
                queries_used: oracle.queries(),
                filler_probability: None,
            });
        }

        let mut state = answer.state;
        let flip = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        state.apply_unitary(&flip, 1)?;
        oracle_xor4_inverse(&mut state, &mut oracle, 0, 1)?;
        let mut swap = CMatrix::identity(4, 4);
        swap.swap_rows(0, 1);
        state.apply_controlled(0, dummy, &swap, 1)?;
        let state = state.drop_register(1, 0)?;

        let dist = basis_distribution(&state, &self.basis)?;
        let recovered_s = resolve(&dist, last)?;
        if recovered_s >= q {
            return Err(ProtocolError::Failed(
                "measurement hit the filler vector".into(),
            ));
        }
        Ok(BranchReport {
            label: "two-query".into(),
            probability: answer.probability,
            recovered_s,
            success_probability: dist[s],
            queries_used: oracle.queries(),
            filler_probability: Some(dist[q]),
        })
    }

    /// Full mode follows both outcomes of the answer-register measurement,
    /// each on a fresh oracle, and reports the total success probability.
    pub fn run(&self, hidden_s: usize, mode: RunMode) -> Result<SlsQuantumRun, ProtocolError> {
        let q = self.chi.q();
        check_hidden(q, hidden_s)?;
        let branches = match mode {
            RunMode::Full => vec![
                self.branch(hidden_s, MeasureMode::Branch(0), RunMode::Full)?,
                self.branch(hidden_s, MeasureMode::Branch(1), RunMode::Full)?,
            ],
            RunMode::Sample(seed) => vec![self.branch(
                hidden_s,
                MeasureMode::Sample(seed),
                RunMode::Sample(seed.wrapping_add(1)),
            )?],
        };
        let (recovered_s, success_probability, branch_taken) = match mode {
            RunMode::Full => {
                let likely = branches
                    .iter()
                    .max_by(|a, b| a.probability.total_cmp(&b.probability))
                    .expect("two branches");
                let total = branches
                    .iter()
                    .map(|b| b.probability * b.success_probability)
                    .sum();
                (likely.recovered_s, total, "both".to_string())
            }
            RunMode::Sample(_) => (
                branches[0].recovered_s,
                branches[0].success_probability,
                branches[0].label.clone(),
            ),
        };
        let report = RunReport {
            protocol: "sls-quantum".into(),
            parameters: params(self.field),
            hidden_s,
            recovered_s,
            queries_used: branches.iter().map(|b| b.queries_used).max().unwrap_or(0),
            query_budget: QUANTUM_BUDGET,
            success_probability,
            branch_taken,
            seed: mode.seed(),
        };
        Ok(SlsQuantumRun { report, branches })
    }
}

fn resolve(dist: &[f64], mode: RunMode) -> Result<usize, ProtocolError> {
    Ok(match mode {
        RunMode::Full => argmax(dist),
        RunMode::Sample(seed) => pick_outcome(dist, MeasureMode::Sample(seed))?,
    })
}

/// Two-query quantum protocol for one hidden shift.
pub fn sls_quantum(
    field: &FieldSpec,
    hidden_s: usize,
    mode: RunMode,
) -> Result<SlsQuantumRun, ProtocolError> {
    SlsQuantumSolver::new(field)?.run(hidden_s, mode)
}

/// One adaptive query of the classical solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlsRound {
    /// `|S|` before the query.
    pub candidates: usize,
    pub index: usize,
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
    pub answer: i8,
    /// `|S|` after the query.
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlsClassicalRun {
    pub report: RunReport,
    pub rounds: Vec<SlsRound>,
    /// `(candidate, answer of f(-candidate))` for each endgame check.
    pub checks: Vec<(usize, i8)>,
}

/// `ceil(log q / log(4/3)) + 3`.
pub fn sls_classical_budget(q: usize) -> u64 {
    ((q as f64).ln() / (4.0f64 / 3.0).ln() - 1e-9)
        .ceil()
        .max(0.0) as u64
        + 3
}

/// Partition sizes `(plus, minus, zero)` of `S` under `c -> chi(i + c)`.
fn split(chi: &ChiTable, set: &[usize], i: usize) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for &c in set {
        match chi.shifted(i, c) {
            1 => counts.0 += 1,
            -1 => counts.1 += 1,
            _ => counts.2 += 1,
        }
    }
    counts
}

fn classical_run(
    field: &FieldSpec,
    chi: &ChiTable,
    hidden_s: usize,
) -> Result<SlsClassicalRun, ProtocolError> {
    let q = chi.q();
    check_hidden(q, hidden_s)?;
    let mut oracle = sls_oracle(chi, hidden_s)?;
    let mut set: Vec<usize> = (0..q).collect();
    let mut rounds = Vec::new();
    let mut checks = Vec::new();
    let mut found = None;
    let mut label = "";

    while set.len() >= 4 {
        let mut best = (usize::MAX, 0, (0, 0, 0));
        for i in 0..q {
            let counts = split(chi, &set, i);
            let worst = counts.0.max(counts.1);
            if worst < best.0 {
                best = (worst, i, counts);
            }
        }
        let (_, i, (plus, minus, zero)) = best;
        let answer = oracle.query(i)?;
        let before = set.len();
        if answer == 0 {
            found = Some(chi.neg(i));
            label = "zero-hit";
        } else {
            set.retain(|&c| chi.shifted(i, c) == answer);
        }
        rounds.push(SlsRound {
            candidates: before,
            index: i,
            plus,
            minus,
            zero,
            answer,
            remaining: if answer == 0 { 1 } else { set.len() },
        });
        if found.is_some() {
            break;
        }
        if 4 * set.len() >= 3 * before {
            return Err(ProtocolError::SlowShrink {
                before,
                after: set.len(),
            });
        }
        debug_assert!(set.contains(&hidden_s));
    }

    if found.is_none() {
        if set.len() == 1 {
            found = Some(set[0]);
            label = "singleton";
        } else {
            for (pos, &c) in set.iter().enumerate() {
                if pos + 1 == set.len() {
                    found = Some(c);
                    label = "endgame-elimination";
                    break;
                }
                let answer = oracle.query(chi.neg(c))?;
                checks.push((c, answer));
                if answer == 0 {
                    found = Some(c);
                    label = "endgame-hit";
                    break;
                }
            }
        }
    }
    let recovered_s = found.ok_or_else(|| ProtocolError::Failed("empty candidate set".into()))?;
    let report = RunReport {
        protocol: "sls-classical".into(),
        parameters: params(field),
        hidden_s,
        recovered_s,
        queries_used: oracle.queries(),
        query_budget: sls_classical_budget(q),
        success_probability: if recovered_s == hidden_s { 1.0 } else { 0.0 },
        branch_taken: label.into(),
        seed: None,
    };
    Ok(SlsClassicalRun {
        report,
        rounds,
        checks,
    })
}

/// Deterministic classical solver: query the index whose answer splits the
/// candidate set most evenly, then check the last few candidates `c` by
/// querying `f(-c)`.
pub fn sls_classical(field: &FieldSpec, hidden_s: usize) -> Result<SlsClassicalRun, ProtocolError> {
    if field.q() > MAX_SLS_CLASSICAL_Q {
        return Err(ProtocolError::TooLarge {
            what: "q",
            value: field.q() as u64,
            cap: MAX_SLS_CLASSICAL_Q as u64,
        });
    }
    classical_run(field, &field.chi_table(), hidden_s)
}

/// Classical runs for every shift, sharing one character table.
pub fn sls_classical_all(field: &FieldSpec) -> Result<Vec<SlsClassicalRun>, ProtocolError> {
    if field.q() > MAX_SLS_CLASSICAL_Q {
        return Err(ProtocolError::TooLarge {
            what: "q",
            value: field.q() as u64,
            cap: MAX_SLS_CLASSICAL_Q as u64,
        });
    }
    let chi = field.chi_table();
    (0..field.q())
        .map(|s| classical_run(field, &chi, s))
        .collect()
}

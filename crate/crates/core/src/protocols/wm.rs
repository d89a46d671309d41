use num_complex::Complex64;

use super::{argmax, Parameters, ProtocolError, RunMode, RunReport};
use crate::designs::{DesignError, TernaryMatrix};
use crate::qsim::{construct_signed_state, grover_budget, pick_outcome, MeasureMode, QueryOracle};

/// Query budget for a `W(n, k)` instance: `ceil(pi/4 sqrt(n/k)) + 1`, or a
/// single query when `k = n`.
pub fn wm_budget(n: usize, k: usize) -> u64 {
    if k == n {
        1
    } else {
        grover_budget(n, k) + 1
    }
}

/// Outcome probabilities of measuring in `{ M[r] / sqrt(k) }`.
fn row_distribution(m: &TernaryMatrix, k: usize, amps: &[Complex64]) -> Vec<f64> {
    let scale = 1.0 / k as f64;
    m.rows()
        .map(|row| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&e, a) in row.iter().zip(amps) {
                match e {
                    1 => acc += a,
                    -1 => acc -= a,
                    _ => {}
                }
            }
            acc.norm_sqr() * scale
        })
        .collect()
}

/// Recovers the hidden row `s` of a certified weighing matrix from the
/// oracle `f(i) = M[s][i]`.
///
/// The matrix is trusted to carry a verified weight; an uncertified matrix
/// is rejected.
pub fn wm_recover(
    m: &TernaryMatrix,
    hidden_s: usize,
    mode: RunMode,
) -> Result<RunReport, ProtocolError> {
    let k = m.claimed_weight().ok_or(DesignError::Unverified)?;
    let n = m.n();
    if hidden_s >= n {
        return Err(ProtocolError::HiddenOutOfRange {
            s: hidden_s,
            range: n,
        });
    }
    let mut oracle = QueryOracle::from_matrix_row(m, hidden_s)?;
    let (psi, queries_used) = construct_signed_state(&mut oracle, n, k)?;
    let dist = row_distribution(m, k, psi.amplitudes());
    let recovered_s = match mode {
        RunMode::Full => argmax(&dist),
        RunMode::Sample(seed) => pick_outcome(&dist, MeasureMode::Sample(seed))?,
    };
    Ok(RunReport {
        protocol: "wm".into(),
        parameters: Parameters {
            n: Some(n),
            k: Some(k),
            ..Parameters::default()
        },
        hidden_s,
        recovered_s,
        queries_used,
        query_budget: wm_budget(n, k),
        success_probability: dist[hidden_s],
        branch_taken: "single".into(),
        seed: mode.seed(),
    })
}

use super::{argmax, Parameters, ProtocolError, RunMode, RunReport};
use crate::qsim::{hadamard, kickback, pick_outcome, MeasureMode, QueryOracle, StateVector};

pub const MAX_BV_BITS: u32 = 12;

/// Bernstein-Vazirani: recovers the mask `s` from the phase oracle
/// `(-1)^{<x, s>}` with one kick-back query between two Hadamard layers.
///
/// Bit `j` of an integer index is qubit `n_bits - 1 - j`, so the integer
/// value of the measured register is the mask itself.
pub fn bv_recover(n_bits: u32, hidden_s: usize, mode: RunMode) -> Result<RunReport, ProtocolError> {
    if n_bits == 0 {
        return Err(ProtocolError::BadParameter(
            "n_bits must be at least 1".into(),
        ));
    }
    if n_bits > MAX_BV_BITS {
        return Err(ProtocolError::TooLarge {
            what: "n_bits",
            value: n_bits as u64,
            cap: MAX_BV_BITS as u64,
        });
    }
    let n = 1usize << n_bits;
    if hidden_s >= n {
        return Err(ProtocolError::HiddenOutOfRange {
            s: hidden_s,
            range: n,
        });
    }
    let table = (0..n)
        .map(|x| {
            if (x & hidden_s).count_ones() % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut oracle = QueryOracle::new(table)?;
    let dims = vec![2; n_bits as usize];
    let mut psi = StateVector::uniform(&dims)?;
    kickback(&mut psi, &mut oracle)?;
    let h = hadamard();
    for q in 0..dims.len() {
        psi.apply_unitary(&h, q)?;
    }
    let dist: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let recovered_s = match mode {
        RunMode::Full => argmax(&dist),
        RunMode::Sample(seed) => pick_outcome(&dist, MeasureMode::Sample(seed))?,
    };
    Ok(RunReport {
        protocol: "bv".into(),
        parameters: Parameters {
            n: Some(n),
            k: Some(n),
            t: Some(n_bits),
            ..Parameters::default()
        },
        hidden_s,
        recovered_s,
        queries_used: oracle.queries(),
        query_budget: 1,
        success_probability: dist[hidden_s],
        branch_taken: "single".into(),
        seed: mode.seed(),
    })
}

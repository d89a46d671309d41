use num_complex::Complex64;

use super::{QsimError, StateVector, SUPPORT_EPS};
use crate::designs::TernaryMatrix;

/// Ternary black box over `{0..n-1}` with a monotone query counter.
///
/// The table is private: callers learn about it only through [`query`]
/// or the quantum oracle operations in this module, each of which costs
/// exactly one query. There is no way to reset the counter.
///
/// [`query`]: QueryOracle::query
#[derive(Debug)]
pub struct QueryOracle {
    table: Vec<i8>,
    queries: u64,
}

impl QueryOracle {
    pub fn new(table: Vec<i8>) -> Result<Self, QsimError> {
        if let Some(&bad) = table.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(QsimError::NonTernary(bad));
        }
        Ok(QueryOracle { table, queries: 0 })
    }

    /// `f(i) = M[row][i]`.
    pub fn from_matrix_row(m: &TernaryMatrix, row: usize) -> Result<Self, QsimError> {
        if row >= m.n() {
            return Err(QsimError::IndexOutOfRange {
                index: row,
                dim: m.n(),
            });
        }
        Self::new(m.row(row).to_vec())
    }

    pub fn domain(&self) -> usize {
        self.table.len()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Classical query.
    pub fn query(&mut self, i: usize) -> Result<i8, QsimError> {
        let v = *self.table.get(i).ok_or(QsimError::IndexOutOfRange {
            index: i,
            dim: self.table.len(),
        })?;
        self.queries += 1;
        Ok(v)
    }

    fn value(&self, i: usize) -> Option<i8> {
        self.table.get(i).copied()
    }

    fn charge(&mut self) {
        self.queries += 1;
    }
}

/// `enc(+1) = 1`, `enc(0) = 0`, `enc(-1) = 3`: the value added mod 4.
pub fn encode_answer(v: i8) -> usize {
    v.rem_euclid(4) as usize
}

fn xor4(
    state: &mut StateVector,
    oracle: &mut QueryOracle,
    main: usize,
    answer: usize,
    sign: isize,
) -> Result<(), QsimError> {
    let dims = state.dims().to_vec();
    let main_dim = *dims.get(main).ok_or(QsimError::NoSuchRegister(main))?;
    let ans_dim = *dims.get(answer).ok_or(QsimError::NoSuchRegister(answer))?;
    if main == answer {
        return Err(QsimError::NoSuchRegister(answer));
    }
    if ans_dim != 4 {
        return Err(QsimError::DimensionMismatch {
            expected: 4,
            found: ans_dim,
        });
    }
    if oracle.domain() > main_dim {
        return Err(QsimError::DomainTooLarge {
            domain: oracle.domain(),
            dim: main_dim,
        });
    }
    let ans_stride: usize = dims[answer + 1..].iter().product();
    let old = state.amplitudes().to_vec();
    let amps = state.amplitudes_mut();
    amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    for (j, &a) in old.iter().enumerate() {
        let i = state_register_value(&dims, j, main);
        let shift = match oracle.value(i) {
            Some(v) => encode_answer(v) as isize * sign,
            None => 0,
        };
        let cur = (j / ans_stride) % 4;
        let new = (cur as isize + shift).rem_euclid(4) as usize;
        let target = j + new * ans_stride - cur * ans_stride;
        amps[target] += a;
    }
    oracle.charge();
    Ok(())
}

fn state_register_value(dims: &[usize], joint: usize, register: usize) -> usize {
    let stride: usize = dims[register + 1..].iter().product();
    (joint / stride) % dims[register]
}

/// `|i>|a> -> |i>|a + enc(f(i)) mod 4>`. Main-register values outside the
/// oracle domain are left untouched. One query.
pub fn oracle_xor4(
    state: &mut StateVector,
    oracle: &mut QueryOracle,
    main: usize,
    answer: usize,
) -> Result<(), QsimError> {
    xor4(state, oracle, main, answer, 1)
}

/// Inverse of [`oracle_xor4`]: subtracts `enc(f(i))` mod 4. One query.
pub fn oracle_xor4_inverse(
    state: &mut StateVector,
    oracle: &mut QueryOracle,
    main: usize,
    answer: usize,
) -> Result<(), QsimError> {
    xor4(state, oracle, main, answer, -1)
}

/// Multiplies the amplitude at joint index `i` by `e^{i phi}` where
/// `f(i) = -1`; indices with `f(i) = +1`, `f(i) = 0` or outside the domain
/// are unchanged. One query.
pub fn oracle_phase(
    state: &mut StateVector,
    oracle: &mut QueryOracle,
    phi: f64,
) -> Result<(), QsimError> {
    let phase = Complex64::from_polar(1.0, phi);
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if oracle.value(i) == Some(-1) {
            *a *= phase;
        }
    }
    oracle.charge();
    Ok(())
}

/// Multiplies the amplitude at joint index `i` by `e^{i phi}` wherever
/// `f(i) != 0`. One query.
pub fn oracle_marked_phase(
    state: &mut StateVector,
    oracle: &mut QueryOracle,
    phi: f64,
) -> Result<(), QsimError> {
    let phase = Complex64::from_polar(1.0, phi);
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if matches!(oracle.value(i), Some(v) if v != 0) {
            *a *= phase;
        }
    }
    oracle.charge();
    Ok(())
}

/// `(|0> + i|1> - |2> - i|3>) / 2`, the eigenvector of "add 1 mod 4" with
/// eigenvalue `-i`.
pub fn kickback_ancilla() -> [Complex64; 4] {
    [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.5, 0.0),
        Complex64::new(0.0, -0.5),
    ]
}

/// Sign flip `sum a_i |i> -> sum f(i) a_i |i>` over the joint index, built
/// from one [`oracle_xor4`] call on an attached ancilla followed by the
/// global phase `i`. Requires `f = +-1` on the state's support.
pub fn kickback(state: &mut StateVector, oracle: &mut QueryOracle) -> Result<(), QsimError> {
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm() <= SUPPORT_EPS {
            continue;
        }
        match oracle.value(i) {
            None => return Err(QsimError::OutsideDomain(i)),
            Some(0) => return Err(QsimError::ZeroOnSupport(i)),
            Some(_) => {}
        }
    }
    let dims = state.dims().to_vec();
    let mut flat = state.clone();
    flat.reshape(&[state.len()])?;
    let ancilla = kickback_ancilla();
    let mut joined = flat.append_register(&ancilla)?;
    oracle_xor4(&mut joined, oracle, 0, 1)?;
    joined.apply_global_phase(Complex64::new(0.0, 1.0));
    let mut out = joined.detach_last(&ancilla)?;
    out.reshape(&dims)?;
    *state = out;
    Ok(())
}

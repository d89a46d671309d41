use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::gram_deviation;
use super::{CMatrix, QsimError, StateVector, MIN_BRANCH_PROBABILITY, UNITARY_TOLERANCE};
use crate::designs::{DesignError, TernaryMatrix};

/// How a measurement picks its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    /// Draw from the outcome distribution with a ChaCha8 stream seeded here.
    Sample(u64),
    /// Force the named outcome and report its exact probability.
    Branch(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    /// Post-measurement state, renormalized.
    pub state: StateVector,
}

/// Picks an outcome index from a probability vector.
pub fn pick_outcome(dist: &[f64], mode: MeasureMode) -> Result<usize, QsimError> {
    match mode {
        MeasureMode::Branch(index) => {
            let probability = dist.get(index).copied().unwrap_or(0.0);
            if probability < MIN_BRANCH_PROBABILITY {
                return Err(QsimError::ImpossibleBranch { index, probability });
            }
            Ok(index)
        }
        MeasureMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: f64 = rng.random::<f64>() * dist.iter().sum::<f64>();
            let mut acc = 0.0;
            let mut last = 0;
            for (i, &p) in dist.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                last = i;
                acc += p;
                if u < acc {
                    return Ok(i);
                }
            }
            Ok(last)
        }
    }
}

/// Marginal distribution of one register.
pub fn register_distribution(state: &StateVector, register: usize) -> Result<Vec<f64>, QsimError> {
    let (_, d, stride) = state.layout(register)?;
    let mut dist = vec![0.0; d];
    for (j, a) in state.amplitudes().iter().enumerate() {
        dist[(j / stride) % d] += a.norm_sqr();
    }
    Ok(dist)
}

fn collapse(state: &StateVector, keep: impl Fn(usize) -> bool) -> StateVector {
    let mut amps: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, &a)| if keep(j) { a } else { Complex64::new(0.0, 0.0) })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_parts_unchecked(state.dims().to_vec(), amps)
}

/// Computational-basis measurement of one register.
pub fn measure_register(
    state: &StateVector,
    register: usize,
    mode: MeasureMode,
) -> Result<Outcome, QsimError> {
    let dist = register_distribution(state, register)?;
    let index = pick_outcome(&dist, mode)?;
    let collapsed = collapse(state, |j| state.register_value(j, register) == index);
    Ok(Outcome {
        index,
        probability: dist[index],
        state: collapsed,
    })
}

/// Two-outcome projective measurement of one register: outcome `1` when its
/// value satisfies `accept`, `0` otherwise. Only the accepted/rejected bit
/// is learned; the superposition inside each part survives.
pub fn measure_projective(
    state: &StateVector,
    register: usize,
    accept: impl Fn(usize) -> bool,
    mode: MeasureMode,
) -> Result<Outcome, QsimError> {
    let dist = register_distribution(state, register)?;
    let p_accept: f64 = dist
        .iter()
        .enumerate()
        .filter(|(v, _)| accept(*v))
        .map(|(_, p)| p)
        .sum();
    let two = [1.0 - p_accept, p_accept];
    let index = pick_outcome(&two, mode)?;
    let want = index == 1;
    let collapsed = collapse(state, |j| accept(state.register_value(j, register)) == want);
    Ok(Outcome {
        index,
        probability: two[index],
        state: collapsed,
    })
}

/// Orthonormal measurement basis; column `j` is the basis vector `m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    matrix: CMatrix,
}

impl MeasurementBasis {
    /// Checks orthonormality of the columns within 1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self, QsimError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QsimError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let dev = gram_deviation(&matrix);
        if dev > UNITARY_TOLERANCE {
            return Err(QsimError::NotOrthonormal(dev));
        }
        Ok(MeasurementBasis { matrix })
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, QsimError> {
        let n = columns.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(QsimError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |r, c| columns[c][r]))
    }

    pub fn computational(n: usize) -> Self {
        MeasurementBasis {
            matrix: CMatrix::identity(n, n),
        }
    }

    /// Basis `{ M[r] / sqrt(k) }` from the rows of a certified weighing
    /// matrix. `M M^T = k I` holds exactly, so no floating-point check is
    /// repeated here.
    pub fn from_weighing_rows(m: &TernaryMatrix) -> Result<Self, DesignError> {
        let k = m.claimed_weight().ok_or(DesignError::Unverified)?;
        if k == 0 {
            return Err(DesignError::Unverified);
        }
        let scale = 1.0 / (k as f64).sqrt();
        let n = m.n();
        Ok(MeasurementBasis {
            matrix: CMatrix::from_fn(n, n, |i, r| {
                Complex64::new(m.entry(r, i) as f64 * scale, 0.0)
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.matrix.column(j).iter().copied().collect()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// `Prob(m_j | psi) = |<m_j|psi>|^2` for every basis vector.
pub fn basis_distribution(
    state: &StateVector,
    basis: &MeasurementBasis,
) -> Result<Vec<f64>, QsimError> {
    if basis.dim() != state.len() {
        return Err(QsimError::DimensionMismatch {
            expected: state.len(),
            found: basis.dim(),
        });
    }
    let amps = state.amplitudes();
    Ok((0..basis.dim())
        .map(|j| {
            basis
                .matrix
                .column(j)
                .iter()
                .zip(amps)
                .map(|(m, a)| m.conj() * a)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect())
}

/// Measurement in an arbitrary orthonormal basis over the joint index; the
/// collapsed state is the selected basis vector.
pub fn measure_in_basis(
    state: &StateVector,
    basis: &MeasurementBasis,
    mode: MeasureMode,
) -> Result<Outcome, QsimError> {
    let dist = basis_distribution(state, basis)?;
    let index = pick_outcome(&dist, mode)?;
    let collapsed = StateVector::from_parts_unchecked(state.dims().to_vec(), basis.vector(index));
    Ok(Outcome {
        index,
        probability: dist[index],
        state: collapsed,
    })
}

/// Extends orthonormal vectors to a full basis of `C^dim` by Gram-Schmidt
/// over the standard basis vectors `e_0, e_1, ..` in order. The given
/// vectors keep their column positions; fillers are appended.
pub fn complete_basis(
    partial: &[Vec<Complex64>],
    dim: usize,
) -> Result<MeasurementBasis, QsimError> {
    let mut cols: Vec<Vec<Complex64>> = partial.to_vec();
    for e in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[e] = Complex64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    MeasurementBasis::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn register_measurement_examples() {
        let s = StateVector::basis(&[4, 2], &[3, 0]).unwrap();
        let out = measure_register(&s, 1, MeasureMode::Sample(0)).unwrap();
        assert_eq!((out.index, out.probability), (0, 1.0));
        let u = StateVector::uniform(&[2]).unwrap();
        let d = register_distribution(&u, 0).unwrap();
        assert!(d.iter().all(|p| (p - 0.5).abs() < 1e-15));
        let out = measure_register(&u, 0, MeasureMode::Branch(1)).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert_eq!(out.state, StateVector::basis(&[2], &[1]).unwrap());
        assert!(matches!(
            measure_register(&s, 1, MeasureMode::Branch(1)),
            Err(QsimError::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let u = StateVector::uniform(&[16]).unwrap();
        let a: Vec<usize> = (0..20)
            .map(|s| {
                measure_register(&u, 0, MeasureMode::Sample(s))
                    .unwrap()
                    .index
            })
            .collect();
        let b: Vec<usize> = (0..20)
            .map(|s| {
                measure_register(&u, 0, MeasureMode::Sample(s))
                    .unwrap()
                    .index
            })
            .collect();
        assert_eq!(a, b);
        assert!(a.iter().any(|&i| i != a[0]));
    }

    #[test]
    fn projective_keeps_superposition() {
        let s = StateVector::uniform(&[3, 4]).unwrap();
        let out = measure_projective(&s, 1, |v| v != 0, MeasureMode::Branch(1)).unwrap();
        assert!((out.probability - 0.75).abs() < 1e-15);
        let nonzero = out
            .state
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > 1e-12)
            .count();
        assert_eq!(nonzero, 9);
        assert!((out.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_measurement_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = MeasurementBasis::from_columns(&[vec![c(h), c(h)], vec![c(h), c(-h)]]).unwrap();
        let psi = StateVector::from_amplitudes(&[2], vec![c(h), c(-h)]).unwrap();
        let out = measure_in_basis(&psi, &basis, MeasureMode::Sample(3)).unwrap();
        assert_eq!(out.index, 1);
        assert!((out.probability - 1.0).abs() < 1e-15);
        let d = basis_distribution(&psi, &basis).unwrap();
        assert!(d[0].abs() < 1e-15);
        let u = StateVector::uniform(&[4]).unwrap();
        let d = basis_distribution(&u, &MeasurementBasis::computational(4)).unwrap();
        assert!(d.iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_orthonormal() {
        assert!(matches!(
            MeasurementBasis::from_columns(&[vec![c(1.0), c(0.0)], vec![c(1.0), c(0.0)]]),
            Err(QsimError::NotOrthonormal(_))
        ));
        let u = StateVector::uniform(&[3]).unwrap();
        assert!(matches!(
            basis_distribution(&u, &MeasurementBasis::computational(2)),
            Err(QsimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn completion_appends_orthonormal_fillers() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = complete_basis(&[vec![c(h), c(h), c(0.0)]], 3).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.vector(0), vec![c(h), c(h), c(0.0)]);
    }
}

//! Exact amplitude amplification.
//!
//! Plain Grover iterations reach the marked subspace exactly only when
//! `(2m + 1) * theta = pi / 2`. We run `m - 1` standard iterations and finish
//! with one iteration whose two phases are solved in closed form so that the
//! unmarked component vanishes. The same sequence is replayed on the
//! two-dimensional `(marked, unmarked)` model, which supplies the global phase
//! to strip at the end and the overlap used as an exactness check.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::oracle::{kickback, oracle_marked_phase};
use super::{QsimError, QueryOracle, StateVector};

/// Slack for ceilings of quantities that are exact integers in real
/// arithmetic.
const CEIL_SLACK: f64 = 1e-9;

/// `ceil(pi/4 * sqrt(n / k))`.
pub fn grover_budget(n: usize, k: usize) -> u64 {
    (FRAC_PI_4 * (n as f64 / k as f64).sqrt() - CEIL_SLACK).ceil() as u64
}

/// Oracle calls used by [`grover_exact`]: `0` when `k = n`, otherwise the
/// smallest `m` with `(2m + 1) * arcsin(sqrt(k / n)) >= pi / 2`.
pub fn exact_iterations(n: usize, k: usize) -> u64 {
    if k >= n {
        return 0;
    }
    let theta = (k as f64 / n as f64).sqrt().asin();
    (PI / (4.0 * theta) - 0.5 - CEIL_SLACK).ceil().max(1.0) as u64
}

/// Amplitudes on `(marked, unmarked)` unit vectors.
#[derive(Clone, Copy)]
struct PlaneModel {
    marked: Complex64,
    unmarked: Complex64,
    sin: f64,
    cos: f64,
}

impl PlaneModel {
    fn new(n: usize, k: usize) -> Self {
        let sin = (k as f64 / n as f64).sqrt();
        let cos = (1.0 - k as f64 / n as f64).sqrt();
        PlaneModel {
            marked: sin.into(),
            unmarked: cos.into(),
            sin,
            cos,
        }
    }

    fn step(&mut self, marked_phase: f64, reflect_phase: f64) {
        self.marked *= Complex64::from_polar(1.0, marked_phase);
        let proj = self.marked * self.sin + self.unmarked * self.cos;
        let factor = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, reflect_phase)) * proj;
        self.marked -= factor * self.sin;
        self.unmarked -= factor * self.cos;
    }

    /// Phases `(phi, varphi)` for a final iteration that cancels the
    /// unmarked component. The current amplitudes are real up to a common
    /// sign, which the solution does not depend on.
    fn final_phases(&self) -> (f64, f64) {
        let (a, b) = (self.marked.re, self.unmarked.re);
        if b.abs() < 1e-15 {
            return (0.0, 0.0);
        }
        let (s, c) = (self.sin, self.cos);
        let cos_2theta = c * c - s * s;
        let sin_2theta = 2.0 * s * c;
        let cos_phi = (-b * cos_2theta / (a * sin_2theta)).clamp(-1.0, 1.0);
        let phi = cos_phi.acos();
        let z = Complex64::from_polar(s * a, phi) + c * b;
        let y = b / (c * z);
        let varphi = (Complex64::new(1.0, 0.0) - y).arg();
        (phi, varphi)
    }
}

fn check_counts(oracle: &QueryOracle, n: usize, k: usize) -> Result<(), QsimError> {
    if k == 0 || k > n {
        return Err(QsimError::BadMarkedCount { n, k });
    }
    if oracle.domain() != n {
        return Err(QsimError::DimensionMismatch {
            expected: n,
            found: oracle.domain(),
        });
    }
    Ok(())
}

/// Prepares `1/sqrt(k) sum_{f(i) != 0} |i>` from scratch using
/// [`exact_iterations`] queries. Returns the state and the queries spent.
pub fn grover_exact(
    oracle: &mut QueryOracle,
    n: usize,
    k: usize,
) -> Result<(StateVector, u64), QsimError> {
    check_counts(oracle, n, k)?;
    let start = oracle.queries();
    let uniform = StateVector::uniform(&[n])?;
    let mut psi = uniform.clone();
    if k == n {
        return Ok((psi, 0));
    }
    let m = exact_iterations(n, k);
    let mut model = PlaneModel::new(n, k);
    for _ in 1..m {
        oracle_marked_phase(&mut psi, oracle, PI)?;
        psi.reflect_about(&uniform, PI)?;
        model.step(PI, PI);
    }
    let (phi, varphi) = model.final_phases();
    oracle_marked_phase(&mut psi, oracle, phi)?;
    psi.reflect_about(&uniform, varphi)?;
    model.step(phi, varphi);

    let gamma = model.marked / model.marked.norm();
    psi.apply_global_phase(gamma.conj());
    let overlap = uniform.inner(&psi);
    let miss = (overlap - Complex64::new(model.sin, 0.0)).norm() + model.unmarked.norm();
    if miss > 1e-9 {
        return Err(QsimError::AmplificationMismatch(miss));
    }
    Ok((psi, oracle.queries() - start))
}

/// Prepares `|f> = 1/sqrt(k) sum f(i) |i>`: exact amplification followed by
/// one kick-back sign query.
pub fn construct_signed_state(
    oracle: &mut QueryOracle,
    n: usize,
    k: usize,
) -> Result<(StateVector, u64), QsimError> {
    let start = oracle.queries();
    let (mut psi, _) = grover_exact(oracle, n, k)?;
    kickback(&mut psi, oracle)?;
    Ok((psi, oracle.queries() - start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn expected_marked(table: &[i8], signed: bool) -> Vec<Complex64> {
        let k = table.iter().filter(|&&v| v != 0).count() as f64;
        table
            .iter()
            .map(|&v| {
                let w = if signed {
                    v as f64
                } else {
                    (v != 0) as u8 as f64
                };
                Complex64::new(w / k.sqrt(), 0.0)
            })
            .collect()
    }

    fn max_dev(a: &StateVector, b: &[Complex64]) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn iteration_counts() {
        // sin(3 * asin(1/2)) = 1: one plain iteration is exact for n=4, k=1
        assert!(((3.0 * 0.5f64.asin()).sin() - 1.0).abs() < 1e-15);
        assert_eq!(exact_iterations(4, 1), 1);
        assert_eq!(exact_iterations(8, 8), 0);
        assert_eq!(exact_iterations(64, 27), 1);
        assert_eq!(grover_budget(64, 27), 2);
        assert_eq!(grover_budget(4, 1), 2);
        assert_eq!(grover_budget(4, 3), 1);
        for n in 2..200 {
            for k in 1..=n {
                assert!(exact_iterations(n, k) <= grover_budget(n, k));
            }
        }
    }

    #[test]
    fn single_marked_of_four() {
        let mut f = QueryOracle::new(vec![0, 0, 0, 1]).unwrap();
        let (psi, used) = grover_exact(&mut f, 4, 1).unwrap();
        assert_eq!(used, 1);
        assert!(max_dev(&psi, &expected_marked(&[0, 0, 0, 1], false)) < 1e-9);
    }

    #[test]
    fn all_marked_needs_no_queries() {
        let mut f = QueryOracle::new(vec![1, -1, 1, 1, -1, 1, 1, 1]).unwrap();
        let (psi, used) = grover_exact(&mut f, 8, 8).unwrap();
        assert_eq!(used, 0);
        assert_eq!(f.queries(), 0);
        assert_eq!(psi, StateVector::uniform(&[8]).unwrap());
    }

    #[test]
    fn randomized_exactness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 5, 17, 64] {
            for k in 1..=n {
                let mut table = vec![0i8; n];
                for i in sample(&mut rng, n, k) {
                    table[i] = if i % 2 == 0 { 1 } else { -1 };
                }
                let mut f = QueryOracle::new(table.clone()).unwrap();
                let (psi, used) = grover_exact(&mut f, n, k).unwrap();
                assert!(used <= grover_budget(n, k), "n={n} k={k}");
                assert!(
                    max_dev(&psi, &expected_marked(&table, false)) < 1e-9,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn wrong_k_is_detected() {
        let mut f = QueryOracle::new(vec![0, 0, 1, 1, 0, 0, 0, 0]).unwrap();
        assert!(matches!(
            grover_exact(&mut f, 8, 1),
            Err(QsimError::AmplificationMismatch(_))
        ));
        let mut f = QueryOracle::new(vec![1, 0]).unwrap();
        assert_eq!(
            grover_exact(&mut f, 2, 0).unwrap_err(),
            QsimError::BadMarkedCount { n: 2, k: 0 }
        );
        assert!(matches!(
            grover_exact(&mut f, 3, 1),
            Err(QsimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn signed_state_examples() {
        let mut f = QueryOracle::new(vec![1, -1]).unwrap();
        let (psi, used) = construct_signed_state(&mut f, 2, 2).unwrap();
        assert_eq!(used, 1);
        assert!(max_dev(&psi, &expected_marked(&[1, -1], true)) < 1e-9);

        let row0 = [1, 1, 1, 0];
        let mut f = QueryOracle::new(row0.to_vec()).unwrap();
        let (psi, used) = construct_signed_state(&mut f, 4, 3).unwrap();
        assert!(used <= 2);
        assert!(max_dev(&psi, &expected_marked(&row0, true)) < 1e-9);

        let mut f = QueryOracle::new(vec![0, 0, 0, -1]).unwrap();
        let (psi, used) = construct_signed_state(&mut f, 4, 1).unwrap();
        assert_eq!(used, 2);
        assert!(max_dev(&psi, &expected_marked(&[0, 0, 0, -1], true)) < 1e-9);
    }
}

//! Classical lower bounds and quantum budgets as concrete numbers.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use super::sls::sls_classical_budget;
use super::wm::wm_budget;
use super::ProtocolError;
use crate::designs::{identity, sylvester, tensor, w43_power, DesignError, TernaryMatrix};

/// Largest `N = n^t` a corollary family row may reach.
pub const MAX_FAMILY_DIMENSION: u64 = 4096;

const SLACK: f64 = 1e-9;

fn check_eps(eps: f64) -> Result<(), ProtocolError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(ProtocolError::BadParameter(format!(
            "eps must lie in [0, 1), got {eps}"
        )));
    }
    Ok(())
}

fn ceil_nonneg(x: f64) -> u64 {
    (x - SLACK).ceil().max(0.0) as u64
}

/// Lower bounds on the worst-case depth of any classical decision tree that
/// identifies a row of a `W(n, k)` matrix with error at most `eps`, plus the
/// quantum budget `ceil(pi/4 sqrt(n/k)) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    /// `log3 n + log3(1 - eps)`
    pub bound_log3: f64,
    /// `(1 - eps) n / k - 1 / k`
    pub bound_nk: f64,
    /// `log2(n / (n - k + 1)) + log2(1 - eps)`
    pub bound_log2: f64,
    pub quantum_upper: u64,
    /// Smallest integer depth compatible with all three bounds.
    pub min_depth: u64,
}

pub fn classical_bounds(n: usize, k: usize, eps: f64) -> Result<BoundsReport, ProtocolError> {
    if k == 0 || k > n {
        return Err(ProtocolError::BadParameter(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    check_eps(eps)?;
    let (nf, kf) = (n as f64, k as f64);
    let bound_log3 = nf.log(3.0) + (1.0 - eps).log(3.0);
    let bound_nk = (1.0 - eps) * nf / kf - 1.0 / kf;
    let bound_log2 = (nf / (nf - kf + 1.0)).log2() + (1.0 - eps).log2();
    let quantum_upper = (FRAC_PI_4 * (nf / kf).sqrt() - SLACK).ceil() as u64 + 1;
    let min_depth = ceil_nonneg(bound_log3.max(bound_nk).max(bound_log2));
    Ok(BoundsReport {
        n,
        k,
        eps,
        bound_log3,
        bound_nk,
        bound_log2,
        quantum_upper,
        min_depth,
    })
}

/// Classical bounds for the shifted Legendre sequence over `F_q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlsBoundsReport {
    pub q: usize,
    pub eps: f64,
    /// `log2 q + log2((1 - eps) / 2)`
    pub stated_lower: f64,
    /// `log2((1 - eps) q + 1) - 1`, from `2^{d+1} - 1 >= (1 - eps) q`.
    pub proof_lower: f64,
    /// Smallest integer `d` with `2^{d+1} - 1 >= (1 - eps) q`.
    pub min_depth: u64,
    /// `ceil(log q / log(4/3)) + 3`
    pub classical_upper: u64,
    pub quantum_upper: u64,
}

pub fn sls_bounds(q: usize, eps: f64) -> Result<SlsBoundsReport, ProtocolError> {
    if q < 2 {
        return Err(ProtocolError::BadParameter(format!(
            "q must be at least 2, got {q}"
        )));
    }
    check_eps(eps)?;
    let qf = q as f64;
    let target = (1.0 - eps) * qf;
    let mut min_depth = 0u64;
    while ((1u128 << (min_depth + 1)) - 1) as f64 + SLACK < target {
        min_depth += 1;
    }
    Ok(SlsBoundsReport {
        q,
        eps,
        stated_lower: qf.log2() + ((1.0 - eps) / 2.0).log2(),
        proof_lower: (target + 1.0).log2() - 1.0,
        min_depth,
        classical_upper: sls_classical_budget(q),
        quantum_upper: 2,
    })
}

/// One member `W(n^t, k^t)` of the tensor-power family of a `W(n, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRow {
    pub t: u32,
    pub n: u64,
    pub k: u64,
    /// `1 - log_n k`
    pub gamma: f64,
    /// `ceil(pi/4 sqrt(N^gamma)) + 1`
    pub quantum_budget: u64,
    /// `(1 - eps) N^gamma - 1 / K`
    pub classical_lower: f64,
}

pub fn corollary_family(
    n: u64,
    k: u64,
    t_max: u32,
    eps: f64,
) -> Result<Vec<FamilyRow>, ProtocolError> {
    if n < 2 || k == 0 || k > n {
        return Err(ProtocolError::BadParameter(format!(
            "need n >= 2 and 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if t_max == 0 {
        return Err(ProtocolError::BadParameter(
            "t_max must be at least 1".into(),
        ));
    }
    check_eps(eps)?;
    let gamma = 1.0 - (k as f64).ln() / (n as f64).ln();
    (1..=t_max)
        .map(|t| {
            let big_n = n
                .checked_pow(t)
                .filter(|&v| v <= MAX_FAMILY_DIMENSION)
                .ok_or(ProtocolError::TooLarge {
                    what: "n^t",
                    value: n.saturating_pow(t),
                    cap: MAX_FAMILY_DIMENSION,
                })?;
            let big_k = k.pow(t);
            // N^gamma = N / K exactly
            let ratio = big_n as f64 / big_k as f64;
            Ok(FamilyRow {
                t,
                n: big_n,
                k: big_k,
                gamma,
                quantum_budget: (FRAC_PI_4 * ratio.sqrt() - SLACK).ceil() as u64 + 1,
                classical_lower: (1.0 - eps) * ratio - 1.0 / big_k as f64,
            })
        })
        .collect()
}

/// Asymptotic regimes: `(k, quantum upper bound, classical lower bound)`.
pub const ASYMPTOTIC_ROWS: [(&str, &str, &str); 3] = [
    ("o(n)", "pi/4 sqrt(n/k) + 2", "(1-eps) n/k - O(1)"),
    ("Theta(n)", "O(1)", "log3 n + log3(1-eps)"),
    ("n", "1", "log2 n + log2(1-eps)"),
];

/// A concrete matrix evaluated against the bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub family: String,
    pub regime: String,
    pub n: usize,
    pub k: usize,
    pub quantum_budget: u64,
    pub bound_log3: f64,
    pub bound_nk: f64,
    pub bound_log2: f64,
    pub classical_min_depth: u64,
}

fn table_row(
    family: String,
    regime: &str,
    m: &TernaryMatrix,
    eps: f64,
) -> Result<TableRow, ProtocolError> {
    let k = m.claimed_weight().ok_or(DesignError::Unverified)?;
    let b = classical_bounds(m.n(), k, eps)?;
    Ok(TableRow {
        family,
        regime: regime.into(),
        n: m.n(),
        k,
        quantum_budget: wm_budget(m.n(), k),
        bound_log3: b.bound_log3,
        bound_nk: b.bound_nk,
        bound_log2: b.bound_log2,
        classical_min_depth: b.min_depth,
    })
}

/// Concrete rows for the built-in families: identities (`k = 1`), powers of
/// `W(4,3)` (`K = N^0.79`), `W(4,3)` tensored with Sylvester matrices
/// (`K = 3N/4`) and Sylvester matrices (`K = N`).
pub fn table_rows(eps: f64) -> Result<Vec<TableRow>, ProtocolError> {
    check_eps(eps)?;
    let mut rows = Vec::new();
    for n in [4usize, 16, 64] {
        rows.push(table_row(
            format!("identity({n})"),
            "o(n)",
            &identity(n)?,
            eps,
        )?);
    }
    for t in 1..=3 {
        rows.push(table_row(format!("w43^{t}"), "o(n)", &w43_power(t)?, eps)?);
    }
    let base = w43_power(1)?;
    for t in 1..=3 {
        let m = tensor(&base, &sylvester(t)?)?;
        rows.push(table_row(
            format!("w43 x sylvester({t})"),
            "Theta(n)",
            &m,
            eps,
        )?);
    }
    for t in [2u32, 4, 6] {
        rows.push(table_row(
            format!("sylvester({t})"),
            "n",
            &sylvester(t)?,
            eps,
        )?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w43_bounds() {
        let b = classical_bounds(4, 3, 0.0).unwrap();
        assert!((b.bound_log3 - 1.2619).abs() < 1e-4);
        assert!((b.bound_nk - 1.0).abs() < 1e-12);
        assert!((b.bound_log2 - 1.0).abs() < 1e-12);
        assert_eq!(b.quantum_upper, 2);
        assert_eq!(b.min_depth, 2);
    }

    #[test]
    fn extreme_weights() {
        for n in 1..40 {
            assert!(
                (classical_bounds(n, 1, 0.0).unwrap().bound_nk - (n as f64 - 1.0)).abs() < 1e-12
            );
        }
        for t in 0..10 {
            let n = 1usize << t;
            assert!((classical_bounds(n, n, 0.0).unwrap().bound_log2 - t as f64).abs() < 1e-12);
        }
        assert!(classical_bounds(3, 4, 0.0).is_err());
        assert!(classical_bounds(3, 1, 1.0).is_err());
    }

    #[test]
    fn families() {
        let rows = corollary_family(4, 3, 3, 0.0).unwrap();
        // 1 - ln 3 / ln 4
        assert!((rows[0].gamma - 0.207_518_75).abs() < 1e-6);
        assert_eq!((rows[1].n, rows[1].k, rows[1].quantum_budget), (16, 9, 3));
        for row in corollary_family(2, 2, 12, 0.0).unwrap() {
            assert_eq!(row.gamma, 0.0);
            assert_eq!(row.quantum_budget, 2);
        }
        assert!(matches!(
            corollary_family(4, 3, 7, 0.0),
            Err(ProtocolError::TooLarge { .. })
        ));
    }

    #[test]
    fn sls_depths() {
        let b = sls_bounds(7, 0.0).unwrap();
        assert_eq!(b.min_depth, 2);
        assert!((b.proof_lower - 2.0).abs() < 1e-12);
        assert!((b.stated_lower - (7f64.log2() - 1.0)).abs() < 1e-12);
        assert_eq!(sls_bounds(3, 0.0).unwrap().min_depth, 1);
        assert_eq!(sls_bounds(8, 0.0).unwrap().min_depth, 3);
    }

    #[test]
    fn concrete_table() {
        let rows = table_rows(0.0).unwrap();
        let w = rows.iter().find(|r| r.family == "w43^3").unwrap();
        assert_eq!((w.n, w.k, w.quantum_budget), (64, 27, 3));
        assert!(rows
            .iter()
            .filter(|r| r.regime == "n")
            .all(|r| r.quantum_budget == 1));
    }
}

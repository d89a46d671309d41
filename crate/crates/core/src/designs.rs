//! Ternary matrices, exact weighing-matrix certification and the classical
//! constructions: identity, Sylvester, Paley I/II, tensor powers, the
//! `W(4,3)` example and the Legendre matrix.
//!
//! Verification is integer-exact. Rows are packed into `+1` / `-1` bitsets
//! so an inner product costs four popcounts per 64 columns.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::field::{prime_power, FieldError, FieldSpec};

/// Largest matrix dimension any constructor will produce.
pub const MAX_DIMENSION: usize = 4096;

/// The `W(4,3)` matrix whose tensor powers are `W(4^t, 3^t)`.
pub const W43: [[i8; 4]; 4] = [[1, 1, 1, 0], [1, -1, 0, 1], [1, 0, -1, -1], [0, 1, -1, 1]];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("not a weighing matrix: (M M^T)[{row_a}][{row_b}] = {found}, expected {expected}")]
    NotWeighing {
        row_a: usize,
        row_b: usize,
        found: i64,
        expected: i64,
    },
    #[error("claimed weight {claimed} but M M^T = {found} I")]
    WeightMismatch { claimed: usize, found: usize },
    #[error("operation requires a verified weighing matrix")]
    Unverified,
    #[error("entry {0} is not in {{-1, 0, +1}}")]
    NonTernary(i8),
    #[error("{len} entries do not form a {n}x{n} matrix")]
    NotSquare { len: usize, n: usize },
    #[error("dimension {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("q = {q} must be {required} mod 4 for this construction")]
    WrongResidue { q: u64, required: u64 },
    #[error("{0} is not an odd prime power")]
    NotPrimePower(u64),
    #[error("parameter must be at least 1")]
    ZeroParameter,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Square matrix over `{-1, 0, +1}`.
///
/// A `claimed_weight` is only ever attached by a construction that
/// guarantees `M M^T = k I`, by [`TernaryMatrix::certified`], or by parsing a
/// header whose weight passed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryMatrix {
    n: usize,
    entries: Vec<i8>,
    claimed_weight: Option<usize>,
}

impl TernaryMatrix {
    /// Unverified matrix from row-major entries.
    pub fn new(n: usize, entries: Vec<i8>) -> Result<Self, DesignError> {
        if entries.len() != n * n {
            return Err(DesignError::NotSquare {
                len: entries.len(),
                n,
            });
        }
        if n > MAX_DIMENSION {
            return Err(DesignError::TooLarge {
                n,
                cap: MAX_DIMENSION,
            });
        }
        if let Some(&bad) = entries.iter().find(|e| !(-1..=1).contains(*e)) {
            return Err(DesignError::NonTernary(bad));
        }
        Ok(TernaryMatrix {
            n,
            entries,
            claimed_weight: None,
        })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self, DesignError> {
        let n = rows.len();
        let entries: Vec<i8> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != n) {
            return Err(DesignError::NotSquare {
                len: entries.len(),
                n,
            });
        }
        Self::new(n, entries)
    }

    /// Attaches the weight found by [`verify_weighing`].
    pub fn certified(mut self) -> Result<Self, DesignError> {
        let cert = verify_weighing(&self)?;
        self.claimed_weight = Some(cert.k);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn claimed_weight(&self) -> Option<usize> {
        self.claimed_weight
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn transpose(&self) -> TernaryMatrix {
        let n = self.n;
        let entries = (0..n * n).map(|i| self.entry(i % n, i / n)).collect();
        TernaryMatrix {
            n,
            entries,
            claimed_weight: self.claimed_weight,
        }
    }

    fn with_weight(n: usize, entries: Vec<i8>, k: usize) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        TernaryMatrix {
            n,
            entries,
            claimed_weight: Some(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixClass {
    /// `k = n`
    Hadamard,
    /// `k = n - 1`
    Conference,
    Weighing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeighingCertificate {
    pub n: usize,
    pub k: usize,
    pub row_nonzero: Vec<usize>,
    pub col_nonzero: Vec<usize>,
    pub class: MatrixClass,
}

impl WeighingCertificate {
    pub fn is_hadamard(&self) -> bool {
        self.class == MatrixClass::Hadamard
    }
}

/// Rows packed as `(plus, minus)` bitsets.
struct BitRows {
    words: usize,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl BitRows {
    fn new(m: &TernaryMatrix) -> Self {
        let words = m.n.div_ceil(64).max(1);
        let mut plus = vec![0u64; m.n * words];
        let mut minus = vec![0u64; m.n * words];
        for (r, row) in m.rows().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                let bit = 1u64 << (c % 64);
                match e {
                    1 => plus[r * words + c / 64] |= bit,
                    -1 => minus[r * words + c / 64] |= bit,
                    _ => {}
                }
            }
        }
        BitRows { words, plus, minus }
    }

    fn dot(&self, a: usize, b: usize) -> i64 {
        let (ra, rb) = (a * self.words, b * self.words);
        let mut acc = 0i64;
        for w in 0..self.words {
            let (pa, ma) = (self.plus[ra + w], self.minus[ra + w]);
            let (pb, mb) = (self.plus[rb + w], self.minus[rb + w]);
            acc += (pa & pb).count_ones() as i64 + (ma & mb).count_ones() as i64;
            acc -= (pa & mb).count_ones() as i64 + (ma & pb).count_ones() as i64;
        }
        acc
    }
}

/// Exact check of `M M^T = k I`, reporting the first offending row pair in
/// row-major upper-triangular order.
pub fn verify_weighing(m: &TernaryMatrix) -> Result<WeighingCertificate, DesignError> {
    let n = m.n;
    let rows = BitRows::new(m);
    let k = if n == 0 { 0 } else { rows.dot(0, 0) };
    for a in 0..n {
        for b in a..n {
            let expected = if a == b { k } else { 0 };
            let found = rows.dot(a, b);
            if found != expected {
                return Err(DesignError::NotWeighing {
                    row_a: a,
                    row_b: b,
                    found,
                    expected,
                });
            }
        }
    }
    let k = k as usize;
    if let Some(claimed) = m.claimed_weight {
        if claimed != k {
            return Err(DesignError::WeightMismatch { claimed, found: k });
        }
    }
    let row_nonzero: Vec<usize> = m
        .rows()
        .map(|r| r.iter().filter(|&&e| e != 0).count())
        .collect();
    let col_nonzero: Vec<usize> = (0..n)
        .map(|c| (0..n).filter(|&r| m.entry(r, c) != 0).count())
        .collect();
    // M M^T = k I forces M^T M = k I, hence k nonzeros per row and column
    assert!(row_nonzero.iter().chain(&col_nonzero).all(|&c| c == k));
    let class = if k == n {
        MatrixClass::Hadamard
    } else if k + 1 == n {
        MatrixClass::Conference
    } else {
        MatrixClass::Weighing
    };
    Ok(WeighingCertificate {
        n,
        k,
        row_nonzero,
        col_nonzero,
        class,
    })
}

/// `M M^T` as a row-major integer matrix.
pub fn gram(m: &TernaryMatrix) -> Vec<i64> {
    let n = m.n;
    let rows = BitRows::new(m);
    let mut out = vec![0i64; n * n];
    for a in 0..n {
        for b in a..n {
            let d = rows.dot(a, b);
            out[a * n + b] = d;
            out[b * n + a] = d;
        }
    }
    out
}

/// `M^T M` as a row-major integer matrix.
pub fn transpose_gram(m: &TernaryMatrix) -> Vec<i64> {
    gram(&m.transpose())
}

fn check_dim(n: usize) -> Result<(), DesignError> {
    if n > MAX_DIMENSION {
        Err(DesignError::TooLarge {
            n,
            cap: MAX_DIMENSION,
        })
    } else {
        Ok(())
    }
}

pub fn identity(n: usize) -> Result<TernaryMatrix, DesignError> {
    check_dim(n)?;
    let entries = (0..n * n)
        .map(|i| if i / n == i % n { 1 } else { 0 })
        .collect();
    Ok(TernaryMatrix::with_weight(n, entries, 1.min(n)))
}

/// Kronecker product of two verified weighing matrices.
pub fn tensor(a: &TernaryMatrix, b: &TernaryMatrix) -> Result<TernaryMatrix, DesignError> {
    let (ka, kb) = match (a.claimed_weight, b.claimed_weight) {
        (Some(ka), Some(kb)) => (ka, kb),
        _ => return Err(DesignError::Unverified),
    };
    let n = a.n * b.n;
    check_dim(n)?;
    let mut entries = Vec::with_capacity(n * n);
    for ra in 0..a.n {
        for rb in 0..b.n {
            for ca in 0..a.n {
                let x = a.entry(ra, ca);
                entries.extend(b.row(rb).iter().map(|&y| x * y));
            }
        }
    }
    Ok(TernaryMatrix::with_weight(n, entries, ka * kb))
}

/// `(sqrt(2) H)^{(x) t}`: entry `(r, c)` is `(-1)^{popcount(r & c)}`.
pub fn sylvester(t: u32) -> Result<TernaryMatrix, DesignError> {
    if t == 0 {
        return Err(DesignError::ZeroParameter);
    }
    let n = 1usize
        .checked_shl(t)
        .filter(|&n| n <= MAX_DIMENSION)
        .ok_or(DesignError::TooLarge {
            n: usize::MAX,
            cap: MAX_DIMENSION,
        })?;
    let entries = (0..n * n)
        .map(|i| {
            if ((i / n) & (i % n)).count_ones() % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(TernaryMatrix::with_weight(n, entries, n))
}

/// Jacobsthal matrix `Q[i][j] = chi(a_i - a_j)` in rank order.
fn jacobsthal(field: &FieldSpec) -> Vec<i8> {
    let table = field.chi_table();
    let q = field.q();
    (0..q * q)
        .map(|idx| table.chi(table.sub(idx / q, idx % q)))
        .collect()
}

fn paley_field(q: u64, residue: u64, dim: u64) -> Result<FieldSpec, DesignError> {
    if q % 2 == 0 || prime_power(q).is_none() {
        return Err(DesignError::NotPrimePower(q));
    }
    if q % 4 != residue {
        return Err(DesignError::WrongResidue {
            q,
            required: residue,
        });
    }
    check_dim(dim.min(usize::MAX as u64) as usize)?;
    Ok(FieldSpec::of_order(q)?)
}

/// Conference core `C` of order `q + 1` with a first row of ones and a first
/// column of `sign`s around the Jacobsthal matrix.
fn bordered_jacobsthal(field: &FieldSpec, sign: i8) -> Vec<i8> {
    let q = field.q();
    let m = q + 1;
    let jac = jacobsthal(field);
    let mut c = vec![0i8; m * m];
    for j in 1..m {
        c[j] = 1;
        c[j * m] = sign;
    }
    for i in 0..q {
        for j in 0..q {
            c[(i + 1) * m + j + 1] = jac[i * q + j];
        }
    }
    c
}

/// Paley construction I: `H = I + C` with `C` skew-symmetric, order `q + 1`,
/// for `q = 3 mod 4`.
pub fn paley_one(q: u64) -> Result<TernaryMatrix, DesignError> {
    let field = paley_field(q, 3, q + 1)?;
    let m = field.q() + 1;
    let mut h = bordered_jacobsthal(&field, -1);
    for i in 0..m {
        h[i * m + i] += 1;
    }
    Ok(TernaryMatrix::with_weight(m, h, m))
}

/// Paley construction II: the symmetric conference matrix `C` of order
/// `q + 1` doubled to `[[C + I, C - I], [C - I, -C - I]]`, for `q = 1 mod 4`.
pub fn paley_two(q: u64) -> Result<TernaryMatrix, DesignError> {
    let field = paley_field(q, 1, 2 * q + 2)?;
    let m = field.q() + 1;
    let c = bordered_jacobsthal(&field, 1);
    let n = 2 * m;
    let mut h = vec![0i8; n * n];
    for r in 0..n {
        for col in 0..n {
            let (i, j) = (r % m, col % m);
            let ident = i8::from(i == j);
            let cij = c[i * m + j];
            h[r * n + col] = match (r < m, col < m) {
                (true, true) => cij + ident,
                (false, false) => -cij - ident,
                _ => cij - ident,
            };
        }
    }
    Ok(TernaryMatrix::with_weight(n, h, n))
}

/// `L[i][j] = chi(a_i + a_j)` in rank order. Not a weighing matrix; it
/// satisfies `L^T L = q I - J` instead.
pub fn legendre_matrix(field: &FieldSpec) -> Result<TernaryMatrix, DesignError> {
    let q = field.q();
    check_dim(q)?;
    let table = field.chi_table();
    let entries = (0..q * q)
        .map(|idx| table.chi(table.add(idx / q, idx % q)))
        .collect();
    TernaryMatrix::new(q, entries)
}

/// `t`-fold tensor power of [`W43`].
pub fn w43_power(t: u32) -> Result<TernaryMatrix, DesignError> {
    if t == 0 {
        return Err(DesignError::ZeroParameter);
    }
    if t > 6 {
        return Err(DesignError::TooLarge {
            n: 4usize.saturating_pow(t),
            cap: MAX_DIMENSION,
        });
    }
    let base = TernaryMatrix::with_weight(4, W43.iter().flatten().copied().collect(), 3);
    let mut out = base.clone();
    for _ in 1..t {
        out = tensor(&out, &base)?;
    }
    Ok(out)
}

/// Matrix file format: `"n k"` header (`k = -1` when unverified), then `n`
/// lines of exactly `n` characters from `+ - 0`.
pub fn serialize_matrix(m: &TernaryMatrix) -> String {
    let mut out = String::with_capacity(m.n * (m.n + 1) + 16);
    let k = m.claimed_weight.map_or(-1, |k| k as i64);
    writeln!(out, "{} {}", m.n, k).expect("write to String");
    for row in m.rows() {
        out.extend(row.iter().map(|&e| match e {
            1 => '+',
            -1 => '-',
            _ => '0',
        }));
        out.push('\n');
    }
    out
}

/// Parses the matrix file format. A nonnegative header weight is verified
/// before it is attached; trailing blank lines and a missing final newline
/// are tolerated.
pub fn parse_matrix(text: &str) -> Result<TernaryMatrix, DesignError> {
    let parse_err = |line: usize, reason: String| DesignError::Parse { line, reason };
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(1, format!("expected \"n k\", got {header:?}")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(1, format!("bad dimension {:?}", fields[0])))?;
    let k: i64 = fields[1]
        .parse()
        .map_err(|_| parse_err(1, format!("bad weight {:?}", fields[1])))?;
    if k < -1 {
        return Err(parse_err(1, format!("bad weight {k}")));
    }
    check_dim(n)?;
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        let line_no = r + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(line_no, format!("expected {n} rows, found {r}")))?;
        let mut count = 0;
        for ch in line.chars() {
            entries.push(match ch {
                '+' => 1,
                '-' => -1,
                '0' => 0,
                other => return Err(parse_err(line_no, format!("non-ternary symbol {other:?}"))),
            });
            count += 1;
        }
        if count != n {
            return Err(parse_err(
                line_no,
                format!("row has {count} entries, expected {n}"),
            ));
        }
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(parse_err(
                n + 2 + extra,
                "unexpected content after last row".into(),
            ));
        }
    }
    let m = TernaryMatrix::new(n, entries)?;
    if k >= 0 {
        let cert = verify_weighing(&m)?;
        if cert.k != k as usize {
            return Err(DesignError::WeightMismatch {
                claimed: k as usize,
                found: cert.k,
            });
        }
        return Ok(TernaryMatrix {
            claimed_weight: Some(cert.k),
            ..m
        });
    }
    Ok(m)
}

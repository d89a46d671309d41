//! Finite fields `F_q`, `q = p^k` with `p` an odd prime, and the quadratic
//! (Legendre) character on them.
//!
//! Elements are coefficient vectors in the polynomial basis `1, x, .., x^(k-1)`
//! modulo a monic irreducible polynomial. Every element also has a *rank*
//! `sum coeffs[j] * p^j`, which is the canonical index used by oracles and
//! matrix rows everywhere else in the crate.

use std::fmt;

use thiserror::Error;

/// Largest field order [`FieldSpec::new`] will construct.
pub const MAX_FIELD_ORDER: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic must be odd, got {0}")]
    EvenCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the cap of {cap}")]
    TooLarge { p: u64, k: u32, cap: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("rank {rank} outside [0, {q})")]
    RankOutOfRange { rank: usize, q: usize },
    #[error("coefficients {0:?} do not form an element of this field")]
    InvalidElement(Vec<u32>),
    #[error("{0} is not an odd prime power")]
    NotOddPrimePower(u64),
}

/// An element of `F_{p^k}`: `k` residues mod `p`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    /// Polynomial notation in the basis variable `x`, e.g. `1+2x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (j, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{j}")?,
                _ => write!(f, "{c}x^{j}")?,
            }
        }
        Ok(())
    }
}

/// A concrete finite field with a fixed modulus and generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: usize,
    /// Monic, degree `k`, constant term first (length `k + 1`).
    modulus: Vec<u32>,
    generator: FieldElement,
}

impl FieldSpec {
    /// Builds `F_{p^k}` with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared constant term first) and the smallest
    /// generator by rank.
    ///
    /// For `k = 1` the modulus is `x`, so reduction is a no-op and the field
    /// is plain `Z_p` on the same code path.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 {
            return Err(FieldError::EvenCharacteristic(p));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_FIELD_ORDER as u64)
            .ok_or(FieldError::TooLarge {
                p,
                k,
                cap: MAX_FIELD_ORDER,
            })? as usize;
        let p = p as u32;
        let modulus = smallest_irreducible(p, k);
        let mut field = FieldSpec {
            p,
            k,
            q,
            modulus,
            generator: FieldElement {
                coeffs: vec![0; k as usize],
            },
        };
        field.generator = field.find_generator();
        Ok(field)
    }

    /// Builds the field of order `q`, which must be an odd prime power.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotOddPrimePower(q))?;
        if p == 2 {
            return Err(FieldError::NotOddPrimePower(q));
        }
        Self::new(p, k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    /// Validates a coefficient vector as an element of this field.
    pub fn element(&self, coeffs: Vec<u32>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::InvalidElement(coeffs));
        }
        Ok(FieldElement { coeffs })
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        x.coeffs.len() == self.k as usize && x.coeffs.iter().all(|&c| c < self.p)
    }

    pub fn rank(&self, x: &FieldElement) -> usize {
        x.coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn from_rank(&self, rank: usize) -> Result<FieldElement, FieldError> {
        if rank >= self.q {
            return Err(FieldError::RankOutOfRange { rank, q: self.q });
        }
        let p = self.p as usize;
        let mut r = rank;
        let coeffs = (0..self.k)
            .map(|_| {
                let c = (r % p) as u32;
                r /= p;
                c
            })
            .collect();
        Ok(FieldElement { coeffs })
    }

    /// All field elements in rank order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |r| self.from_rank(r).expect("rank in range"))
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        let coeffs = x
            .coeffs
            .iter()
            .map(|&a| if a == 0 { 0 } else { self.p - a })
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.add(x, &self.neg(y))
    }

    /// Polynomial product reduced modulo the field modulus.
    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let k = self.k as usize;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        // x^k = -(m_0 + .. + m_{k-1} x^{k-1})
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..k {
                let m = self.modulus[j] as u64;
                prod[d - k + j] = (prod[d - k + j] + (p - c) * m) % p;
            }
        }
        FieldElement {
            coeffs: prod[..k].iter().map(|&c| c as u32).collect(),
        }
    }

    /// `x^e`; negative exponents require `x != 0`. Exponents of nonzero
    /// bases are reduced mod `q - 1`.
    pub fn pow(&self, x: &FieldElement, e: i64) -> Result<FieldElement, FieldError> {
        if x.is_zero() {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(self.zero()),
                _ => Err(FieldError::ZeroInverse),
            };
        }
        let order = (self.q - 1) as i64;
        let mut e = e.rem_euclid(order) as u64;
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.pow(x, -1)
    }

    /// Quadratic character via Euler's criterion `x^((q-1)/2)`.
    pub fn legendre(&self, x: &FieldElement) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let e = ((self.q - 1) / 2) as i64;
        let r = self.pow(x, e).expect("nonzero base");
        if r == self.one() {
            1
        } else {
            debug_assert_eq!(r, self.neg(&self.one()));
            -1
        }
    }

    /// Quadratic character by searching for a square root. Quadratic in `q`;
    /// used as an independent cross-check of [`FieldSpec::legendre`].
    pub fn legendre_bruteforce(&self, x: &FieldElement) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let is_square = self.elements().skip(1).any(|j| &self.mul(&j, &j) == x);
        if is_square {
            1
        } else {
            -1
        }
    }

    /// `sum_i chi(i + r) * chi(i + s)` over the whole field.
    pub fn chi_inner_shifted(&self, r: &FieldElement, s: &FieldElement) -> i64 {
        self.elements()
            .map(|i| {
                self.legendre(&self.add(&i, r)) as i64 * self.legendre(&self.add(&i, s)) as i64
            })
            .sum()
    }

    /// Rank-indexed character table with cheap rank arithmetic.
    pub fn chi_table(&self) -> ChiTable {
        let chi = self.elements().map(|x| self.legendre(&x)).collect();
        ChiTable {
            p: self.p as usize,
            k: self.k as usize,
            q: self.q,
            chi,
        }
    }

    fn find_generator(&self) -> FieldElement {
        let order = (self.q - 1) as u64;
        let cofactors: Vec<i64> = prime_factors(order)
            .into_iter()
            .map(|r| (order / r) as i64)
            .collect();
        let one = self.one();
        self.elements()
            .skip(1)
            .find(|x| {
                cofactors
                    .iter()
                    .all(|&e| self.pow(x, e).expect("nonzero") != one)
            })
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

/// The quadratic character of a field tabulated by rank, together with
/// digit-wise rank addition. Protocol code works on ranks only.
#[derive(Debug, Clone)]
pub struct ChiTable {
    p: usize,
    k: usize,
    q: usize,
    chi: Vec<i8>,
}

impl ChiTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn chi(&self, rank: usize) -> i8 {
        self.chi[rank]
    }

    pub fn values(&self) -> &[i8] {
        &self.chi
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `chi(i + s)` for rank `i` and shift rank `s`.
    pub fn shifted(&self, i: usize, s: usize) -> i8 {
        self.chi[self.add(i, s)]
    }

    pub fn chi_inner_shifted(&self, r: usize, s: usize) -> i64 {
        (0..self.q)
            .map(|i| self.shifted(i, r) as i64 * self.shifted(i, s) as i64)
            .sum()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let (mut rest, mut k) = (q, 0);
    while rest > 1 {
        rest /= p;
        k += 1;
    }
    Some((p, k))
}

/// Remainder of `a` modulo the monic polynomial `m` over `Z_p`
/// (constant term first; `a` is consumed).
fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = a.pop().expect("nonempty");
        if c == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for j in 0..dm {
            a[shift + j] = (a[shift + j] + (p - c) * m[j]) % p;
        }
    }
    a
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `index`, most significant digit first as the constant term.
fn monic_from_index(index: usize, deg: usize, p: u32) -> Vec<u64> {
    let mut poly = vec![0u64; deg + 1];
    poly[deg] = 1;
    let mut r = index;
    for j in (0..deg).rev() {
        poly[j] = (r % p as usize) as u64;
        r /= p as usize;
    }
    poly
}

fn is_irreducible(poly: &[u64], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        for index in 0..(p as usize).pow(d as u32) {
            let divisor = monic_from_index(index, d, p);
            if poly_rem(poly.to_vec(), &divisor, p as u64)
                .iter()
                .all(|&c| c == 0)
            {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let deg = k as usize;
    (0..(p as usize).pow(k))
        .map(|index| monic_from_index(index, deg, p))
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
        .into_iter()
        .map(|c| c as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiplicative order by repeated multiplication.
    fn order_by_powering(f: &FieldSpec, x: &FieldElement) -> usize {
        let one = f.one();
        let mut acc = x.clone();
        let mut n = 1;
        while acc != one {
            acc = f.mul(&acc, x);
            n += 1;
        }
        n
    }

    #[test]
    fn z7_generator_is_three() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.rank(f.generator()), 3);
        // brute force: 1,2 have orders 1,3; 3 has order 6
        let orders: Vec<usize> = (1..7)
            .map(|r| order_by_powering(&f, &f.from_rank(r).unwrap()))
            .collect();
        assert_eq!(orders, vec![1, 3, 6, 3, 6, 2]);
    }

    #[test]
    fn f9_modulus_and_generator() {
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.q(), 9);
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(f.generator().coeffs(), &[1, 1]);
        assert_eq!(order_by_powering(&f, f.generator()), 8);
        for r in 1..f.rank(f.generator()) {
            assert!(order_by_powering(&f, &f.from_rank(r).unwrap()) < 8);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldSpec::new(2, 1), Err(FieldError::EvenCharacteristic(2)));
        assert_eq!(FieldSpec::new(9, 1), Err(FieldError::NotPrime(9)));
        assert_eq!(FieldSpec::new(3, 0), Err(FieldError::ZeroDegree));
        assert!(matches!(
            FieldSpec::new(3, 13),
            Err(FieldError::TooLarge { .. })
        ));
        assert!(FieldSpec::new(3, 12).is_ok());
        assert_eq!(
            FieldSpec::of_order(12),
            Err(FieldError::NotOddPrimePower(12))
        );
        assert_eq!(FieldSpec::of_order(8), Err(FieldError::NotOddPrimePower(8)));
        assert_eq!(FieldSpec::of_order(25).unwrap().k(), 2);
    }

    #[test]
    fn rank_bijection() {
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.rank(&f.zero()), 0);
        assert_eq!(f.rank(&f.element(vec![1, 1]).unwrap()), 4);
        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.rank(&f7.element(vec![5]).unwrap()), 5);
        for r in 0..f.q() {
            assert_eq!(f.rank(&f.from_rank(r).unwrap()), r);
        }
        assert_eq!(
            f.from_rank(9),
            Err(FieldError::RankOutOfRange { rank: 9, q: 9 })
        );
        assert!(f.element(vec![3, 0]).is_err());
        assert!(f.element(vec![1]).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let x = f9.element(vec![0, 1]).unwrap();
        let two_x = f9.element(vec![0, 2]).unwrap();
        assert_eq!(f9.mul(&x, &two_x), f9.one());
        assert_eq!(f9.inv(&x).unwrap(), two_x);
        // inverse by exhaustive search
        for a in f9.elements().skip(1) {
            let found: Vec<_> = f9
                .elements()
                .filter(|b| f9.mul(&a, b) == f9.one())
                .collect();
            assert_eq!(found, vec![f9.inv(&a).unwrap()]);
        }
        let f7 = FieldSpec::new(7, 1).unwrap();
        let three = f7.from_rank(3).unwrap();
        assert_eq!(f7.rank(&f7.inv(&three).unwrap()), 5);
        assert_eq!(f7.inv(&f7.zero()), Err(FieldError::ZeroInverse));
        for a in f9.elements() {
            assert!(f9.add(&a, &f9.neg(&a)).is_zero());
        }
    }

    #[test]
    fn pow_reduces_exponents() {
        let f = FieldSpec::new(5, 2).unwrap();
        let g = f.generator().clone();
        assert_eq!(f.pow(&g, 24).unwrap(), f.one());
        assert_eq!(f.pow(&g, 25).unwrap(), g);
        assert_eq!(f.mul(&f.pow(&g, -1).unwrap(), &g), f.one());
        assert_eq!(f.pow(&f.zero(), 0).unwrap(), f.one());
        assert_eq!(f.pow(&f.zero(), 3).unwrap(), f.zero());
        assert_eq!(f.pow(&f.zero(), -2), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn legendre_examples() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let chi = |r| f7.legendre(&f7.from_rank(r).unwrap());
        assert_eq!(chi(3), -1);
        assert_eq!(chi(0), 0);
        assert_eq!(chi(2), 1);
        let f9 = FieldSpec::new(3, 2).unwrap();
        let g = f9.generator().clone();
        assert_eq!(f9.legendre_bruteforce(&g), -1);
        assert_eq!(f9.legendre_bruteforce(&f9.mul(&g, &g)), 1);
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f3.legendre_bruteforce(&f3.one()), 1);
    }

    #[test]
    fn chi_inner_shifted_examples() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let e = |r| f7.from_rank(r).unwrap();
        assert_eq!(f7.chi_inner_shifted(&e(0), &e(0)), 6);
        assert_eq!(f7.chi_inner_shifted(&e(0), &e(1)), -1);
        let f9 = FieldSpec::new(3, 2).unwrap();
        for s in f9.elements() {
            assert_eq!(f9.chi_inner_shifted(&s, &s), 8);
        }
    }

    #[test]
    fn chi_table_matches_field_ops() {
        for (p, k) in [(3, 1), (5, 1), (3, 2), (5, 2), (3, 3), (7, 2)] {
            let f = FieldSpec::new(p, k).unwrap();
            let t = f.chi_table();
            for a in 0..f.q() {
                let ea = f.from_rank(a).unwrap();
                assert_eq!(t.neg(a), f.rank(&f.neg(&ea)));
                assert_eq!(t.chi(a), f.legendre(&ea));
                for b in 0..f.q() {
                    let eb = f.from_rank(b).unwrap();
                    assert_eq!(t.add(a, b), f.rank(&f.add(&ea, &eb)));
                }
            }
            assert_eq!(
                t.chi_inner_shifted(1, 2),
                f.chi_inner_shifted(&f.from_rank(1).unwrap(), &f.from_rank(2).unwrap())
            );
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(3, 1), (3, 2), (5, 1), (7, 2)] {
            let f = FieldSpec::new(p, k).unwrap();
            let els: Vec<_> = f.elements().collect();
            for a in &els {
                for b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                }
            }
            // associativity / distributivity on a strided sample of triples
            for a in els.iter().step_by(3) {
                for b in els.iter().step_by(2) {
                    for c in &els {
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        assert_eq!(f.add(&f.add(a, b), c), f.add(a, &f.add(b, c)));
                        assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn display_polynomial_notation() {
        let f = FieldSpec::new(3, 3).unwrap();
        assert_eq!(f.zero().to_string(), "0");
        assert_eq!(f.element(vec![1, 1, 0]).unwrap().to_string(), "1+x");
        assert_eq!(f.element(vec![0, 2, 1]).unwrap().to_string(), "2x+x^2");
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(243), Some((3, 5)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(45), None);
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
    }
}

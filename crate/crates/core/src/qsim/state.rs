use num_complex::Complex64;

use super::{CMatrix, QsimError, NORM_TOLERANCE, SUPPORT_EPS, UNITARY_TOLERANCE};

/// Largest number of amplitudes a state may hold.
pub const MAX_AMPLITUDES: usize = 1 << 22;

/// Normalized amplitudes over a product of registers.
///
/// Joint indices are row-major with the first register most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

fn total_dim(dims: &[usize]) -> Result<usize, QsimError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(QsimError::EmptyRegister);
    }
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .filter(|&n| n <= MAX_AMPLITUDES)
            .ok_or(QsimError::TooLarge(acc.saturating_mul(d)))
    })
}

/// `H = [[1, 1], [1, -1]] / sqrt(2)`.
pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[h.into(), h.into(), h.into(), (-h).into()])
}

impl StateVector {
    /// Flat uniform superposition over all joint indices.
    pub fn uniform(dims: &[usize]) -> Result<Self, QsimError> {
        let n = total_dim(dims)?;
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(StateVector {
            dims: dims.to_vec(),
            amps: vec![a; n],
        })
    }

    /// Uniform over one register, every other register in `|0>`.
    pub fn uniform_on(dims: &[usize], register: usize) -> Result<Self, QsimError> {
        let n = total_dim(dims)?;
        let d = *dims
            .get(register)
            .ok_or(QsimError::NoSuchRegister(register))?;
        let stride: usize = dims[register + 1..].iter().product();
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for j in 0..d {
            amps[j * stride] = a;
        }
        Ok(StateVector {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Computational basis state `|indices[0], indices[1], ..>`.
    pub fn basis(dims: &[usize], indices: &[usize]) -> Result<Self, QsimError> {
        let n = total_dim(dims)?;
        if indices.len() != dims.len() {
            return Err(QsimError::DimensionMismatch {
                expected: dims.len(),
                found: indices.len(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        let mut state = StateVector {
            dims: dims.to_vec(),
            amps: Vec::new(),
        };
        let j = state.joint_index(indices)?;
        amps[j] = Complex64::new(1.0, 0.0);
        state.amps = amps;
        Ok(state)
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let n = total_dim(dims)?;
        if amps.len() != n {
            return Err(QsimError::DimensionMismatch {
                expected: n,
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(StateVector {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(dims: &[usize], mut amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QsimError::NotNormalized(norm * norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(dims, amps)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        StateVector { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, joint: usize) -> Complex64 {
        self.amps[joint]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn joint_index(&self, indices: &[usize]) -> Result<usize, QsimError> {
        indices
            .iter()
            .zip(&self.dims)
            .try_fold(0usize, |acc, (&i, &d)| {
                if i >= d {
                    Err(QsimError::IndexOutOfRange { index: i, dim: d })
                } else {
                    Ok(acc * d + i)
                }
            })
    }

    pub fn split_index(&self, mut joint: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = joint % d;
            joint /= d;
        }
        out
    }

    /// `(outer, dim, stride)` such that joint index
    /// `o * dim * stride + v * stride + inner` has value `v` in `register`.
    pub(crate) fn layout(&self, register: usize) -> Result<(usize, usize, usize), QsimError> {
        let d = *self
            .dims
            .get(register)
            .ok_or(QsimError::NoSuchRegister(register))?;
        let outer = self.dims[..register].iter().product();
        let stride = self.dims[register + 1..].iter().product();
        Ok((outer, d, stride))
    }

    /// Value of `register` at a joint index.
    pub fn register_value(&self, joint: usize, register: usize) -> usize {
        let stride: usize = self.dims[register + 1..].iter().product();
        (joint / stride) % self.dims[register]
    }

    /// Applies `u` to one register. `u` must be unitary within 1e-10.
    pub fn apply_unitary(&mut self, u: &CMatrix, target: usize) -> Result<(), QsimError> {
        check_unitary(u)?;
        let (outer, d, stride) = self.layout(target)?;
        if u.nrows() != d {
            return Err(QsimError::DimensionMismatch {
                expected: d,
                found: u.nrows(),
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * d * stride + inner;
                for (v, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[base + v * stride];
                }
                for r in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, &x) in buf.iter().enumerate() {
                        acc += u[(r, c)] * x;
                    }
                    self.amps[base + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Applies `u` to `target` on the subspace where `control` holds
    /// `control_value`.
    pub fn apply_controlled(
        &mut self,
        control: usize,
        control_value: usize,
        u: &CMatrix,
        target: usize,
    ) -> Result<(), QsimError> {
        check_unitary(u)?;
        if control == target {
            return Err(QsimError::NoSuchRegister(control));
        }
        let (_, cd, _) = self.layout(control)?;
        if control_value >= cd {
            return Err(QsimError::IndexOutOfRange {
                index: control_value,
                dim: cd,
            });
        }
        let (outer, d, stride) = self.layout(target)?;
        if u.nrows() != d {
            return Err(QsimError::DimensionMismatch {
                expected: d,
                found: u.nrows(),
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * d * stride + inner;
                if self.register_value(base, control) != control_value {
                    continue;
                }
                for (v, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[base + v * stride];
                }
                for r in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, &x) in buf.iter().enumerate() {
                        acc += u[(r, c)] * x;
                    }
                    self.amps[base + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Multiplies every amplitude by a unit-modulus factor.
    pub fn apply_global_phase(&mut self, phase: Complex64) {
        debug_assert!((phase.norm() - 1.0).abs() < 1e-12);
        self.amps.iter_mut().for_each(|a| *a *= phase);
    }

    /// `psi -> psi - (1 - e^{i phi}) <v|psi> v`: a phase `phi` on the
    /// direction `v`. With `phi = pi` this is the reflection `I - 2|v><v|`.
    pub fn reflect_about(&mut self, v: &StateVector, phi: f64) -> Result<(), QsimError> {
        if v.len() != self.len() {
            return Err(QsimError::DimensionMismatch {
                expected: self.len(),
                found: v.len(),
            });
        }
        let factor = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phi)) * v.inner(self);
        for (a, b) in self.amps.iter_mut().zip(&v.amps) {
            *a -= factor * b;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn reshape(&mut self, dims: &[usize]) -> Result<(), QsimError> {
        let n = total_dim(dims)?;
        if n != self.len() {
            return Err(QsimError::DimensionMismatch {
                expected: self.len(),
                found: n,
            });
        }
        self.dims = dims.to_vec();
        Ok(())
    }

    /// `self (x) ancilla` with the ancilla as a new last register.
    pub fn append_register(&self, ancilla: &[Complex64]) -> Result<StateVector, QsimError> {
        let mut dims = self.dims.clone();
        dims.push(ancilla.len());
        total_dim(&dims)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| ancilla.iter().map(move |&b| a * b))
            .collect();
        Ok(StateVector { dims, amps })
    }

    /// Removes the last register, which must be in the product state
    /// `ancilla` (up to leakage `SUPPORT_EPS`).
    pub fn detach_last(&self, ancilla: &[Complex64]) -> Result<StateVector, QsimError> {
        let d = *self.dims.last().expect("nonempty dims");
        if d != ancilla.len() || self.dims.len() < 2 {
            return Err(QsimError::DimensionMismatch {
                expected: d,
                found: ancilla.len(),
            });
        }
        let amps: Vec<Complex64> = self
            .amps
            .chunks(d)
            .map(|block| block.iter().zip(ancilla).map(|(a, b)| b.conj() * a).sum())
            .collect();
        let leak = (self.norm_sqr() - amps.iter().map(|a| a.norm_sqr()).sum::<f64>()).abs();
        if leak > SUPPORT_EPS {
            return Err(QsimError::Entangled(leak));
        }
        Ok(StateVector {
            dims: self.dims[..self.dims.len() - 1].to_vec(),
            amps,
        })
    }

    /// Removes `register`, which must hold `value` with certainty.
    pub fn drop_register(&self, register: usize, value: usize) -> Result<StateVector, QsimError> {
        let (outer, d, stride) = self.layout(register)?;
        if self.dims.len() < 2 {
            return Err(QsimError::NoSuchRegister(register));
        }
        if value >= d {
            return Err(QsimError::IndexOutOfRange {
                index: value,
                dim: d,
            });
        }
        let mut amps = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            let base = o * d * stride + value * stride;
            amps.extend_from_slice(&self.amps[base..base + stride]);
        }
        let leak = (self.norm_sqr() - amps.iter().map(|a| a.norm_sqr()).sum::<f64>()).abs();
        if leak > SUPPORT_EPS {
            return Err(QsimError::Entangled(leak));
        }
        let mut dims = self.dims.clone();
        dims.remove(register);
        Ok(StateVector { dims, amps })
    }
}

pub(crate) fn check_unitary(u: &CMatrix) -> Result<(), QsimError> {
    if u.nrows() != u.ncols() {
        return Err(QsimError::DimensionMismatch {
            expected: u.nrows(),
            found: u.ncols(),
        });
    }
    let dev = gram_deviation(u);
    if dev > UNITARY_TOLERANCE {
        return Err(QsimError::NotUnitary(dev));
    }
    Ok(())
}

/// `max |(U^H U - I)_{ij}|`.
pub(crate) fn gram_deviation(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[(i, j)] - Complex64::new(want, 0.0)).norm());
        }
    }
    dev
}

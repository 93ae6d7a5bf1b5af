//! Dense statevector over a little-endian qubit register.

use super::{QuantumError, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Largest qubit count simulated unless a caller raises it.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Contiguous qubits `start..start + width`; qubit `start` is the low bit of
/// the register value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Register {
    pub start: usize,
    pub width: usize,
}

impl Register {
    pub fn new(start: usize, width: usize) -> Self {
        Register { start, width }
    }

    pub fn end(&self) -> usize {
        self.start + self.width
    }

    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.start
    }

    pub fn value(&self, basis: usize) -> usize {
        (basis >> self.start) & ((1 << self.width) - 1)
    }

    pub fn shifted(&self, by: usize) -> Self {
        Register { start: self.start + by, width: self.width }
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.start..self.end()
    }
}

/// `p` index registers of `index_width` qubits, then `p` target qubits, then
/// `workspace` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelLayout {
    pub p: usize,
    pub index_width: usize,
    pub workspace: usize,
}

impl ParallelLayout {
    /// Index registers wide enough to address `n` positions.
    pub fn for_input(n: usize, p: usize, workspace: usize) -> Self {
        ParallelLayout { p, index_width: index_width(n), workspace }
    }

    pub fn index(&self, j: usize) -> Register {
        Register::new(j * self.index_width, self.index_width)
    }

    pub fn target(&self, j: usize) -> usize {
        self.p * self.index_width + j
    }

    pub fn workspace(&self) -> Register {
        Register::new(self.p * (self.index_width + 1), self.workspace)
    }

    pub fn qubits(&self) -> usize {
        self.p * (self.index_width + 1) + self.workspace
    }
}

/// `⌈log2 n⌉`, the width addressing `n` values.
pub fn index_width(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `qubits` qubits.
    pub fn new(qubits: usize, cap: usize) -> Result<Self> {
        Self::basis(qubits, 0, cap)
    }

    pub fn basis(qubits: usize, index: usize, cap: usize) -> Result<Self> {
        if qubits > cap {
            return Err(QuantumError::CapExceeded { qubits, cap });
        }
        let mut amps = vec![Complex::new(T::ZERO, T::ZERO); 1 << qubits];
        if index >= amps.len() {
            return Err(QuantumError::LayoutMismatch(format!("basis state {index} on {qubits} qubits")));
        }
        amps[index] = Complex::new(T::ONE, T::ZERO);
        Ok(StateVector { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[cfg(test)]
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect()
    }

    pub fn check_register(&self, reg: Register) -> Result<()> {
        if reg.end() > self.qubits {
            return Err(QuantumError::LayoutMismatch(format!(
                "register {}..{} on {} qubits",
                reg.start,
                reg.end(),
                self.qubits
            )));
        }
        Ok(())
    }

    pub fn check_qubit(&self, q: usize) -> Result<()> {
        self.check_register(Register::new(q, 1))
    }

    pub fn apply_h(&mut self, q: usize) {
        let s = T::FRAC_1_SQRT_2();
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
    }

    /// `H` on `q` in the branch where `control` reads `value`.
    pub fn apply_controlled_h(&mut self, control: usize, value: bool, q: usize) {
        let s = T::FRAC_1_SQRT_2();
        let (bit, cbit) = (1 << q, 1 << control);
        for i in 0..self.amps.len() {
            if i & bit == 0 && (i & cbit != 0) == value {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// `−1` on basis states selected by `pred`.
    pub fn apply_phase_where(&mut self, mut pred: impl FnMut(usize) -> bool) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if pred(i) {
                *a = -*a;
            }
        }
    }

    /// Basis permutation `|i⟩ ↦ |perm(i)⟩`; `perm` must be a bijection.
    pub fn apply_permutation(&mut self, mut perm: impl FnMut(usize) -> usize) {
        let mut out = vec![Complex::new(T::ZERO, T::ZERO); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            out[perm(i)] = a;
        }
        self.amps = out;
    }

    /// Runs `op` on the register's amplitude vector for every assignment of
    /// the other qubits.
    pub fn apply_on_register(&mut self, reg: Register, mut op: impl FnMut(&mut [Complex<T>])) {
        let mask = reg.mask();
        let mut buf = vec![Complex::new(T::ZERO, T::ZERO); 1 << reg.width];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (v, slot) in buf.iter_mut().enumerate() {
                *slot = self.amps[base | v << reg.start];
            }
            op(&mut buf);
            for (v, &a) in buf.iter().enumerate() {
                self.amps[base | v << reg.start] = a;
            }
        }
    }

    /// Distribution of the listed qubits; bit `j` of an outcome is qubit
    /// `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let o = qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (i >> q & 1) << j);
            out[o] += a.norm_sqr().to_f64_lossy();
        }
        out
    }
}

/// `|0⟩ ↔ |u_m⟩` on a register vector, `u_m` uniform over the first `m`
/// values: the Householder reflection through `|0⟩ − |u_m⟩`.
pub(crate) fn uniform_swap<T: Real>(a: &mut [Complex<T>], m: usize) {
    if m <= 1 {
        return;
    }
    let u = T::ONE / T::of(m as f64).sqrt();
    // v = e_0 − u_m, ‖v‖² = 2 − 2u.
    let v = |i: usize| if i == 0 { T::ONE - u } else if i < m { -u } else { T::ZERO };
    let dot = (0..m).fold(Complex::new(T::ZERO, T::ZERO), |acc, i| acc + a[i] * v(i));
    let scale = dot * (T::of(2.0) / (T::of(2.0) - T::of(2.0) * u));
    for (i, x) in a.iter_mut().enumerate().take(m) {
        *x = *x - scale * v(i);
    }
}

/// `2|u_m⟩⟨u_m| − I` on the first `m` values; the rest is untouched.
pub(crate) fn diffusion<T: Real>(a: &mut [Complex<T>], m: usize) {
    let mean = a[..m].iter().fold(Complex::new(T::ZERO, T::ZERO), |acc, &x| acc + x) / T::of(m as f64);
    for x in a[..m].iter_mut() {
        *x = mean * T::of(2.0) - *x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_is_uniform_and_involutive() {
        let mut s = StateVector::<f64>::new(1, DEFAULT_QUBIT_CAP).unwrap();
        s.apply_h(0);
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        s.apply_h(0);
        assert!((s.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(StateVector::<f64>::new(25, 24).unwrap_err(), QuantumError::CapExceeded { qubits: 25, cap: 24 });
    }

    #[test]
    fn uniform_swap_prepares_and_undoes() {
        for m in 1..=8 {
            let mut s = StateVector::<f64>::new(3, 24).unwrap();
            s.apply_on_register(Register::new(0, 3), |a| uniform_swap(a, m));
            let p = s.probabilities();
            for (i, &pi) in p.iter().enumerate() {
                let want = if i < m { 1.0 / m as f64 } else { 0.0 };
                assert!((pi - want).abs() < 1e-12, "m={m} i={i}");
            }
            s.apply_on_register(Register::new(0, 3), |a| uniform_swap(a, m));
            assert!((s.probabilities()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn register_ops_touch_only_their_qubits() {
        let mut s = StateVector::<f64>::basis(3, 0b100, 24).unwrap();
        s.apply_on_register(Register::new(0, 2), |a| uniform_swap(a, 4));
        let m = s.marginal(&[2]);
        assert!((m[1] - 1.0).abs() < 1e-12);
        assert_eq!(index_width(1), 0);
        assert_eq!(index_width(5), 3);
        assert_eq!(index_width(8), 3);
    }
}

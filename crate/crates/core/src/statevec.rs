//! Dense state-vector reference simulator for small registers.
//!
//! Qubit 0 is the most significant bit of the basis index, so the ket
//! `|b_1 b_2 … b_n⟩` has index `b_1 b_2 … b_n` read as a binary number.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{PauliKind, PauliOp};

/// Largest register the oracle accepts.
pub const MAX_QUBITS: usize = 16;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateVecError {
    #[error("{0} qubits exceeds the dense-oracle limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("measurement gates are not supported by the dense oracle")]
    MeasureGate,
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<(), StateVecError> {
    if n > MAX_QUBITS {
        Err(StateVecError::TooLarge(n))
    } else {
        Ok(())
    }
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self, StateVecError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, StateVecError> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateVecError> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(StateVecError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let s = DenseState { n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateVecError::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &DenseState) -> Result<DenseState, StateVecError> {
        let n = self.n + other.n;
        check_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(DenseState { n, amps })
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), StateVecError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        match gate {
            Gate::Measure(_) => return Err(StateVecError::MeasureGate),
            Gate::H(q) => {
                let m = self.mask(q);
                for idx in 0..self.amps.len() {
                    if idx & m == 0 {
                        let (a, b) = (self.amps[idx], self.amps[idx | m]);
                        self.amps[idx] = (a + b) * s;
                        self.amps[idx | m] = (a - b) * s;
                    }
                }
            }
            Gate::S(q) => {
                let m = self.mask(q);
                self.amps
                    .iter_mut()
                    .enumerate()
                    .filter(|(idx, _)| idx & m != 0)
                    .for_each(|(_, a)| *a *= i);
            }
            Gate::X(q) | Gate::Y(q) => {
                let m = self.mask(q);
                let is_y = matches!(gate, Gate::Y(_));
                for idx in 0..self.amps.len() {
                    if idx & m == 0 {
                        let (a0, a1) = (self.amps[idx], self.amps[idx | m]);
                        if is_y {
                            // Y|0> = i|1>, Y|1> = -i|0>
                            self.amps[idx] = -i * a1;
                            self.amps[idx | m] = i * a0;
                        } else {
                            self.amps[idx] = a1;
                            self.amps[idx | m] = a0;
                        }
                    }
                }
            }
            Gate::Z(q) => {
                let m = self.mask(q);
                self.amps
                    .iter_mut()
                    .enumerate()
                    .filter(|(idx, _)| idx & m != 0)
                    .for_each(|(_, a)| *a = -*a);
            }
            Gate::Cnot(c, t) => {
                let (mc, mt) = (self.mask(c), self.mask(t));
                for idx in 0..self.amps.len() {
                    if idx & mc != 0 && idx & mt == 0 {
                        self.amps.swap(idx, idx | mt);
                    }
                }
            }
            Gate::Cz(c, t) => {
                let (mc, mt) = (self.mask(c), self.mask(t));
                self.amps
                    .iter_mut()
                    .enumerate()
                    .filter(|(idx, _)| idx & mc != 0 && idx & mt != 0)
                    .for_each(|(_, a)| *a = -*a);
            }
        }
        Ok(())
    }

    /// `P|ψ⟩` including the operator's phase.
    pub fn apply_pauli(&self, p: &PauliOp) -> Result<DenseState, StateVecError> {
        if p.num_qubits() != self.n {
            return Err(StateVecError::SizeMismatch {
                left: self.n,
                right: p.num_qubits(),
            });
        }
        let mut out = self.clone();
        for q in 0..self.n {
            let g = match p.get(q) {
                PauliKind::I => continue,
                PauliKind::X => Gate::X(q),
                PauliKind::Y => Gate::Y(q),
                PauliKind::Z => Gate::Z(q),
            };
            out.apply_gate(g)?;
        }
        let phase = Complex64::new(0.0, 1.0).powu(p.phase() as u32);
        out.amps.iter_mut().for_each(|a| *a *= phase);
        Ok(out)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64, StateVecError> {
        if self.n != other.n {
            return Err(StateVecError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `⟨ψ|P|ψ⟩`; real part returned (exact for Hermitian `P`).
    pub fn expectation(&self, p: &PauliOp) -> Result<f64, StateVecError> {
        Ok(self.inner(&self.apply_pauli(p)?)?.re)
    }

    /// Probability that a Z measurement of `qubit` yields 1.
    pub fn probability_one(&self, qubit: usize) -> f64 {
        let m = self.mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Post-measurement state for a given outcome, renormalized; `None` if the
    /// outcome has zero probability.
    pub fn project(&self, qubit: usize, outcome: u8) -> Option<DenseState> {
        let m = self.mask(qubit);
        let mut out = self.clone();
        for (idx, a) in out.amps.iter_mut().enumerate() {
            if ((idx & m != 0) as u8) != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = out.norm();
        if norm < 1e-12 {
            return None;
        }
        out.amps.iter_mut().for_each(|a| *a /= norm);
        Some(out)
    }
}

pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64, StateVecError> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Runs a measurement-free circuit on a copy of `initial`.
pub fn run(circuit: &Circuit, initial: &DenseState) -> Result<DenseState, StateVecError> {
    if circuit.num_qubits() > initial.n {
        return Err(StateVecError::SizeMismatch {
            left: initial.n,
            right: circuit.num_qubits(),
        });
    }
    if circuit.gates().iter().any(|g| !g.is_unitary()) {
        return Err(StateVecError::MeasureGate);
    }
    let mut s = initial.clone();
    for &g in circuit.gates() {
        s.apply_gate(g)?;
    }
    Ok(s)
}

/// Explicit `2^n × 2^n` matrix (row-major) of a Pauli operator, built as a
/// Kronecker product of 2×2 factors.
pub fn pauli_matrix(p: &PauliOp) -> Result<Vec<Complex64>, StateVecError> {
    let n = p.num_qubits();
    if n > 6 {
        return Err(StateVecError::TooLarge(n));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let factor = |k: PauliKind| -> [Complex64; 4] {
        match k {
            PauliKind::I => [one, zero, zero, one],
            PauliKind::X => [zero, one, one, zero],
            PauliKind::Y => [zero, -i, i, zero],
            PauliKind::Z => [one, zero, zero, -one],
        }
    };
    let mut mat = vec![i.powu(p.phase() as u32)];
    let mut dim = 1;
    for q in 0..n {
        let f = factor(p.get(q));
        let nd = dim * 2;
        let mut next = vec![zero; nd * nd];
        for r in 0..dim {
            for c in 0..dim {
                for fr in 0..2 {
                    for fc in 0..2 {
                        next[(r * 2 + fr) * nd + c * 2 + fc] = mat[r * dim + c] * f[fr * 2 + fc];
                    }
                }
            }
        }
        mat = next;
        dim = nd;
    }
    Ok(mat)
}

/// Row-major product of two square matrices of dimension `dim`.
pub fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let a_rk = a[r * dim + k];
            if a_rk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += a_rk * b[k * dim + c];
            }
        }
    }
    out
}

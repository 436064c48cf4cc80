//! Stabilizer tableau simulator (destabilizer/stabilizer rows with signs).
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. Each row is a
//! [`PauliOp`] whose bit vectors are packed into 64-bit words; stabilizer
//! rows always carry phase 0 or 2 (a `±` sign).

use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{get_bit, set_bit, PauliError, PauliKind, PauliOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("measurement gate passed to apply_gate on qubit {0}; use measure")]
    MeasureGate(usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("circuit uses {circuit} qubits, tableau has {tableau}")]
    CircuitTooWide { circuit: usize, tableau: usize },
    #[error("cannot measure non-Hermitian operator {0}")]
    NonHermitian(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Result of a single projective measurement; `outcome` is 1 for eigenvalue −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub qubit: Option<usize>,
    pub outcome: u8,
    pub deterministic: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliOp>,
}

impl std::fmt::Debug for Tableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tableau")
            .field("n", &self.n)
            .field("stabilizers", &self.stabilizers().iter().map(|p| p.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl Tableau {
    /// `|0…0⟩` on `n` qubits: destabilizers `X_q`, stabilizers `Z_q`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a tableau needs at least one qubit");
        let mut rows = Vec::with_capacity(2 * n);
        for kind in [PauliKind::X, PauliKind::Z] {
            for q in 0..n {
                rows.push(PauliOp::single(n, q, kind).expect("in range"));
            }
        }
        Tableau { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliOp] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliOp] {
        &self.rows[..self.n]
    }

    /// Appends `extra` qubits in `|0⟩`.
    pub fn extended(&self, extra: usize) -> Tableau {
        let m = self.n + extra;
        let mut rows = Vec::with_capacity(2 * m);
        rows.extend(self.destabilizers().iter().map(|r| r.padded(m)));
        rows.extend((self.n..m).map(|q| PauliOp::single(m, q, PauliKind::X).expect("in range")));
        rows.extend(self.stabilizers().iter().map(|r| r.padded(m)));
        rows.extend((self.n..m).map(|q| PauliOp::single(m, q, PauliKind::Z).expect("in range")));
        Tableau { n: m, rows }
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), TableauError> {
        if qubit >= self.n {
            Err(TableauError::OutOfRange { qubit, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), TableauError> {
        for q in gate.operands() {
            self.check_qubit(q)?;
        }
        match gate {
            Gate::Measure(q) => return Err(TableauError::MeasureGate(q)),
            Gate::H(q) => self.each_row(|x, z, ph| {
                let (xb, zb) = (get_bit(x, q), get_bit(z, q));
                if xb && zb {
                    *ph ^= 2;
                }
                set_bit(x, q, zb);
                set_bit(z, q, xb);
            }),
            Gate::S(q) => self.each_row(|x, z, ph| {
                let (xb, zb) = (get_bit(x, q), get_bit(z, q));
                if xb && zb {
                    *ph ^= 2;
                }
                set_bit(z, q, zb ^ xb);
            }),
            Gate::X(q) => self.each_row(|_, z, ph| {
                if get_bit(z, q) {
                    *ph ^= 2;
                }
            }),
            Gate::Z(q) => self.each_row(|x, _, ph| {
                if get_bit(x, q) {
                    *ph ^= 2;
                }
            }),
            Gate::Y(q) => self.each_row(|x, z, ph| {
                if get_bit(x, q) ^ get_bit(z, q) {
                    *ph ^= 2;
                }
            }),
            Gate::Cnot(c, t) => self.each_row(|x, z, ph| {
                let (xc, zc, xt, zt) = (get_bit(x, c), get_bit(z, c), get_bit(x, t), get_bit(z, t));
                if xc && zt && !(xt ^ zc) {
                    *ph ^= 2;
                }
                set_bit(x, t, xt ^ xc);
                set_bit(z, c, zc ^ zt);
            }),
            Gate::Cz(c, t) => self.each_row(|x, z, ph| {
                let (xc, zc, xt, zt) = (get_bit(x, c), get_bit(z, c), get_bit(x, t), get_bit(z, t));
                if xc && xt && (zc ^ zt) {
                    *ph ^= 2;
                }
                set_bit(z, c, zc ^ xt);
                set_bit(z, t, zt ^ xc);
            }),
        }
        Ok(())
    }

    fn each_row(&mut self, mut f: impl FnMut(&mut [u64], &mut [u64], &mut u8)) {
        for row in &mut self.rows {
            let (x, z, ph) = row.words_mut();
            f(x, z, ph);
        }
    }

    /// Multiplies the state by a Pauli error: every row anti-commuting with it flips sign.
    pub fn apply_error(&mut self, error: &PauliOp) -> Result<(), TableauError> {
        if error.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: error.num_qubits(),
            }
            .into());
        }
        for row in &mut self.rows {
            if row.anticommutes_unchecked(error) {
                *row.words_mut().2 ^= 2;
            }
        }
        Ok(())
    }

    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<Measurement, TableauError> {
        self.check_qubit(qubit)?;
        let z = PauliOp::single(self.n, qubit, PauliKind::Z)?;
        let mut m = self.measure_pauli(&z, rng)?;
        m.qubit = Some(qubit);
        Ok(m)
    }

    /// Projective measurement of a Hermitian Pauli observable.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        observable: &PauliOp,
        rng: &mut R,
    ) -> Result<Measurement, TableauError> {
        self.check_observable(observable)?;
        let n = self.n;
        let pivot = (n..2 * n).find(|&r| self.rows[r].anticommutes_unchecked(observable));
        let Some(p) = pivot else {
            let eigen_neg = self.deterministic_sign(observable);
            return Ok(Measurement {
                qubit: None,
                outcome: eigen_neg as u8,
                deterministic: true,
            });
        };
        let pivot_row = self.rows[p].clone();
        for r in 0..2 * n {
            if r != p && r != p - n && self.rows[r].anticommutes_unchecked(observable) {
                self.rows[r].mul_assign_unchecked(&pivot_row);
                if r < n {
                    // destabilizer signs carry no information
                    self.rows[r] = self.rows[r].unsigned();
                }
            }
        }
        let outcome: bool = rng.random();
        self.rows[p - n] = pivot_row.unsigned();
        let base = observable.phase();
        self.rows[p] = observable
            .clone()
            .with_phase(if outcome { base + 2 } else { base });
        Ok(Measurement {
            qubit: None,
            outcome: outcome as u8,
            deterministic: false,
        })
    }

    fn check_observable(&self, observable: &PauliOp) -> Result<(), TableauError> {
        if observable.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: observable.num_qubits(),
            }
            .into());
        }
        if !observable.is_hermitian() {
            return Err(TableauError::NonHermitian(observable.to_string()));
        }
        Ok(())
    }

    /// For an observable in ±S, whether its eigenvalue is −1.
    fn deterministic_sign(&self, observable: &PauliOp) -> bool {
        let n = self.n;
        let mut acc = PauliOp::identity(n);
        for i in 0..n {
            if self.rows[i].anticommutes_unchecked(observable) {
                acc.mul_assign_unchecked(&self.rows[n + i]);
            }
        }
        debug_assert_eq!(acc.unsigned(), observable.unsigned());
        acc.phase() != observable.phase()
    }

    /// `Some(±1)` when the observable has a definite value, `None` when a
    /// measurement would be uniformly random.
    pub fn expectation(&self, observable: &PauliOp) -> Result<Option<i8>, TableauError> {
        self.check_observable(observable)?;
        if self
            .stabilizers()
            .iter()
            .any(|s| s.anticommutes_unchecked(observable))
        {
            return Ok(None);
        }
        Ok(Some(if self.deterministic_sign(observable) { -1 } else { 1 }))
    }

    /// Measures `qubit` and flips it back to `|0⟩` if needed.
    pub fn reset<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<(), TableauError> {
        if self.measure(qubit, rng)?.outcome == 1 {
            self.apply_gate(Gate::X(qubit))?;
        }
        Ok(())
    }

    /// Executes a circuit; returns one record per `measure` gate in order.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        circuit: &Circuit,
        rng: &mut R,
    ) -> Result<Vec<Measurement>, TableauError> {
        if circuit.num_qubits() > self.n {
            return Err(TableauError::CircuitTooWide {
                circuit: circuit.num_qubits(),
                tableau: self.n,
            });
        }
        let mut records = Vec::new();
        for &g in circuit.gates() {
            match g {
                Gate::Measure(q) => records.push(self.measure(q, rng)?),
                other => self.apply_gate(other)?,
            }
        }
        Ok(records)
    }

    /// Applies only unitary gates; errors on `measure`.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), TableauError> {
        if circuit.num_qubits() > self.n {
            return Err(TableauError::CircuitTooWide {
                circuit: circuit.num_qubits(),
                tableau: self.n,
            });
        }
        circuit.gates().iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// Row-reduced stabilizer generators: GF(2) elimination pivoting on the X
    /// columns (qubit order) then the Z columns. Two tableaus describe the same
    /// state iff these lists are equal.
    pub fn canonical_stabilizers(&self) -> Vec<PauliOp> {
        let mut rows: Vec<PauliOp> = self.stabilizers().to_vec();
        let n = self.n;
        let mut next = 0;
        for pass in 0..2 {
            for q in 0..n {
                let bit = |p: &PauliOp| if pass == 0 { p.x(q) } else { p.z(q) };
                let Some(piv) = (next..rows.len()).find(|&r| bit(&rows[r])) else {
                    continue;
                };
                rows.swap(next, piv);
                let pivot_row = rows[next].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != next && bit(row) {
                        row.mul_assign_unchecked(&pivot_row);
                    }
                }
                next += 1;
            }
        }
        rows
    }

    /// Checks the commutation structure of the rows.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n;
        for i in 0..n {
            let s_i = &self.rows[n + i];
            if !s_i.is_hermitian() {
                return Err(format!("stabilizer {i} has non-real sign"));
            }
            for j in 0..n {
                let s_j = &self.rows[n + j];
                if i < j && s_i.anticommutes_unchecked(s_j) {
                    return Err(format!("stabilizers {i} and {j} anti-commute"));
                }
                let d_i = &self.rows[i];
                if d_i.anticommutes_unchecked(s_j) != (i == j) {
                    return Err(format!("destabilizer {i} vs stabilizer {j} pairing broken"));
                }
                if i < j && d_i.anticommutes_unchecked(&self.rows[j]) {
                    return Err(format!("destabilizers {i} and {j} anti-commute"));
                }
            }
        }
        Ok(())
    }

    /// Signed stabilizer rows, one per line.
    pub fn dump(&self) -> String {
        self.stabilizers()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn fresh_state_measures_zero() {
        let mut t = Tableau::new(1);
        let m = t.measure(0, &mut rng()).unwrap();
        assert_eq!((m.outcome, m.deterministic), (0, true));
        let t3 = Tableau::new(3);
        let rows: Vec<String> = t3.stabilizers().iter().map(|p| p.to_string()).collect();
        assert_eq!(rows, ["+ZII", "+IZI", "+IIZ"]);
        t3.check_invariants().unwrap();
    }

    #[test]
    fn hadamard_is_involution() {
        let mut t = Tableau::new(3);
        t.apply_circuit(&Circuit::from_gates(3, [Gate::H(0), Gate::Cnot(0, 1), Gate::S(2), Gate::H(2)]).unwrap())
            .unwrap();
        let before = t.canonical_stabilizers();
        t.apply_gate(Gate::H(1)).unwrap();
        t.apply_gate(Gate::H(1)).unwrap();
        assert_eq!(t.canonical_stabilizers(), before);
    }

    #[test]
    fn plus_state_statistics() {
        let mut r = rng();
        let mut ones = 0;
        for _ in 0..10_000 {
            let mut t = Tableau::new(1);
            t.apply_gate(Gate::H(0)).unwrap();
            let m = t.measure(0, &mut r).unwrap();
            assert!(!m.deterministic);
            ones += m.outcome as u32;
            // collapsed: second measurement repeats
            let again = t.measure(0, &mut r).unwrap();
            assert!(again.deterministic);
            assert_eq!(again.outcome, m.outcome);
        }
        let freq = ones as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn error_injection() {
        let mut t = Tableau::new(2);
        t.apply_error(&"IX".parse().unwrap()).unwrap();
        let m = t.measure(1, &mut rng()).unwrap();
        assert_eq!((m.outcome, m.deterministic), (1, true));

        let mut t = Tableau::new(1);
        t.apply_error(&"Z".parse().unwrap()).unwrap();
        assert_eq!(t.measure(0, &mut rng()).unwrap().outcome, 0);

        assert!(Tableau::new(2).apply_error(&"X".parse().unwrap()).is_err());
    }

    #[test]
    fn double_injection_restores_state() {
        let mut t = Tableau::new(4);
        t.apply_circuit(&Circuit::from_gates(4, [Gate::H(0), Gate::Cnot(0, 1), Gate::Cz(1, 2), Gate::H(3)]).unwrap())
            .unwrap();
        let before = t.clone();
        let e: PauliOp = "YXZI".parse().unwrap();
        t.apply_error(&e).unwrap();
        assert_ne!(t.canonical_stabilizers(), before.canonical_stabilizers());
        t.apply_error(&e).unwrap();
        assert_eq!(t, before);
    }

    #[test]
    fn cnot_propagates_bit_flip_from_control() {
        // conjugate X_c through CNOT by reading it off as a stabilizer
        let mut t = Tableau::new(2);
        t.apply_gate(Gate::H(0)).unwrap();
        t.apply_gate(Gate::H(1)).unwrap(); // stabilizers XI, IX
        t.apply_gate(Gate::Cnot(0, 1)).unwrap();
        assert_eq!(t.expectation(&"XX".parse().unwrap()).unwrap(), Some(1));
        assert_eq!(t.expectation(&"IX".parse().unwrap()).unwrap(), Some(1));
    }

    #[test]
    fn measure_gate_rejected() {
        let mut t = Tableau::new(1);
        assert_eq!(t.apply_gate(Gate::Measure(0)), Err(TableauError::MeasureGate(0)));
        assert!(t.apply_gate(Gate::H(1)).is_err());
    }

    #[test]
    fn pauli_measurement_of_bell_parity() {
        let mut t = Tableau::new(2);
        t.apply_gate(Gate::H(0)).unwrap();
        t.apply_gate(Gate::Cnot(0, 1)).unwrap();
        let mut r = rng();
        let zz = t.measure_pauli(&"ZZ".parse().unwrap(), &mut r).unwrap();
        assert_eq!((zz.outcome, zz.deterministic), (0, true));
        let yy = t.measure_pauli(&"YY".parse().unwrap(), &mut r).unwrap();
        assert_eq!((yy.outcome, yy.deterministic), (1, true));
        let zi = t.measure_pauli(&"ZI".parse().unwrap(), &mut r).unwrap();
        assert!(!zi.deterministic);
        t.check_invariants().unwrap();
        assert!(t.measure_pauli(&"iZI".parse().unwrap(), &mut r).is_err());
    }

    #[test]
    fn extended_appends_zero_qubits() {
        let mut t = Tableau::new(1);
        t.apply_gate(Gate::H(0)).unwrap();
        let wide = t.extended(2);
        wide.check_invariants().unwrap();
        assert_eq!(wide.dump(), "+XII\n+IZI\n+IIZ");
    }

    #[test]
    fn circuit_then_inverse_returns_to_start() {
        let c = Circuit::from_gates(
            3,
            [Gate::H(0), Gate::S(0), Gate::Cnot(0, 2), Gate::Cz(2, 1), Gate::Y(1), Gate::H(2), Gate::S(1)],
        )
        .unwrap();
        let mut t = Tableau::new(3);
        t.apply_circuit(&c).unwrap();
        t.check_invariants().unwrap();
        t.apply_circuit(&c.inverse().unwrap()).unwrap();
        assert_eq!(t.canonical_stabilizers(), Tableau::new(3).canonical_stabilizers());
    }
}

//! Correction of one time-correlated error plus one new error per cycle.
//!
//! The qubit `j` corrected in the previous cycle is copied onto two extra
//! ancillas before the next syndrome round: `A` via `CNOT(j, A)` (Z-basis copy,
//! catches bit flips) and `B` via `H(j) CNOT(j, B) H(j)` (X-basis copy, catches
//! phase flips). The code generators are extended so they keep stabilizing the
//! entangled state, the extended syndrome `Σ` is measured, the copy is undone,
//! and the two ancilla outcomes name the type of any relapse on `j`.
//!
//! Register layout for a code with `n` qubits and `m` generators:
//! data `0..n`, `A = n`, `B = n + 1`, syndrome ancillas `n + 2 .. n + 2 + m`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::circuit::{hcnot, Circuit, CircuitError, Gate};
use crate::codes::{extraction_gates, CodeError, Decoded, StabilizerCode, Syndrome};
use crate::pauli::{PauliError, PauliKind, PauliOp};
use crate::tableau::{Tableau, TableauError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("tracked qubit {qubit} out of range for {n} qubits")]
    TrackedOutOfRange { qubit: usize, n: usize },
    #[error("error site {0} out of range")]
    SiteOutOfRange(String),
    #[error("state has {found} qubits, protocol needs {expected}")]
    StateSize { expected: usize, found: usize },
    #[error("invalid injected error {0:?}")]
    ParseError(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Where an injected error lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorSite {
    /// Data qubit, 0-based.
    Data(usize),
    AncillaA,
    AncillaB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InjectedError {
    pub site: ErrorSite,
    pub kind: PauliKind,
}

impl InjectedError {
    pub fn data(qubit: usize, kind: PauliKind) -> Self {
        InjectedError {
            site: ErrorSite::Data(qubit),
            kind,
        }
    }
}

impl fmt::Display for InjectedError {
    /// `Z3`, `XA`, `YB` (data qubits 1-based).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            ErrorSite::Data(q) => write!(f, "{}{}", self.kind, q + 1),
            ErrorSite::AncillaA => write!(f, "{}A", self.kind),
            ErrorSite::AncillaB => write!(f, "{}B", self.kind),
        }
    }
}

impl FromStr for InjectedError {
    type Err = ProtocolError;

    /// Accepts `Z3`, `3 Z`, `A X` or `XA` (1-based data qubits).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProtocolError::ParseError(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
        if compact.len() < 2 {
            return Err(bad());
        }
        let (kind, site) = {
            let first = compact.chars().next().expect("non-empty");
            let last = compact.chars().last().expect("non-empty");
            match (PauliKind::from_symbol(first), PauliKind::from_symbol(last)) {
                (Some(k), _) if k != PauliKind::I => (k, &compact[1..]),
                (_, Some(k)) if k != PauliKind::I => (k, &compact[..compact.len() - 1]),
                _ => return Err(bad()),
            }
        };
        let site = match site.to_ascii_uppercase().as_str() {
            "A" => ErrorSite::AncillaA,
            "B" => ErrorSite::AncillaB,
            num => match num.parse::<usize>() {
                Ok(q) if q >= 1 => ErrorSite::Data(q - 1),
                _ => return Err(bad()),
            },
        };
        Ok(InjectedError { site, kind })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NoError,
    /// One error; covers a new error alone, a relapse alone, or an ancilla
    /// error that propagated onto the tracked qubit.
    Single(PauliOp),
    Double {
        correlated: PauliOp,
        new: PauliOp,
    },
    Uncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionDecision {
    pub verdict: Verdict,
    /// Pauli applied to the data qubits.
    pub correction: PauliOp,
}

fn describe(p: &PauliOp) -> String {
    p.support()
        .into_iter()
        .map(|q| format!("{} on qubit {}", p.get(q), q + 1))
        .collect::<Vec<_>>()
        .join(" and ")
}

impl fmt::Display for CorrectionDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::NoError => write!(f, "no correction"),
            Verdict::Single(e) => write!(f, "correct {}", describe(e)),
            Verdict::Double { correlated, new } => {
                write!(f, "correct {} and {}", describe(correlated), describe(new))
            }
            Verdict::Uncorrectable => write!(f, "uncorrectable"),
        }
    }
}

impl CorrectionDecision {
    pub fn kind_name(&self) -> &'static str {
        match self.verdict {
            Verdict::NoError => "no_error",
            Verdict::Single(_) => "single",
            Verdict::Double { .. } => "double",
            Verdict::Uncorrectable => "uncorrectable",
        }
    }
}

/// Extended syndrome and ancilla bits `(A, B)` from one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleOutcome {
    pub sigma: Syndrome,
    pub ancilla: (u8, u8),
}

impl CycleOutcome {
    pub fn ancilla_string(&self) -> String {
        format!("{}{}", self.ancilla.0, self.ancilla.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub outcome: CycleOutcome,
    pub decision: CorrectionDecision,
    /// Every code generator has value +1 on the data after correction.
    pub valid: bool,
}

/// Generators on `n + 2` qubits: X on `j` gains `X_A`, Z on `j` gains `X_B`,
/// Y on `j` gains both.
pub fn extended_generators(code: &StabilizerCode, tracked: usize) -> Result<Vec<PauliOp>, ProtocolError> {
    let n = code.n;
    if tracked >= n {
        return Err(ProtocolError::TrackedOutOfRange { qubit: tracked, n });
    }
    Ok(code
        .generators
        .iter()
        .map(|g| {
            let mut e = g.padded(n + 2);
            let (x, z) = (g.x(tracked), g.z(tracked));
            if x {
                e.set(n, PauliKind::X);
            }
            if z {
                e.set(n + 1, PauliKind::X);
            }
            e
        })
        .collect())
}

/// Whether every code generator is deterministically +1 on the data qubits.
pub fn codeword_valid(code: &StabilizerCode, state: &Tableau) -> Result<bool, ProtocolError> {
    let width = state.num_qubits();
    for g in &code.generators {
        if state.expectation(&g.padded(width))? != Some(1) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct ExtendedProtocol {
    code: StabilizerCode,
    tracked: usize,
    entangle: Circuit,
    disentangle: Circuit,
    extended_generators: Vec<PauliOp>,
    extraction: Circuit,
}

impl ExtendedProtocol {
    pub fn new(code: StabilizerCode, tracked: usize) -> Result<Self, ProtocolError> {
        let n = code.n;
        let extended = extended_generators(&code, tracked)?;
        let (a, b) = (n, n + 1);
        let total = n + 2 + code.generators.len();

        let mut entangle = Circuit::new(n + 2);
        entangle.push(Gate::Cnot(tracked, a))?;
        entangle.extend(hcnot(tracked, b)?)?;
        let disentangle = Circuit::from_gates(n + 2, entangle.gates().iter().rev().copied())?;

        let mut extraction = Circuit::new(total);
        for (i, g) in extended.iter().enumerate() {
            let anc = n + 2 + i;
            extraction.extend(extraction_gates(&g.padded(total), anc))?;
            extraction.push(Gate::Measure(anc))?;
        }
        Ok(ExtendedProtocol {
            code,
            tracked,
            entangle,
            disentangle,
            extended_generators: extended,
            extraction,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    /// Tracked qubit, 0-based.
    pub fn tracked(&self) -> usize {
        self.tracked
    }

    pub fn ancilla_a(&self) -> usize {
        self.code.n
    }

    pub fn ancilla_b(&self) -> usize {
        self.code.n + 1
    }

    pub fn total_qubits(&self) -> usize {
        self.code.n + 2 + self.code.generators.len()
    }

    pub fn entangle_circuit(&self) -> &Circuit {
        &self.entangle
    }

    pub fn disentangle_circuit(&self) -> &Circuit {
        &self.disentangle
    }

    pub fn extended_generators(&self) -> &[PauliOp] {
        &self.extended_generators
    }

    /// Extended-syndrome extraction with one fresh ancilla per generator.
    pub fn extraction_circuit(&self) -> &Circuit {
        &self.extraction
    }

    /// Codeword on the data qubits, every ancilla in `|0⟩`.
    pub fn fresh_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Tableau, ProtocolError> {
        let data = self.code.prepared_tableau(rng)?;
        Ok(data.extended(self.total_qubits() - self.code.n))
    }

    fn check_state(&self, state: &Tableau) -> Result<(), ProtocolError> {
        if state.num_qubits() != self.total_qubits() {
            return Err(ProtocolError::StateSize {
                expected: self.total_qubits(),
                found: state.num_qubits(),
            });
        }
        Ok(())
    }

    /// Resets `A` and `B` and copies the tracked qubit onto them.
    pub fn entangle<R: Rng + ?Sized>(&self, state: &mut Tableau, rng: &mut R) -> Result<(), ProtocolError> {
        self.check_state(state)?;
        state.reset(self.ancilla_a(), rng)?;
        state.reset(self.ancilla_b(), rng)?;
        state.apply_circuit(&self.entangle)?;
        Ok(())
    }

    pub fn error_operator(&self, errors: &[InjectedError]) -> Result<PauliOp, ProtocolError> {
        let total = self.total_qubits();
        let mut op = PauliOp::identity(total);
        for e in errors {
            let q = match e.site {
                ErrorSite::Data(q) if q < self.code.n => q,
                ErrorSite::Data(_) => return Err(ProtocolError::SiteOutOfRange(e.to_string())),
                ErrorSite::AncillaA => self.ancilla_a(),
                ErrorSite::AncillaB => self.ancilla_b(),
            };
            op.mul_assign_unchecked(&PauliOp::single(total, q, e.kind)?);
        }
        Ok(op.unsigned())
    }

    /// Injects `errors`, measures the extended syndrome, disentangles, and
    /// measures `A` then `B`. `state` must already be entangled.
    pub fn run_cycle<R: Rng + ?Sized>(
        &self,
        state: &mut Tableau,
        errors: &[InjectedError],
        rng: &mut R,
    ) -> Result<CycleOutcome, ProtocolError> {
        self.check_state(state)?;
        state.apply_error(&self.error_operator(errors)?)?;
        let first_anc = self.code.n + 2;
        for anc in first_anc..self.total_qubits() {
            state.reset(anc, rng)?;
        }
        let records = state.run(&self.extraction, rng)?;
        let sigma = Syndrome::new(
            records
                .iter()
                .zip(&self.extended_generators)
                .map(|(m, g)| (m.outcome == 1) ^ g.is_negative())
                .collect(),
        );
        state.apply_circuit(&self.disentangle)?;
        let a = state.measure(self.ancilla_a(), rng)?.outcome;
        let b = state.measure(self.ancilla_b(), rng)?.outcome;
        Ok(CycleOutcome { sigma, ancilla: (a, b) })
    }

    fn single_on_tracked(&self, kind: PauliKind) -> PauliOp {
        PauliOp::single(self.code.n, self.tracked, kind).expect("tracked in range")
    }

    /// Decision rule: a syndrome of any error on the tracked qubit wins; with
    /// ancillas `00` fall back to single-error decoding; otherwise the ancillas
    /// name the relapse type (`10` X, `01` Z, `11` Y) and the remainder of `Σ`
    /// is decoded as the new error.
    pub fn decide(&self, sigma: &Syndrome, ancilla: (u8, u8)) -> CorrectionDecision {
        let n = self.code.n;
        let decision = |verdict: Verdict, correction: PauliOp| CorrectionDecision { verdict, correction };
        if !sigma.is_zero() {
            for kind in PauliKind::ERRORS {
                let e = self.single_on_tracked(kind);
                if self.code.syndrome_of(&e).expect("sized") == *sigma {
                    return decision(Verdict::Single(e.clone()), e);
                }
            }
        }
        let relapse = match ancilla {
            (0, 0) => None,
            (1, 0) => Some(PauliKind::X),
            (0, 1) => Some(PauliKind::Z),
            _ => Some(PauliKind::Y),
        };
        match relapse {
            None => match self.code.decode_single(sigma) {
                Decoded::NoError => decision(Verdict::NoError, PauliOp::identity(n)),
                Decoded::Correct(e) => decision(Verdict::Single(e.clone()), e),
                Decoded::Uncorrectable => decision(Verdict::Uncorrectable, PauliOp::identity(n)),
            },
            Some(kind) => {
                let correlated = self.single_on_tracked(kind);
                match self
                    .code
                    .decode_with_prior(sigma, &correlated)
                    .expect("sized")
                {
                    Decoded::NoError => decision(Verdict::Single(correlated.clone()), correlated),
                    // Σ = 0 with flipped ancillas: the two readings cancel
                    Decoded::Correct(new) if new.unsigned() == correlated.unsigned() => {
                        decision(Verdict::NoError, PauliOp::identity(n))
                    }
                    Decoded::Correct(new) => {
                        let correction = correlated.multiply(&new).expect("sized").unsigned();
                        decision(Verdict::Double { correlated, new }, correction)
                    }
                    Decoded::Uncorrectable => decision(Verdict::Uncorrectable, PauliOp::identity(n)),
                }
            }
        }
    }

    /// `run_cycle`, `decide`, then applies the correction to the data.
    pub fn full_cycle<R: Rng + ?Sized>(
        &self,
        state: &mut Tableau,
        errors: &[InjectedError],
        rng: &mut R,
    ) -> Result<CycleReport, ProtocolError> {
        let outcome = self.run_cycle(state, errors, rng)?;
        let decision = self.decide(&outcome.sigma, outcome.ancilla);
        state.apply_error(&decision.correction.padded(state.num_qubits()))?;
        let valid = codeword_valid(&self.code, state)?;
        Ok(CycleReport {
            outcome,
            decision,
            valid,
        })
    }
}

/// Ordinary syndrome round with the code's own generators on the same
/// register layout (ancillas `A`, `B` untouched).
pub fn plain_cycle<R: Rng + ?Sized>(
    code: &StabilizerCode,
    state: &mut Tableau,
    errors: &[PauliOp],
    rng: &mut R,
) -> Result<(Syndrome, Decoded), ProtocolError> {
    let n = code.n;
    let width = state.num_qubits();
    let needed = n + 2 + code.generators.len();
    if width != needed {
        return Err(ProtocolError::StateSize {
            expected: needed,
            found: width,
        });
    }
    for e in errors {
        state.apply_error(&e.padded(width))?;
    }
    let mut bits = Vec::with_capacity(code.generators.len());
    for (i, g) in code.generators.iter().enumerate() {
        let anc = n + 2 + i;
        state.reset(anc, rng)?;
        let mut c = Circuit::new(width);
        c.extend(extraction_gates(&g.padded(width), anc))?;
        state.apply_circuit(&c)?;
        bits.push((state.measure(anc, rng)?.outcome == 1) ^ g.is_negative());
    }
    let sigma = Syndrome::new(bits);
    let decoded = code.decode_single(&sigma);
    if let Decoded::Correct(e) = &decoded {
        state.apply_error(&e.padded(width))?;
    }
    Ok((sigma, decoded))
}

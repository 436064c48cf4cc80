//! Clifford circuit representation and the `.stab` text format.
//!
//! ```text
//! # Steane |0> preparation (excerpt)
//! qubits 7
//! h 5
//! cnot 7 4
//! cz 2 3
//! measure 1
//! ```
//!
//! The first non-comment line declares the qubit count. Indices in text are
//! 1-based; [`Gate`] operands are 0-based. Long mnemonics
//! (`hadamard`, `cphase`, `bitflip`, `phaseflip`) are accepted as
//! aliases and always emitted in short form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Measure(usize),
}

impl Gate {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::S(_) => "s",
            Gate::X(_) => "x",
            Gate::Y(_) => "y",
            Gate::Z(_) => "z",
            Gate::Cnot(..) => "cnot",
            Gate::Cz(..) => "cz",
            Gate::Measure(_) => "measure",
        }
    }

    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Measure(q) => {
                vec![q]
            }
            Gate::Cnot(c, t) | Gate::Cz(c, t) => vec![c, t],
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Measure(_))
    }

    fn from_mnemonic(name: &str, ops: &[usize]) -> Result<Gate, ParseErrorKind> {
        let lower = name.to_ascii_lowercase();
        let (canonical, arity) = match lower.as_str() {
            "h" | "hadamard" => ("h", 1),
            "s" => ("s", 1),
            "x" | "bitflip" => ("x", 1),
            "y" => ("y", 1),
            "z" | "phaseflip" => ("z", 1),
            "measure" => ("measure", 1),
            "cnot" => ("cnot", 2),
            "cz" | "cphase" => ("cz", 2),
            _ => return Err(ParseErrorKind::UnknownMnemonic(name.to_string())),
        };
        if ops.len() != arity {
            return Err(ParseErrorKind::Arity {
                mnemonic: canonical.to_string(),
                expected: arity,
                found: ops.len(),
            });
        }
        Ok(match canonical {
            "h" => Gate::H(ops[0]),
            "s" => Gate::S(ops[0]),
            "x" => Gate::X(ops[0]),
            "y" => Gate::Y(ops[0]),
            "z" => Gate::Z(ops[0]),
            "measure" => Gate::Measure(ops[0]),
            "cnot" => Gate::Cnot(ops[0], ops[1]),
            _ => Gate::Cz(ops[0], ops[1]),
        })
    }
}

impl fmt::Display for Gate {
    /// One DSL line with 1-based operands.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mnemonic())?;
        for q in self.operands() {
            write!(f, " {}", q + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    OutOfRange { qubit: usize, num_qubits: usize },
    #[error("two-qubit gate with identical operands ({0})")]
    DuplicateOperands(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `qubits N` header")]
    MissingHeader,
    #[error("invalid qubit count {0:?}")]
    BadQubitCount(String),
    #[error("unknown mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("{mnemonic} takes {expected} operand(s), found {found}")]
    Arity {
        mnemonic: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid operand {0:?}")]
    BadOperand(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(
        num_qubits: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        for q in gate.operands() {
            if q >= self.num_qubits {
                return Err(CircuitError::OutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        if let Gate::Cnot(c, t) | Gate::Cz(c, t) = gate {
            if c == t {
                return Err(CircuitError::DuplicateOperands(c));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Same gates on a wider register.
    pub fn widened(&self, num_qubits: usize) -> Circuit {
        assert!(num_qubits >= self.num_qubits);
        Circuit {
            num_qubits,
            gates: self.gates.clone(),
        }
    }

    /// Gates in reverse order with each gate inverted. `None` if the circuit measures.
    pub fn inverse(&self) -> Option<Circuit> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match *g {
                Gate::Measure(_) => return None,
                Gate::S(q) => gates.extend([Gate::S(q); 3]),
                other => gates.push(other),
            }
        }
        Some(Circuit {
            num_qubits: self.num_qubits,
            gates,
        })
    }

    pub fn parse(text: &str) -> Result<Circuit, ParseError> {
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |kind| ParseError { line, kind };
            // Accept both `cnot 1 2` and `cnot(1, 2)`.
            let normalized = content.replace(['(', ')', ','], " ");
            let mut tokens = normalized.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            let rest: Vec<&str> = tokens.collect();
            match circuit.as_mut() {
                None => {
                    if !head.eq_ignore_ascii_case("qubits") {
                        return Err(err(ParseErrorKind::MissingHeader));
                    }
                    let n = match rest.as_slice() {
                        [v] => v
                            .parse::<usize>()
                            .ok()
                            .filter(|&n| n > 0)
                            .ok_or_else(|| err(ParseErrorKind::BadQubitCount(v.to_string())))?,
                        _ => return Err(err(ParseErrorKind::BadQubitCount(rest.join(" ")))),
                    };
                    circuit = Some(Circuit::new(n));
                }
                Some(c) => {
                    let ops = rest
                        .iter()
                        .map(|t| match t.parse::<usize>() {
                            Ok(v) if v >= 1 => Ok(v - 1),
                            _ => Err(err(ParseErrorKind::BadOperand(t.to_string()))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let gate = Gate::from_mnemonic(head, &ops).map_err(err)?;
                    c.push(gate).map_err(|e| err(e.into()))?;
                }
            }
        }
        circuit.ok_or(ParseError {
            line: text.lines().count().max(1),
            kind: ParseErrorKind::MissingHeader,
        })
    }

    /// Canonical text: header, then one lowercase gate per line, 1-based.
    pub fn emit(&self) -> String {
        let mut out = format!("qubits {}", self.num_qubits);
        for g in &self.gates {
            out.push('\n');
            out.push_str(&g.to_string());
        }
        out
    }
}

impl FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Circuit::parse(s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

/// `H(control) CNOT(control, target) H(control)`: copies the control in the X basis.
pub fn hcnot(control: usize, target: usize) -> Result<[Gate; 3], CircuitError> {
    if control == target {
        return Err(CircuitError::DuplicateOperands(control));
    }
    Ok([Gate::H(control), Gate::Cnot(control, target), Gate::H(control)])
}

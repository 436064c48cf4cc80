//! Stabilizer codes: definitions, validation, syndromes and table decoding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::pauli::{PauliError, PauliKind, PauliOp};
use crate::statevec::DenseState;
use crate::tableau::{Tableau, TableauError};

/// Brute-force distance is limited to `4^8` candidate operators.
pub const MAX_DISTANCE_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("unknown builtin code {0:?} (expected five_qubit or steane)")]
    UnknownBuiltin(String),
    #[error("error acts on {found} qubits, code has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("brute-force distance supports n <= {MAX_DISTANCE_QUBITS}, code has n = {0}")]
    DistanceTooLarge(usize),
    #[error("code encodes no logical qubits")]
    NoLogicalQubits,
    #[error("generators are not independent")]
    DependentGenerators,
    #[error("code definition line {line}: {message}")]
    Definition { line: usize, message: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Ordered syndrome bits `(f_M1 … f_Mm)`, rendered left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome {
    bits: Vec<bool>,
}

impl Syndrome {
    pub fn new(bits: Vec<bool>) -> Self {
        Syndrome { bits }
    }

    pub fn zero(len: usize) -> Self {
        Syndrome {
            bits: vec![false; len],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        assert_eq!(self.len(), other.len(), "syndrome length mismatch");
        Syndrome {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// 0-based indices of the set bits.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Syndrome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("invalid syndrome {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Syndrome::new)
    }
}

/// Outcome of a table lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    NoError,
    Correct(PauliOp),
    Uncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub error: PauliOp,
    pub syndrome: Syndrome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub syndrome: Syndrome,
    pub errors: Vec<PauliOp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeTable {
    pub max_weight: usize,
    /// Every enumerated error in enumeration order.
    pub rows: Vec<TableRow>,
    /// Syndromes produced by exactly one enumerated error.
    pub entries: BTreeMap<Syndrome, PauliOp>,
    pub collisions: Vec<Collision>,
    /// Non-identity errors with a trivial syndrome.
    pub undetectable: Vec<PauliOp>,
}

impl SyndromeTable {
    pub fn is_collision_free(&self) -> bool {
        self.collisions.is_empty() && self.undetectable.is_empty()
    }

    pub fn lookup(&self, s: &Syndrome) -> Option<&PauliOp> {
        self.entries.get(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// `(expected n-k, found)` when the generator count is wrong.
    pub count_mismatch: Option<(usize, usize)>,
    pub non_hermitian: Vec<usize>,
    pub non_commuting: Vec<(usize, usize)>,
    /// Generator subsets whose product is `+I`.
    pub dependent: Vec<Vec<usize>>,
    pub minus_identity: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.count_mismatch.is_none()
            && self.non_hermitian.is_empty()
            && self.non_commuting.is_empty()
            && self.dependent.is_empty()
            && !self.minus_identity
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some((want, got)) = self.count_mismatch {
            out.push(format!("expected {want} generators, found {got}"));
        }
        for g in &self.non_hermitian {
            out.push(format!("M{} is not Hermitian", g + 1));
        }
        for (a, b) in &self.non_commuting {
            out.push(format!("M{} and M{} anti-commute", a + 1, b + 1));
        }
        for set in &self.dependent {
            let names: Vec<_> = set.iter().map(|g| format!("M{}", g + 1)).collect();
            out.push(format!("dependent generators: {}", names.join("·")));
        }
        if self.minus_identity {
            out.push("-I is generated".to_string());
        }
        out
    }
}

/// Row-reduced GF(2) span of generator bit vectors, tracking which generators
/// combine into each reduced row.
struct Span {
    n: usize,
    rows: Vec<(Vec<bool>, usize, Vec<bool>)>,
    /// Generator combinations that reduce to the zero vector.
    null: Vec<Vec<bool>>,
}

fn symplectic(p: &PauliOp) -> Vec<bool> {
    let mut v = p.x_bits();
    v.extend(p.z_bits());
    v
}

impl Span {
    fn new(n: usize, generators: &[PauliOp]) -> Span {
        let m = generators.len();
        let mut span = Span {
            n,
            rows: Vec::new(),
            null: Vec::new(),
        };
        for (i, g) in generators.iter().enumerate() {
            let mut combo = vec![false; m];
            combo[i] = true;
            let (v, combo) = span.reduce(symplectic(g), combo);
            match v.iter().position(|&b| b) {
                Some(pivot) => {
                    for (row, _, row_combo) in span.rows.iter_mut() {
                        if row[pivot] {
                            xor_into(row, &v);
                            xor_into(row_combo, &combo);
                        }
                    }
                    span.rows.push((v, pivot, combo));
                }
                None => span.null.push(combo),
            }
        }
        span
    }

    fn reduce(&self, mut v: Vec<bool>, mut combo: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
        for (row, pivot, row_combo) in &self.rows {
            if v[*pivot] {
                xor_into(&mut v, row);
                xor_into(&mut combo, row_combo);
            }
        }
        (v, combo)
    }

    /// Generator subset whose product has the same bits as `p`.
    fn express(&self, p: &PauliOp) -> Option<Vec<bool>> {
        debug_assert_eq!(p.num_qubits(), self.n);
        let m = self.rows.first().map_or(0, |r| r.2.len());
        let (rest, combo) = self.reduce(symplectic(p), vec![false; m]);
        rest.iter().all(|b| !b).then_some(combo)
    }
}

fn xor_into(a: &mut [bool], b: &[bool]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Ordered product of the selected generators.
fn product(n: usize, generators: &[PauliOp], combo: &[bool]) -> PauliOp {
    let mut acc = PauliOp::identity(n);
    for (g, &used) in generators.iter().zip(combo) {
        if used {
            acc.mul_assign_unchecked(g);
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliOp>,
    pub declared_distance: Option<usize>,
    /// `|0_L⟩`, `|1_L⟩` amplitude tables when known.
    pub logical_states: Option<[DenseState; 2]>,
    pub encoding_circuit: Option<Circuit>,
    single_table: OnceLock<SyndromeTable>,
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.n == other.n
            && self.k == other.k
            && self.generators == other.generators
            && self.declared_distance == other.declared_distance
    }
}

// |0_L> and |1_L> of the five-qubit code as signed basis kets, coefficient 1/4.
const FIVE_QUBIT_ZERO: &str = "+00000 +10010 +01001 +10100 +01010 -11011 -00110 -11000 \
                               -11101 -00011 -11110 -01111 -10001 -01100 -10111 +00101";
const FIVE_QUBIT_ONE: &str = "+11111 +01101 +10110 +01011 +10101 -00100 -11001 -00111 \
                              -00010 -11100 -00001 -10000 -01110 -10011 -01000 +11010";

/// Steane `|0_L>` encoder on qubits 1-7.
pub const STEANE_ENCODER: &str = "\
# Steane |0_L> preparation
qubits 7
h 5
h 6
h 7
cnot 7 4
cnot 7 2
cnot 7 1
cnot 6 4
cnot 6 3
cnot 6 1
cnot 5 4
cnot 5 3
cnot 5 2
";

fn signed_ket_table(spec: &str) -> DenseState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 32];
    for term in spec.split_whitespace() {
        let (sign, bits) = term.split_at(1);
        let idx = usize::from_str_radix(bits, 2).expect("binary ket");
        amps[idx] = Complex64::new(if sign == "-" { -0.25 } else { 0.25 }, 0.0);
    }
    DenseState::from_amplitudes(amps).expect("normalized table")
}

impl StabilizerCode {
    pub fn new(name: impl Into<String>, n: usize, k: usize, generators: Vec<PauliOp>) -> Result<Self, CodeError> {
        for g in &generators {
            if g.num_qubits() != n {
                return Err(CodeError::SizeMismatch {
                    expected: n,
                    found: g.num_qubits(),
                });
            }
        }
        Ok(StabilizerCode {
            name: name.into(),
            n,
            k,
            generators,
            declared_distance: None,
            logical_states: None,
            encoding_circuit: None,
            single_table: OnceLock::new(),
        })
    }

    pub fn five_qubit() -> Self {
        let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].map(|s| s.parse().expect("valid"));
        let mut code = StabilizerCode::new("five_qubit", 5, 1, gens.to_vec()).expect("consistent");
        code.declared_distance = Some(3);
        code.logical_states = Some([signed_ket_table(FIVE_QUBIT_ZERO), signed_ket_table(FIVE_QUBIT_ONE)]);
        code
    }

    pub fn steane() -> Self {
        let gens = ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"]
            .map(|s| s.parse().expect("valid"));
        let mut code = StabilizerCode::new("steane", 7, 1, gens.to_vec()).expect("consistent");
        code.declared_distance = Some(3);
        code.encoding_circuit = Some(Circuit::parse(STEANE_ENCODER).expect("valid encoder"));
        code
    }

    pub fn builtin(name: &str) -> Result<Self, CodeError> {
        match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "five_qubit" | "5qubit" | "five" => Ok(Self::five_qubit()),
            "steane" | "steane7" => Ok(Self::steane()),
            _ => Err(CodeError::UnknownBuiltin(name.to_string())),
        }
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let want = self.n.saturating_sub(self.k);
        if self.generators.len() != want {
            report.count_mismatch = Some((want, self.generators.len()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if !g.is_hermitian() {
                report.non_hermitian.push(i);
            }
            for (j, h) in self.generators.iter().enumerate().skip(i + 1) {
                if g.anticommutes_unchecked(h) {
                    report.non_commuting.push((i, j));
                }
            }
        }
        let span = Span::new(self.n, &self.generators);
        for combo in &span.null {
            let p = product(self.n, &self.generators, combo);
            if p.phase() == 2 {
                report.minus_identity = true;
            } else {
                report.dependent.push((0..combo.len()).filter(|&i| combo[i]).collect());
            }
        }
        report
    }

    fn check(&self, e: &PauliOp) -> Result<(), CodeError> {
        if e.num_qubits() != self.n {
            Err(CodeError::SizeMismatch {
                expected: self.n,
                found: e.num_qubits(),
            })
        } else {
            Ok(())
        }
    }

    pub fn syndrome_of(&self, e: &PauliOp) -> Result<Syndrome, CodeError> {
        self.check(e)?;
        Ok(Syndrome::new(
            self.generators.iter().map(|g| g.anticommutes_unchecked(e)).collect(),
        ))
    }

    /// 0-based indices of generators anti-commuting with `e`.
    pub fn anticommuting_generators(&self, e: &PauliOp) -> Result<Vec<usize>, CodeError> {
        Ok(self.syndrome_of(e)?.ones())
    }

    /// All unsigned errors of weight `1..=max_weight`. Weight-1 errors are
    /// listed X on every qubit, then Z, then Y; heavier errors by support.
    pub fn enumerate_errors(&self, max_weight: usize) -> Vec<PauliOp> {
        let n = self.n;
        let mut out = Vec::new();
        if max_weight >= 1 {
            for kind in PauliKind::ERRORS {
                for q in 0..n {
                    out.push(PauliOp::single(n, q, kind).expect("in range"));
                }
            }
        }
        for w in 2..=max_weight.min(n) {
            for support in combinations(n, w) {
                let mut kinds = vec![0usize; w];
                loop {
                    let mut p = PauliOp::identity(n);
                    for (slot, &q) in support.iter().enumerate() {
                        p.set(q, PauliKind::ERRORS[kinds[slot]]);
                    }
                    out.push(p);
                    // odometer over {X, Z, Y}^w
                    let mut pos = w;
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        kinds[pos] += 1;
                        if kinds[pos] < 3 {
                            break;
                        }
                        kinds[pos] = 0;
                    }
                    if kinds.iter().all(|&k| k == 0) {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn syndrome_table(&self, max_weight: usize) -> SyndromeTable {
        let mut rows = Vec::new();
        let mut groups: BTreeMap<Syndrome, Vec<PauliOp>> = BTreeMap::new();
        let mut undetectable = Vec::new();
        for error in self.enumerate_errors(max_weight) {
            let syndrome = self.syndrome_of(&error).expect("sized");
            if syndrome.is_zero() {
                undetectable.push(error.clone());
            } else {
                groups.entry(syndrome.clone()).or_default().push(error.clone());
            }
            rows.push(TableRow { error, syndrome });
        }
        let mut entries = BTreeMap::new();
        let mut collisions = Vec::new();
        for (syndrome, errors) in groups {
            if errors.len() == 1 {
                entries.insert(syndrome, errors.into_iter().next().expect("one"));
            } else {
                collisions.push(Collision { syndrome, errors });
            }
        }
        SyndromeTable {
            max_weight,
            rows,
            entries,
            collisions,
            undetectable,
        }
    }

    /// Cached weight-1 table used by the decoders.
    pub fn single_error_table(&self) -> &SyndromeTable {
        self.single_table.get_or_init(|| self.syndrome_table(1))
    }

    pub fn decode_single(&self, s: &Syndrome) -> Decoded {
        if s.len() != self.generators.len() {
            return Decoded::Uncorrectable;
        }
        if s.is_zero() {
            return Decoded::NoError;
        }
        match self.single_error_table().lookup(s) {
            Some(e) => Decoded::Correct(e.clone()),
            None => Decoded::Uncorrectable,
        }
    }

    /// Decodes the remaining error `F` given a known prior error `E`, where the
    /// observed syndrome belongs to `E·F`.
    pub fn decode_with_prior(&self, s: &Syndrome, prior: &PauliOp) -> Result<Decoded, CodeError> {
        let residual = s.xor(&self.syndrome_of(prior)?);
        Ok(self.decode_single(&residual))
    }

    /// Signed element of the stabilizer group with the bits of `p`, if any.
    pub fn stabilizer_element(&self, p: &PauliOp) -> Result<Option<PauliOp>, CodeError> {
        self.check(p)?;
        let span = Span::new(self.n, &self.generators);
        Ok(span.express(p).map(|combo| product(self.n, &self.generators, &combo)))
    }

    /// Whether `±p` lies in the stabilizer group (phase ignored).
    pub fn in_stabilizer(&self, p: &PauliOp) -> Result<bool, CodeError> {
        Ok(self.stabilizer_element(p)?.is_some())
    }

    /// Minimum weight of an operator commuting with every generator but
    /// outside the stabilizer group, by exhaustive enumeration.
    pub fn distance(&self) -> Result<usize, CodeError> {
        let n = self.n;
        if n > MAX_DISTANCE_QUBITS {
            return Err(CodeError::DistanceTooLarge(n));
        }
        let span = Span::new(n, &self.generators);
        if span.rows.len() >= n {
            return Err(CodeError::NoLogicalQubits);
        }
        for p in self.enumerate_errors(n) {
            let in_normalizer = self.generators.iter().all(|g| !g.anticommutes_unchecked(&p));
            if in_normalizer && span.express(&p).is_none() {
                return Ok(p.weight());
            }
        }
        Err(CodeError::NoLogicalQubits)
    }

    /// Paulis `D_i` with `D_i` anti-commuting with generator `i` only.
    pub fn pure_errors(&self) -> Result<Vec<PauliOp>, CodeError> {
        let n = self.n;
        let m = self.generators.len();
        // Rows: [g_j.z | g_j.x | e_j]; solving for (x, z) with <(x,z), g_j> = delta_ij.
        let mut rows: Vec<(Vec<bool>, Vec<bool>)> = self
            .generators
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let mut lhs = g.z_bits();
                lhs.extend(g.x_bits());
                let mut rhs = vec![false; m];
                rhs[j] = true;
                (lhs, rhs)
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..2 * n {
            let Some(p) = (r..m).find(|&i| rows[i].0[col]) else {
                continue;
            };
            rows.swap(r, p);
            let (pl, pr) = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0[col] {
                    xor_into(&mut row.0, &pl);
                    xor_into(&mut row.1, &pr);
                }
            }
            pivots.push(col);
            r += 1;
        }
        if r < m {
            return Err(CodeError::DependentGenerators);
        }
        let mut out = Vec::with_capacity(m);
        for target in 0..m {
            let mut x = vec![false; n];
            let mut z = vec![false; n];
            for (row, &col) in rows.iter().zip(&pivots) {
                if row.1[target] {
                    if col < n {
                        x[col] = true;
                    } else {
                        z[col - n] = true;
                    }
                }
            }
            out.push(PauliOp::from_bits(&x, &z, 0)?);
        }
        Ok(out)
    }

    /// Prepares a codeword on qubits `0..n` of a tableau whose first `n`
    /// qubits are in `|0⟩`: runs the encoding circuit when present, otherwise
    /// measures each generator and applies its pure error on a −1 outcome.
    pub fn prepare<R: Rng + ?Sized>(&self, tableau: &mut Tableau, rng: &mut R) -> Result<(), CodeError> {
        let width = tableau.num_qubits();
        if let Some(enc) = &self.encoding_circuit {
            tableau.apply_circuit(enc)?;
            return Ok(());
        }
        let fixes = self.pure_errors()?;
        for (g, fix) in self.generators.iter().zip(&fixes) {
            if tableau.measure_pauli(&g.padded(width), rng)?.outcome == 1 {
                tableau.apply_error(&fix.padded(width))?;
            }
        }
        Ok(())
    }

    /// Fresh `n`-qubit tableau holding a codeword.
    pub fn prepared_tableau<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Tableau, CodeError> {
        let mut t = Tableau::new(self.n);
        self.prepare(&mut t, rng)?;
        Ok(t)
    }

    /// Parses the `key: value` + generator-per-line definition format.
    pub fn from_definition(text: &str) -> Result<Self, CodeError> {
        let mut name = None;
        let mut n = None;
        let mut k = None;
        let mut distance = None;
        let mut gens = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| CodeError::Definition { line, message };
            if let Some((key, value)) = content.split_once(':') {
                let value = value.trim();
                let number = || value.parse::<usize>().map_err(|_| bad(format!("invalid number {value:?}")));
                match key.trim().to_ascii_lowercase().as_str() {
                    "name" => name = Some(value.to_string()),
                    "n" => n = Some(number()?),
                    "k" => k = Some(number()?),
                    "distance" | "d" => distance = Some(number()?),
                    other => return Err(bad(format!("unknown key {other:?}"))),
                }
            } else {
                let g: PauliOp = content.parse().map_err(|e: PauliError| bad(e.to_string()))?;
                if let Some(n) = n {
                    if g.num_qubits() != n {
                        return Err(bad(format!("generator has {} qubits, expected {n}", g.num_qubits())));
                    }
                }
                gens.push(g);
            }
        }
        let last = text.lines().count().max(1);
        let missing = |what: &str| CodeError::Definition {
            line: last,
            message: format!("missing `{what}`"),
        };
        let n = n.or_else(|| gens.first().map(|g| g.num_qubits())).ok_or_else(|| missing("n"))?;
        let k = k.unwrap_or(n.saturating_sub(gens.len()));
        let mut code = StabilizerCode::new(name.unwrap_or_else(|| "custom".to_string()), n, k, gens)?;
        code.declared_distance = distance;
        Ok(code)
    }

    pub fn to_definition(&self) -> String {
        let mut out = format!("name: {}\nn: {}\nk: {}\n", self.name, self.n, self.k);
        if let Some(d) = self.declared_distance {
            out.push_str(&format!("distance: {d}\n"));
        }
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Measurement-free preparation circuit, if any.
    pub fn encoder(&self) -> Option<&Circuit> {
        self.encoding_circuit.as_ref()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for q in start..n {
            cur.push(q);
            rec(q + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Smallest `n` with `2(3n + 1) <= 2^n`: one logical qubit, every single-qubit
/// error mapped to its own two-dimensional subspace.
pub fn hamming_bound_min_n() -> usize {
    (1..).find(|&n: &usize| 2 * (3 * n + 1) <= 1usize << n).expect("bound is eventually met")
}

/// Gate sequence appending `|+⟩` ancilla controlled-`g` extraction onto `anc`;
/// measures `g` (up to its sign) in the ancilla's Z basis.
pub fn extraction_gates(generator: &PauliOp, ancilla: usize) -> Vec<Gate> {
    let mut gates = vec![Gate::H(ancilla)];
    let mut y_count = 0;
    let mut controlled = Vec::new();
    for q in generator.support() {
        match generator.get(q) {
            PauliKind::X => controlled.push(Gate::Cnot(ancilla, q)),
            PauliKind::Z => controlled.push(Gate::Cz(ancilla, q)),
            PauliKind::Y => {
                y_count += 1;
                controlled.push(Gate::Cz(ancilla, q));
                controlled.push(Gate::Cnot(ancilla, q));
            }
            PauliKind::I => {}
        }
    }
    // controlled (X·Z) = controlled (-i Y): restore with S on the control per Y
    gates.extend(std::iter::repeat_n(Gate::S(ancilla), y_count % 4));
    gates.extend(controlled);
    gates.push(Gate::H(ancilla));
    gates
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_generators() {
        assert_eq!(StabilizerCode::five_qubit().generators[3], p("ZXIXZ"));
        assert_eq!(StabilizerCode::steane().generators[0], p("IIIXXXX"));
        assert!(StabilizerCode::builtin("shor").is_err());
        assert_eq!(StabilizerCode::builtin("Steane").unwrap().n, 7);
    }

    #[test]
    fn builtins_validate() {
        for code in [StabilizerCode::five_qubit(), StabilizerCode::steane()] {
            let r = code.validate();
            assert!(r.passed(), "{}: {:?}", code.name, r.failures());
        }
    }

    #[test]
    fn validation_failures() {
        let c = StabilizerCode::new("bad", 1, 0, vec![p("X"), p("Z")]).unwrap();
        let r = c.validate();
        assert_eq!(r.non_commuting, vec![(0, 1)]);
        assert!(!r.passed());

        let c = StabilizerCode::new("minus", 1, 0, vec![p("+X"), p("-X")]).unwrap();
        let r = c.validate();
        assert!(r.minus_identity);
        assert!(r.non_commuting.is_empty());
        assert!(!r.passed());

        let c = StabilizerCode::new("dep", 2, 0, vec![p("XX"), p("ZZ"), p("-YY")]).unwrap();
        let r = c.validate();
        assert_eq!(r.dependent, vec![vec![0, 1, 2]]);
        assert_eq!(r.count_mismatch, Some((2, 3)));
    }

    #[test]
    fn steane_syndromes() {
        let s = StabilizerCode::steane();
        assert_eq!(s.syndrome_of(&p("XIIIIII")).unwrap().to_string(), "000001");
        assert_eq!(s.syndrome_of(&PauliOp::identity(7)).unwrap().to_string(), "000000");
        assert!(s.syndrome_of(&p("XI")).is_err());
    }

    #[test]
    fn five_qubit_collision() {
        let c = StabilizerCode::five_qubit();
        assert_eq!(
            c.syndrome_of(&p("XXIII")).unwrap(),
            c.syndrome_of(&p("IIIZI")).unwrap()
        );
        assert_eq!(c.anticommuting_generators(&p("ZIIII")).unwrap(), vec![0, 2]);
        assert_eq!(c.anticommuting_generators(&p("IIIYI")).unwrap(), vec![0, 1, 2, 3]);
        assert!(c.anticommuting_generators(&PauliOp::identity(5)).unwrap().is_empty());
    }

    #[test]
    fn single_error_tables() {
        let steane = StabilizerCode::steane().syndrome_table(1);
        assert_eq!(steane.rows.len(), 21);
        assert!(steane.is_collision_free());
        let five = StabilizerCode::five_qubit().syndrome_table(1);
        assert_eq!(five.entries.len(), 15);
        assert!(five.is_collision_free());
        let five2 = StabilizerCode::five_qubit().syndrome_table(2);
        let x1x2 = p("XXIII");
        let z4 = p("IIIZI");
        assert!(five2
            .collisions
            .iter()
            .any(|c| c.errors.contains(&x1x2) && c.errors.contains(&z4)));
        assert_eq!(five2.rows.len(), 15 + 10 * 9);
    }

    #[test]
    fn decoding() {
        let s = StabilizerCode::steane();
        let syn = |t: &str| t.parse::<Syndrome>().unwrap();
        assert_eq!(s.decode_single(&syn("110000")), Decoded::Correct(p("IIIIIZI")));
        assert_eq!(s.decode_single(&syn("000000")), Decoded::NoError);
        assert_eq!(s.decode_single(&syn("101011")), Decoded::Uncorrectable);
        assert_eq!(
            s.decode_with_prior(&syn("110000"), &p("IIZIIII")).unwrap(),
            Decoded::Correct(p("IIIIZII"))
        );
        assert_eq!(
            s.decode_with_prior(&syn("110000"), &PauliOp::identity(7)).unwrap(),
            s.decode_single(&syn("110000"))
        );
    }

    #[test]
    fn distances() {
        assert_eq!(StabilizerCode::five_qubit().distance().unwrap(), 3);
        assert_eq!(StabilizerCode::steane().distance().unwrap(), 3);
        let trivial = StabilizerCode::new("trivial", 1, 1, vec![]).unwrap();
        assert_eq!(trivial.distance().unwrap(), 1);
        let state = StabilizerCode::new("state", 1, 0, vec![p("Z")]).unwrap();
        assert_eq!(state.distance(), Err(CodeError::NoLogicalQubits));
        let big = StabilizerCode::new("big", 9, 9, vec![]).unwrap();
        assert_eq!(big.distance(), Err(CodeError::DistanceTooLarge(9)));
    }

    #[test]
    fn hamming_bound() {
        let fits = |n: u32| 2 * (3 * n + 1) <= 1 << n;
        assert!(!fits(4) && fits(5));
        assert_eq!(hamming_bound_min_n(), 5);
    }

    #[test]
    fn stabilizer_membership_and_sign() {
        let s = StabilizerCode::steane();
        let m1m2 = s.generators[0].multiply(&s.generators[1]).unwrap();
        assert_eq!(s.stabilizer_element(&m1m2).unwrap(), Some(m1m2.clone()));
        assert!(!s.in_stabilizer(&p("XXXXXXX")).unwrap());
        let neg = StabilizerCode::new("neg", 2, 1, vec![p("-ZZ")]).unwrap();
        assert_eq!(neg.stabilizer_element(&p("ZZ")).unwrap(), Some(p("-ZZ")));
    }

    #[test]
    fn pure_errors_pair_with_generators() {
        for code in [StabilizerCode::five_qubit(), StabilizerCode::steane()] {
            let d = code.pure_errors().unwrap();
            for (i, di) in d.iter().enumerate() {
                for (j, g) in code.generators.iter().enumerate() {
                    assert_eq!(!di.commutes(g).unwrap(), i == j);
                }
            }
        }
    }

    #[test]
    fn measure_and_fixup_prepares_codeword() {
        let code = StabilizerCode::five_qubit();
        for seed in 0..20 {
            let t = code.prepared_tableau(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for g in &code.generators {
                assert_eq!(t.expectation(g).unwrap(), Some(1));
            }
        }
    }

    #[test]
    fn definition_round_trip() {
        let code = StabilizerCode::five_qubit();
        let parsed = StabilizerCode::from_definition(&code.to_definition()).unwrap();
        assert_eq!(parsed, code);
        let e = StabilizerCode::from_definition("name: x\nn: 3\nXX").unwrap_err();
        assert!(matches!(e, CodeError::Definition { line: 3, .. }));
        assert!(StabilizerCode::from_definition("bogus: 1").is_err());
    }
}

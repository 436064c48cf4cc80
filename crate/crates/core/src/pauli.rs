//! n-qubit Pauli group elements in symplectic form.
//!
//! An operator is stored as two packed bit vectors (X and Z components) and a
//! power of `i`. A qubit with both bits set carries the Hermitian `Y`, so
//! `Y = i·X·Z` and the identity is all-zero bits with phase 0.
//!
//! Text form: optional phase prefix (`+`, `-`, `+i`, `-i`, `i`) followed by one
//! character per qubit from `{I, X, Y, Z}`; the leftmost character is qubit 1.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub(crate) const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("size mismatch: {left} qubits vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("invalid Pauli string {0:?}")]
    Parse(String),
}

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub const ERRORS: [PauliKind; 3] = [PauliKind::X, PauliKind::Z, PauliKind::Y];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliKind::I,
            (true, false) => PauliKind::X,
            (true, true) => PauliKind::Y,
            (false, true) => PauliKind::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
            PauliKind::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliKind::I => 'I',
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliKind::I),
            'X' => Some(PauliKind::X),
            'Y' => Some(PauliKind::Y),
            'Z' => Some(PauliKind::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for PauliKind {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(PauliKind::from_symbol), chars.next()) {
            (Some(k), None) => Ok(k),
            _ => Err(PauliError::Parse(s.to_string())),
        }
    }
}

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], q: usize) -> bool {
    (words[q / WORD_BITS] >> (q % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], q: usize, value: bool) {
    let mask = 1u64 << (q % WORD_BITS);
    if value {
        words[q / WORD_BITS] |= mask;
    } else {
        words[q / WORD_BITS] &= !mask;
    }
}

/// Power of `i` picked up when multiplying `a·b` word by word (mod 4).
#[inline]
pub(crate) fn product_phase(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for w in 0..ax.len() {
        let (x1, z1, x2, z2) = (ax[w], az[w], bx[w], bz[w]);
        let (a_x, a_y, a_z) = (x1 & !z1, x1 & z1, !x1 & z1);
        let (b_x, b_y, b_z) = (x2 & !z2, x2 & z2, !x2 & z2);
        // XY = iZ, YZ = iX, ZX = iY; the reversed orders give -i.
        plus += ((a_x & b_y) | (a_y & b_z) | (a_z & b_x)).count_ones();
        minus += ((a_y & b_x) | (a_z & b_y) | (a_x & b_z)).count_ones();
    }
    (plus + 3 * minus) % 4
}

/// An element of the n-qubit Pauli group: `i^phase · P_1 ⊗ … ⊗ P_n`.
///
/// Qubit indices in the API are 0-based; rendered text is positional, so the
/// first character is qubit 1 in user-facing labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOp {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Weight-1 operator with `kind` on `qubit` (0-based) and identity elsewhere.
    pub fn single(n: usize, qubit: usize, kind: PauliKind) -> Result<Self, PauliError> {
        if qubit >= n {
            return Err(PauliError::QubitOutOfRange { qubit, n });
        }
        let mut p = PauliOp::identity(n);
        p.set(qubit, kind);
        Ok(p)
    }

    /// Builds an operator from per-qubit factors, phase 0.
    pub fn from_kinds(kinds: &[PauliKind]) -> Self {
        let mut p = PauliOp::identity(kinds.len());
        for (q, &k) in kinds.iter().enumerate() {
            p.set(q, k);
        }
        p
    }

    pub fn from_bits(x: &[bool], z: &[bool], phase: u8) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::SizeMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        let mut p = PauliOp::identity(x.len());
        for q in 0..x.len() {
            set_bit(&mut p.x, q, x[q]);
            set_bit(&mut p.z, q, z[q]);
        }
        p.phase = phase % 4;
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent of `i` in the overall prefactor, in `0..4`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Whether the prefactor is `-1` or `-i`.
    pub fn is_negative(&self) -> bool {
        self.phase >= 2
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn x(&self, qubit: usize) -> bool {
        get_bit(&self.x, qubit)
    }

    pub fn z(&self, qubit: usize) -> bool {
        get_bit(&self.z, qubit)
    }

    pub fn x_bits(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.x(q)).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.z(q)).collect()
    }

    pub(crate) fn words_mut(&mut self) -> (&mut [u64], &mut [u64], &mut u8) {
        (&mut self.x, &mut self.z, &mut self.phase)
    }

    pub fn get(&self, qubit: usize) -> PauliKind {
        PauliKind::from_bits(self.x(qubit), self.z(qubit))
    }

    pub fn set(&mut self, qubit: usize, kind: PauliKind) {
        let (x, z) = kind.bits();
        set_bit(&mut self.x, qubit, x);
        set_bit(&mut self.z, qubit, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Same bit vectors, phase dropped.
    pub fn unsigned(&self) -> Self {
        PauliOp {
            phase: 0,
            ..self.clone()
        }
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits (0-based) carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }

    fn check_size(&self, other: &PauliOp) -> Result<(), PauliError> {
        if self.n != other.n {
            Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    /// `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// In-place right multiplication; callers guarantee equal sizes.
    pub(crate) fn mul_assign_unchecked(&mut self, other: &PauliOp) {
        let extra = product_phase(&self.x, &self.z, &other.x, &other.z);
        self.phase = ((self.phase as u32 + other.phase as u32 + extra) % 4) as u8;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Symplectic inner product parity: `true` when the operators anti-commute.
    pub(crate) fn anticommutes_unchecked(&self, other: &PauliOp) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        acc == 1
    }

    pub fn commutes(&self, other: &PauliOp) -> Result<bool, PauliError> {
        self.check_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    /// Tensor product `self ⊗ other`; phases add.
    pub fn tensor(&self, other: &PauliOp) -> PauliOp {
        let mut out = self.padded(self.n + other.n);
        for q in 0..other.n {
            out.set(self.n + q, other.get(q));
        }
        out.phase = (self.phase + other.phase) % 4;
        out
    }

    /// Embeds into `n` qubits (n ≥ current size) with identity on the new qubits.
    pub fn padded(&self, n: usize) -> PauliOp {
        assert!(n >= self.n, "cannot pad {} qubits down to {}", self.n, n);
        let mut out = PauliOp::identity(n);
        out.x[..self.x.len()].copy_from_slice(&self.x);
        out.z[..self.z.len()].copy_from_slice(&self.z);
        out.phase = self.phase;
        out
    }

    /// Restriction to the first `n` qubits, phase kept.
    pub fn truncated(&self, n: usize) -> PauliOp {
        let mut out = PauliOp::identity(n);
        for q in 0..n.min(self.n) {
            out.set(q, self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Compact label such as `X3` or `X1X2`, 1-based; `I` for the identity.
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.support()
            .into_iter()
            .map(|q| format!("{}{}", self.get(q), q + 1))
            .collect()
    }

    /// Factors as a plain string without phase prefix.
    pub fn body(&self) -> String {
        (0..self.n).map(|q| self.get(q).symbol()).collect()
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, self.body())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({})", self)
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else {
            (0, t)
        };
        if rest.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        let kinds = rest
            .chars()
            .map(|c| PauliKind::from_symbol(c).ok_or_else(|| PauliError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliOp::from_kinds(&kinds).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn single_places_factor() {
        let x3 = PauliOp::single(5, 2, PauliKind::X).unwrap();
        assert_eq!(x3.to_string(), "+IIXII");
        assert_eq!(PauliOp::single(1, 0, PauliKind::Z).unwrap().to_string(), "+Z");
        let y1 = PauliOp::single(7, 0, PauliKind::Y).unwrap();
        assert_eq!(y1.x_bits(), [true, false, false, false, false, false, false]);
        assert_eq!(y1.z_bits(), [true, false, false, false, false, false, false]);
        assert_eq!(
            PauliOp::single(3, 3, PauliKind::X),
            Err(PauliError::QubitOutOfRange { qubit: 3, n: 3 })
        );
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let xz = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(xz, p("-iY"));
        // Y = i X Z
        assert_eq!(p("iX").multiply(&p("Z")).unwrap(), p("Y"));
    }

    #[test]
    fn identity_is_neutral() {
        let a = p("-iXYZIY");
        let id = PauliOp::identity(5);
        assert_eq!(id.multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&id).unwrap(), a);
    }

    #[test]
    fn size_mismatch_is_reported() {
        assert_eq!(
            p("XX").multiply(&p("X")),
            Err(PauliError::SizeMismatch { left: 2, right: 1 })
        );
        assert!(p("XX").commutes(&p("X")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("XIIII").commutes(&p("ZXIXZ")).unwrap());
        assert!(p("XI").commutes(&p("IX")).unwrap());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliOp::identity(5).weight(), 0);
        assert_eq!(p("XXIII").weight(), 2);
        assert_eq!(p("IIIYI").weight(), 1);
    }

    #[test]
    fn text_round_trip_and_labels() {
        for s in ["+XZZXI", "-iYIZ", "+iI", "-X"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XZZXI"), p("+XZZXI"));
        assert_eq!(p("XXIII").label(), "X1X2");
        assert_eq!(PauliOp::identity(3).label(), "I");
        assert!("XQ".parse::<PauliOp>().is_err());
        assert!("-".parse::<PauliOp>().is_err());
    }

    #[test]
    fn wide_operators_span_words() {
        let n = 130;
        let a = PauliOp::single(n, 129, PauliKind::X).unwrap();
        let b = PauliOp::single(n, 129, PauliKind::Z).unwrap();
        assert!(!a.commutes(&b).unwrap());
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.get(129), PauliKind::Y);
        assert_eq!(ab.phase(), 3);
        assert_eq!(ab.weight(), 1);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOp> {
        (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(ks, ph)| {
            let kinds: Vec<_> = ks
                .into_iter()
                .map(|k| [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z][k as usize])
                .collect();
            PauliOp::from_kinds(&kinds).with_phase(ph)
        })
    }

    proptest! {
        #[test]
        fn multiply_is_associative(a in arb_pauli(7), b in arb_pauli(7), c in arb_pauli(7)) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn unsigned_square_is_identity(a in arb_pauli(9)) {
            let sq = a.unsigned().multiply(&a.unsigned()).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert_eq!(sq.phase(), 0);
            let signed = a.multiply(&a).unwrap();
            prop_assert!(signed.is_identity());
        }

        #[test]
        fn commutes_is_symmetric_and_phase_blind(a in arb_pauli(6), b in arb_pauli(6), ph in 0u8..4) {
            prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
            prop_assert_eq!(a.commutes(&b).unwrap(), a.clone().with_phase(ph).commutes(&b).unwrap());
        }

        #[test]
        fn weight_is_subadditive(a in arb_pauli(8), b in arb_pauli(8)) {
            prop_assert!(a.multiply(&b).unwrap().weight() <= a.weight() + b.weight());
        }

        #[test]
        fn display_parse_round_trip(a in arb_pauli(5)) {
            prop_assert_eq!(a.to_string().parse::<PauliOp>().unwrap(), a);
        }
    }
}

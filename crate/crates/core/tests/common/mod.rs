#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tcqec::circuit::{Circuit, Gate};
use tcqec::pauli::{PauliKind, PauliOp};
use tcqec::statevec::DenseState;
use tcqec::tableau::Tableau;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single_matrix(kind: PauliKind) -> Matrix {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match kind {
        PauliKind::I => vec![vec![l, o], vec![o, l]],
        PauliKind::X => vec![vec![o, l], vec![l, o]],
        PauliKind::Y => vec![vec![o, -i], vec![i, o]],
        PauliKind::Z => vec![vec![l, o], vec![o, -l]],
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn mat_close(a: &Matrix, b: &Matrix) -> bool {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).norm() < 1e-12)
}

/// Dense matrix of a Pauli operator, qubit 0 the leftmost tensor factor.
pub fn dense_pauli(p: &PauliOp) -> Matrix {
    let mut m = vec![vec![c(1.0, 0.0)]];
    for q in 0..p.num_qubits() {
        m = kron(&m, &single_matrix(p.get(q)));
    }
    let phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase() as usize];
    for row in &mut m {
        for v in row.iter_mut() {
            *v *= phase;
        }
    }
    m
}

pub fn mat_vec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `⟨v|P|v⟩` computed from the test's own Pauli matrices.
pub fn dense_expectation(p: &PauliOp, v: &[Complex64]) -> f64 {
    let pv = mat_vec(&dense_pauli(p), v);
    v.iter().zip(&pv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
}

/// Signed-ket table such as `+00000 -11011` with a common coefficient.
pub fn ket_table(text: &str, coefficient: f64) -> Vec<Complex64> {
    let kets: Vec<&str> = text.split_whitespace().collect();
    let n = kets[0].len() - 1;
    let mut v = vec![c(0.0, 0.0); 1 << n];
    for k in kets {
        let sign = if k.starts_with('-') { -1.0 } else { 1.0 };
        let idx = usize::from_str_radix(&k[1..], 2).unwrap();
        v[idx] += c(sign * coefficient, 0.0);
    }
    v
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize, measure_weight: u32) -> Gate {
    let pick = rng.random_range(0..(7 + measure_weight));
    let q = rng.random_range(0..n);
    let other = |rng: &mut R| loop {
        let t = rng.random_range(0..n);
        if t != q {
            return t;
        }
    };
    match pick {
        0 => Gate::H(q),
        1 => Gate::S(q),
        2 => Gate::X(q),
        3 => Gate::Y(q),
        4 => Gate::Z(q),
        5 if n > 1 => Gate::Cnot(q, other(rng)),
        6 if n > 1 => Gate::Cz(q, other(rng)),
        5 | 6 => Gate::H(q),
        _ => Gate::Measure(q),
    }
}

pub fn random_circuit(seed: u64, max_qubits: usize, max_depth: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_qubits);
    let depth = rng.random_range(1..=max_depth);
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        c.push(random_gate(&mut rng, n, 2)).unwrap();
    }
    // always end by measuring everything
    for q in 0..n {
        c.push(Gate::Measure(q)).unwrap();
    }
    c
}

/// Runs `circuit` on the tableau and on a dense state in lockstep. Every
/// measurement must be deterministic on the tableau exactly when the dense
/// probability is 0 or 1, random exactly when it is 1/2, and the dense state
/// is then projected onto the tableau's outcome.
pub fn check_against_oracle(circuit: &Circuit, seed: u64) -> Result<usize, String> {
    let n = circuit.num_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tableau::new(n);
    let mut psi = DenseState::zero(n).map_err(|e| e.to_string())?;
    let mut measured = 0;
    for (step, &g) in circuit.gates().iter().enumerate() {
        match g {
            Gate::Measure(q) => {
                let p1 = psi.probability_one(q);
                let m = t.measure(q, &mut rng).map_err(|e| e.to_string())?;
                let expected_det = p1.abs() < 1e-10 || (p1 - 1.0).abs() < 1e-10;
                let expected_rand = (p1 - 0.5).abs() < 1e-10;
                if !(expected_det || expected_rand) {
                    return Err(format!("step {step}: probability {p1} is not 0, 1/2 or 1"));
                }
                if m.deterministic != expected_det {
                    return Err(format!("step {step}: tableau deterministic={} but p1={p1}", m.deterministic));
                }
                if expected_det && (m.outcome == 1) != (p1 > 0.5) {
                    return Err(format!("step {step}: outcome {} but p1={p1}", m.outcome));
                }
                psi = psi
                    .project(q, m.outcome)
                    .ok_or_else(|| format!("step {step}: zero-probability branch"))?;
                measured += 1;
            }
            other => {
                t.apply_gate(other).map_err(|e| e.to_string())?;
                psi.apply_gate(other).map_err(|e| e.to_string())?;
            }
        }
    }
    for s in t.stabilizers() {
        let e = dense_expectation(s, psi.amplitudes());
        if (e - 1.0).abs() > 1e-10 {
            return Err(format!("stabilizer {s} has expectation {e}"));
        }
    }
    Ok(measured)
}

/// Runs a circuit on a dense state; every measurement must be deterministic.
pub fn run_dense_deterministic(circuit: &Circuit, psi: &mut DenseState) -> Result<Vec<u8>, String> {
    let mut outcomes = Vec::new();
    for &g in circuit.gates() {
        match g {
            Gate::Measure(q) => {
                let p1 = psi.probability_one(q);
                let outcome = if p1 < 1e-10 {
                    0
                } else if p1 > 1.0 - 1e-10 {
                    1
                } else {
                    return Err(format!("measurement of qubit {} is random (p1={p1})", q + 1));
                };
                *psi = psi.project(q, outcome).unwrap();
                outcomes.push(outcome);
            }
            other => psi.apply_gate(other).map_err(|e| e.to_string())?,
        }
    }
    Ok(outcomes)
}

pub fn p(s: &str) -> PauliOp {
    s.parse().unwrap()
}

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tcqec::circuit::Circuit;
use tcqec::codes::{Decoded, StabilizerCode, Syndrome};
use tcqec::noise::{implementation_budgets, NoiseParams, RelapsePolicy};
use tcqec::pauli::PauliOp;
use tcqec::protocol::{ExtendedProtocol, InjectedError};
use tcqec::tableau::Tableau;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Pauli", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPauli {
    inner: PauliOp,
}

#[pymethods]
impl PyPauli {
    /// Parses `XZZXI`, `-iY`, `+XX`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyPauli {
            inner: text.parse().map_err(value_error)?,
        })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.inner.weight()
    }

    /// Power of `i` in front of the operator.
    #[getter]
    fn phase(&self) -> u8 {
        self.inner.phase()
    }

    fn label(&self) -> String {
        self.inner.label()
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    fn commutes(&self, other: &PyPauli) -> PyResult<bool> {
        self.inner.commutes(&other.inner).map_err(value_error)
    }

    fn __mul__(&self, other: &PyPauli) -> PyResult<PyPauli> {
        Ok(PyPauli {
            inner: self.inner.multiply(&other.inner).map_err(value_error)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pauli('{}')", self.inner)
    }
}

#[pyclass(name = "Code", frozen)]
struct PyCode {
    inner: StabilizerCode,
}

#[pymethods]
impl PyCode {
    /// `five_qubit` or `steane`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyCode {
            inner: StabilizerCode::builtin(name).map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn from_definition(text: &str) -> PyResult<Self> {
        Ok(PyCode {
            inner: StabilizerCode::from_definition(text).map_err(value_error)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn generators(&self) -> Vec<PyPauli> {
        self.inner
            .generators
            .iter()
            .map(|g| PyPauli { inner: g.clone() })
            .collect()
    }

    /// Validation failures; empty when the generators are fine.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().failures()
    }

    fn syndrome(&self, error: &PyPauli) -> PyResult<String> {
        Ok(self.inner.syndrome_of(&error.inner).map_err(value_error)?.to_string())
    }

    /// 0-based indices of generators anticommuting with `error`.
    fn anticommuting_generators(&self, error: &PyPauli) -> PyResult<Vec<usize>> {
        self.inner.anticommuting_generators(&error.inner).map_err(value_error)
    }

    /// Single-error lookup: `None` for a trivial syndrome, raises if uncorrectable.
    fn decode(&self, syndrome: &str) -> PyResult<Option<PyPauli>> {
        let s: Syndrome = syndrome.parse().map_err(value_error)?;
        match self.inner.decode_single(&s) {
            Decoded::NoError => Ok(None),
            Decoded::Correct(e) => Ok(Some(PyPauli { inner: e })),
            Decoded::Uncorrectable => Err(PyValueError::new_err(format!("syndrome {s} is uncorrectable"))),
        }
    }

    fn decode_with_prior(&self, syndrome: &str, prior: &PyPauli) -> PyResult<Option<PyPauli>> {
        let s: Syndrome = syndrome.parse().map_err(value_error)?;
        match self.inner.decode_with_prior(&s, &prior.inner).map_err(value_error)? {
            Decoded::NoError => Ok(None),
            Decoded::Correct(e) => Ok(Some(PyPauli { inner: e })),
            Decoded::Uncorrectable => Err(PyValueError::new_err(format!("syndrome {s} is uncorrectable"))),
        }
    }

    /// `(error label, syndrome)` for every error up to `max_weight`.
    #[pyo3(signature = (max_weight = 1))]
    fn table(&self, max_weight: usize) -> Vec<(String, String)> {
        self.inner
            .syndrome_table(max_weight)
            .rows
            .iter()
            .map(|r| (r.error.label(), r.syndrome.to_string()))
            .collect()
    }

    fn distance(&self) -> PyResult<usize> {
        self.inner.distance().map_err(value_error)
    }

    fn in_stabilizer(&self, p: &PyPauli) -> PyResult<bool> {
        self.inner.in_stabilizer(&p.inner).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Code('{}', n={}, k={})", self.inner.name, self.inner.n, self.inner.k)
    }
}

#[pyclass(name = "Tableau")]
struct PyTableau {
    inner: Tableau,
    rng: ChaCha8Rng,
}

#[pymethods]
impl PyTableau {
    #[new]
    #[pyo3(signature = (n, seed))]
    fn new(n: usize, seed: u64) -> Self {
        PyTableau {
            inner: Tableau::new(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    /// Runs circuit text (`qubits N` header optional); returns measurement outcomes.
    fn run(&mut self, text: &str) -> PyResult<Vec<u8>> {
        let text = if text.trim_start().starts_with("qubits") {
            text.to_string()
        } else {
            format!("qubits {}\n{text}", self.inner.num_qubits())
        };
        let circuit = Circuit::parse(&text).map_err(value_error)?;
        let records = self.inner.run(&circuit, &mut self.rng).map_err(value_error)?;
        Ok(records.iter().map(|m| m.outcome).collect())
    }

    /// Z measurement of a 0-based qubit: `(outcome, deterministic)`.
    fn measure(&mut self, qubit: usize) -> PyResult<(u8, bool)> {
        let m = self.inner.measure(qubit, &mut self.rng).map_err(value_error)?;
        Ok((m.outcome, m.deterministic))
    }

    fn apply_error(&mut self, error: &PyPauli) -> PyResult<()> {
        self.inner.apply_error(&error.inner).map_err(value_error)
    }

    /// `+1`, `-1`, or `None` when the outcome would be random.
    fn expectation(&self, observable: &PyPauli) -> PyResult<Option<i8>> {
        self.inner.expectation(&observable.inner).map_err(value_error)
    }

    fn stabilizers(&self) -> Vec<String> {
        self.inner.canonical_stabilizers().iter().map(|s| s.to_string()).collect()
    }
}

#[pyclass(name = "ExtendedProtocol", frozen)]
struct PyProtocol {
    inner: ExtendedProtocol,
}

#[pymethods]
impl PyProtocol {
    /// `tracked` is the 0-based qubit corrected in the previous cycle.
    #[new]
    fn new(code: &PyCode, tracked: usize) -> PyResult<Self> {
        Ok(PyProtocol {
            inner: ExtendedProtocol::new(code.inner.clone(), tracked).map_err(value_error)?,
        })
    }

    fn extended_generators(&self) -> Vec<PyPauli> {
        self.inner
            .extended_generators()
            .iter()
            .map(|g| PyPauli { inner: g.clone() })
            .collect()
    }

    fn extraction_circuit(&self) -> String {
        self.inner.extraction_circuit().emit()
    }

    /// One cycle on a fresh codeword with errors such as `["Z3", "Z5"]`
    /// (1-based labels, `A`/`B` for the extra ancillas).
    fn run_cycle<'py>(&self, py: Python<'py>, errors: Vec<String>, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let errors: Vec<InjectedError> = errors
            .iter()
            .map(|e| e.parse().map_err(value_error))
            .collect::<PyResult<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = self.inner.fresh_state(&mut rng).map_err(value_error)?;
        self.inner.entangle(&mut state, &mut rng).map_err(value_error)?;
        let r = self.inner.full_cycle(&mut state, &errors, &mut rng).map_err(value_error)?;
        let d = PyDict::new(py);
        d.set_item("sigma", r.outcome.sigma.to_string())?;
        d.set_item("ancilla", r.outcome.ancilla_string())?;
        d.set_item("verdict", r.decision.kind_name())?;
        d.set_item("decision", r.decision.to_string())?;
        d.set_item("correction", r.decision.correction.to_string())?;
        d.set_item("valid", r.valid)?;
        Ok(d)
    }
}

/// `(uncorrelated, correlated, total)` two-cycle error probability.
#[pyfunction]
fn correlated_probability(epsilon: f64, lam: f64, delta: f64, t1: f64, t2: f64) -> PyResult<(f64, f64, f64)> {
    let p = NoiseParams::new(epsilon, lam, delta).map_err(value_error)?;
    let r = p.correlated_probability(t1, t2).map_err(value_error)?;
    Ok((r.uncorrelated, r.correlated, r.total))
}

#[pyfunction]
#[pyo3(signature = (code, epsilon, lam, delta, cycles, trials, seed, relapse = "same_type"))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo<'py>(
    py: Python<'py>,
    code: &PyCode,
    epsilon: f64,
    lam: f64,
    delta: f64,
    cycles: usize,
    trials: usize,
    seed: u64,
    relapse: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let policy: RelapsePolicy = relapse.parse().map_err(PyValueError::new_err)?;
    let params = NoiseParams::new(epsilon, lam, delta).map_err(value_error)?.with_policy(policy);
    let stats = py
        .detach(|| tcqec::noise::monte_carlo(&code.inner, &params, cycles, trials, seed))
        .map_err(value_error)?;
    let d = PyDict::new(py);
    for line in stats.render_kv().lines() {
        if let Some((k, v)) = line.split_once('=') {
            match v.parse::<u64>() {
                Ok(n) => d.set_item(k, n)?,
                Err(_) => match v.parse::<f64>() {
                    Ok(x) => d.set_item(k, x)?,
                    Err(_) => d.set_item(k, v)?,
                },
            }
        }
    }
    Ok(d)
}

/// `(implementation, tau_dch, tau_gate, n_gates)` rows, times as `10^k` text.
#[pyfunction]
fn budgets() -> Vec<(String, String, String, String)> {
    implementation_budgets()
        .into_iter()
        .map(|(name, b)| {
            (
                name.to_string(),
                b.tau_dch.to_string(),
                b.tau_gate.to_string(),
                b.n_gates.to_string(),
            )
        })
        .collect()
}

/// Runs the command-line tool in-process: `(status, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let out = tcqec::cli::run_command(std::iter::once("tcqec".to_string()).chain(args));
    (out.status, out.stdout, out.stderr)
}

#[pymodule]
fn tcqec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauli>()?;
    m.add_class::<PyCode>()?;
    m.add_class::<PyTableau>()?;
    m.add_class::<PyProtocol>()?;
    m.add_function(wrap_pyfunction!(correlated_probability, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(budgets, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}

//! Error models for multi-cycle simulation.
//!
//! Each cycle may see one new error (probability `ε`, uniform over qubit and
//! type) and, independently, a relapse of the qubit corrected in the previous
//! cycle. The relapse probability is the correlated term of
//! `P ≈ (ε/2)² + λ⁴Δ⁴ / 8(t₁ − t₂)⁴` evaluated one cycle apart, i.e. `λ⁴/8`,
//! capped. Older corrections are not tracked.
//!
//! The decay law was derived for dephasing; using the same magnitude for
//! bit-flip and bit-phase-flip relapses is a modelling choice.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::codes::{Decoded, StabilizerCode};
use crate::pauli::{PauliKind, PauliOp};
use crate::protocol::{plain_cycle, ExtendedProtocol, InjectedError, ProtocolError, Verdict};
use crate::tableau::Tableau;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("t1 and t2 must differ")]
    EqualTimes,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must not be negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must lie in [0, 1], got {value}")]
    NotProbability { name: &'static str, value: f64 },
    #[error("invalid time value {0:?}")]
    BadTime(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelapsePolicy {
    /// Relapse repeats the type of the error corrected last cycle.
    #[default]
    SameType,
    /// Relapse type drawn uniformly from X, Y, Z.
    UniformXyz,
}

impl FromStr for RelapsePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "same" | "same_type" => Ok(RelapsePolicy::SameType),
            "uniform" | "uniform_xyz" => Ok(RelapsePolicy::UniformXyz),
            _ => Err(format!("unknown relapse policy {s:?}")),
        }
    }
}

impl fmt::Display for RelapsePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelapsePolicy::SameType => "same_type",
            RelapsePolicy::UniformXyz => "uniform_xyz",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParams {
    pub epsilon: f64,
    pub lambda: f64,
    /// Error-correction cycle period.
    pub delta: f64,
    pub relapse_policy: RelapsePolicy,
    /// Ceiling applied to every derived probability.
    pub cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedProbability {
    pub uncorrelated: f64,
    pub correlated: f64,
    pub total: f64,
}

impl NoiseParams {
    pub fn new(epsilon: f64, lambda: f64, delta: f64) -> Result<Self, NoiseError> {
        let p = NoiseParams {
            epsilon,
            lambda,
            delta,
            relapse_policy: RelapsePolicy::SameType,
            cap: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_policy(mut self, policy: RelapsePolicy) -> Self {
        self.relapse_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(NoiseError::NotProbability {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        if !(0.0..=1.0).contains(&self.cap) {
            return Err(NoiseError::NotProbability {
                name: "cap",
                value: self.cap,
            });
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(NoiseError::NonPositive {
                name: "delta",
                value: self.delta,
            });
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(NoiseError::Negative {
                name: "lambda",
                value: self.lambda,
            });
        }
        Ok(())
    }

    fn clamp(&self, p: f64) -> f64 {
        p.clamp(0.0, self.cap)
    }

    /// Two-cycle error probability for cycles starting at `t1` and `t2`.
    pub fn correlated_probability(&self, t1: f64, t2: f64) -> Result<CorrelatedProbability, NoiseError> {
        if t1 == t2 {
            return Err(NoiseError::EqualTimes);
        }
        let uncorrelated = (self.epsilon / 2.0).powi(2);
        let gap = t1 - t2;
        let correlated = (self.lambda * self.delta).powi(4) / (8.0 * gap.powi(4));
        Ok(CorrelatedProbability {
            uncorrelated: self.clamp(uncorrelated),
            correlated: self.clamp(correlated),
            total: self.clamp(uncorrelated + correlated),
        })
    }

    /// Per-cycle relapse probability of last cycle's corrected qubit.
    pub fn relapse_probability(&self) -> f64 {
        self.correlated_probability(self.delta, 0.0)
            .map(|p| p.correlated)
            .unwrap_or(0.0)
    }

    /// Draws the errors for one cycle of an `n`-qubit code.
    pub fn sample_cycle<R: Rng + ?Sized>(&self, n: usize, history: &CycleHistory, rng: &mut R) -> SampledCycle {
        let mut out = SampledCycle::default();
        if rng.random_bool(self.clamp(self.epsilon)) {
            let q = rng.random_range(0..n);
            let kind = PauliKind::ERRORS[rng.random_range(0..3)];
            out.new = Some(InjectedError::data(q, kind));
        }
        if let Some((q, prev_kind)) = history.last_corrected() {
            if rng.random_bool(self.relapse_probability()) {
                let kind = match self.relapse_policy {
                    RelapsePolicy::SameType => prev_kind,
                    RelapsePolicy::UniformXyz => PauliKind::ERRORS[rng.random_range(0..3)],
                };
                out.relapse = Some(InjectedError::data(q, kind));
            }
        }
        out
    }
}

/// Errors drawn for one cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampledCycle {
    pub new: Option<InjectedError>,
    pub relapse: Option<InjectedError>,
}

impl SampledCycle {
    pub fn errors(&self) -> Vec<InjectedError> {
        self.relapse.iter().chain(self.new.iter()).copied().collect()
    }

    fn corrected(&self) -> Option<(usize, PauliKind)> {
        self.new.or(self.relapse).and_then(|e| match e.site {
            crate::protocol::ErrorSite::Data(q) => Some((q, e.kind)),
            _ => None,
        })
    }
}

/// Time in seconds as `mantissa × 10^exponent`, so ratios of powers of ten stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci {
    pub mantissa: f64,
    pub exponent: i32,
}

impl Sci {
    pub fn new(mantissa: f64, exponent: i32) -> Self {
        let mut s = Sci { mantissa, exponent };
        if mantissa != 0.0 && mantissa.is_finite() {
            while s.mantissa.abs() >= 10.0 {
                s.mantissa /= 10.0;
                s.exponent += 1;
            }
            while s.mantissa.abs() < 1.0 {
                s.mantissa *= 10.0;
                s.exponent -= 1;
            }
        }
        s
    }

    pub fn pow10(exponent: i32) -> Self {
        Sci {
            mantissa: 1.0,
            exponent,
        }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * 10f64.powi(self.exponent)
    }
}

impl fmt::Display for Sci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mantissa == 1.0 {
            write!(f, "10^{}", self.exponent)
        } else {
            write!(f, "{}e{}", self.mantissa, self.exponent)
        }
    }
}

impl FromStr for Sci {
    type Err = NoiseError;

    /// Accepts `10^-9`, `1e-9`, `2.5e3` or plain decimals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || NoiseError::BadTime(s.to_string());
        if let Some(exp) = t.strip_prefix("10^") {
            return exp.parse().map(Sci::pow10).map_err(|_| bad());
        }
        if let Some((m, e)) = t.split_once(['e', 'E']) {
            let m: f64 = m.parse().map_err(|_| bad())?;
            let e: i32 = e.parse().map_err(|_| bad())?;
            return Ok(Sci::new(m, e));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        Ok(Sci::new(v, 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceBudget {
    pub tau_dch: Sci,
    pub tau_gate: Sci,
    pub n_gates: Sci,
}

/// Number of gates that fit in one decoherence time.
pub fn gate_budget(tau_dch: Sci, tau_gate: Sci) -> Result<DecoherenceBudget, NoiseError> {
    for (name, v) in [("tau_dch", tau_dch), ("tau_gate", tau_gate)] {
        if v.mantissa.is_nan() || v.mantissa <= 0.0 {
            return Err(NoiseError::NonPositive {
                name,
                value: v.value(),
            });
        }
    }
    let n_gates = Sci::new(tau_dch.mantissa / tau_gate.mantissa, tau_dch.exponent - tau_gate.exponent);
    Ok(DecoherenceBudget {
        tau_dch,
        tau_gate,
        n_gates,
    })
}

/// Decoherence and gate times (powers of ten, seconds) for common qubit implementations.
pub const QUBIT_IMPLEMENTATIONS: [(&str, i32, i32); 5] = [
    ("Nuclear spin", 4, -3),
    ("Trapped Indium ion", -1, -14),
    ("Quantum dots/charge", -9, -12),
    ("Quantum dots/spin", -6, -9),
    ("Optical cavity", -5, -14),
];

pub fn implementation_budgets() -> Vec<(&'static str, DecoherenceBudget)> {
    QUBIT_IMPLEMENTATIONS
        .iter()
        .map(|&(name, dch, gate)| {
            (
                name,
                gate_budget(Sci::pow10(dch), Sci::pow10(gate)).expect("positive table entries"),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleRecord {
    pub cycle: usize,
    /// Qubit (0-based) and error type corrected in this cycle.
    pub corrected: Option<(usize, PauliKind)>,
}

/// Append-only log of corrections, at most one tracked qubit per cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleHistory {
    records: Vec<CycleRecord>,
}

impl CycleHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, corrected: Option<(usize, PauliKind)>) {
        let cycle = self.records.len();
        self.records.push(CycleRecord { cycle, corrected });
    }

    pub fn records(&self) -> &[CycleRecord] {
        &self.records
    }

    /// Correction made in the immediately preceding cycle.
    pub fn last_corrected(&self) -> Option<(usize, PauliKind)> {
        self.records.last().and_then(|r| r.corrected)
    }
}

/// Supplies the errors of each cycle in a trial.
pub trait ErrorSource {
    fn next_cycle(&mut self, n: usize, history: &CycleHistory, rng: &mut ChaCha8Rng) -> SampledCycle;
}

impl ErrorSource for NoiseParams {
    fn next_cycle(&mut self, n: usize, history: &CycleHistory, rng: &mut ChaCha8Rng) -> SampledCycle {
        self.sample_cycle(n, history, rng)
    }
}

/// Fixed per-cycle error list; cycles past the end are error-free.
#[derive(Debug, Clone, Default)]
pub struct ScriptedErrors {
    cycles: Vec<SampledCycle>,
    position: usize,
}

impl ScriptedErrors {
    pub fn new(cycles: Vec<SampledCycle>) -> Self {
        ScriptedErrors { cycles, position: 0 }
    }
}

impl ErrorSource for ScriptedErrors {
    fn next_cycle(&mut self, _n: usize, _history: &CycleHistory, _rng: &mut ChaCha8Rng) -> SampledCycle {
        let c = self.cycles.get(self.position).cloned().unwrap_or_default();
        self.position += 1;
        c
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonteCarloStats {
    pub code: String,
    pub trials: usize,
    pub cycles: usize,
    pub seed: u64,
    pub no_error: u64,
    pub single: u64,
    pub double: u64,
    pub uncorrectable: u64,
    pub new_errors: u64,
    pub relapses: u64,
    /// Cycles with a relapse and a new error on a different qubit.
    pub double_events: u64,
    pub extended_failures: u64,
    pub baseline_failures: u64,
}

impl MonteCarloStats {
    fn merge(&mut self, other: &MonteCarloStats) {
        self.no_error += other.no_error;
        self.single += other.single;
        self.double += other.double;
        self.uncorrectable += other.uncorrectable;
        self.new_errors += other.new_errors;
        self.relapses += other.relapses;
        self.double_events += other.double_events;
        self.extended_failures += other.extended_failures;
        self.baseline_failures += other.baseline_failures;
    }

    pub fn total_cycles(&self) -> u64 {
        (self.trials * self.cycles) as u64
    }

    fn rate(&self, count: u64) -> f64 {
        if self.total_cycles() == 0 {
            0.0
        } else {
            count as f64 / self.total_cycles() as f64
        }
    }

    pub fn extended_failure_rate(&self) -> f64 {
        self.rate(self.extended_failures)
    }

    pub fn baseline_failure_rate(&self) -> f64 {
        self.rate(self.baseline_failures)
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("code", self.code.clone()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("cycles", self.cycles.to_string()),
            ("new_errors", self.new_errors.to_string()),
            ("relapses", self.relapses.to_string()),
            ("double_events", self.double_events.to_string()),
            ("no_error", self.no_error.to_string()),
            ("single", self.single.to_string()),
            ("double", self.double.to_string()),
            ("uncorrectable", self.uncorrectable.to_string()),
            ("extended_failures", self.extended_failures.to_string()),
            ("baseline_failures", self.baseline_failures.to_string()),
            ("extended_failure_rate", format!("{:.6e}", self.extended_failure_rate())),
            ("baseline_failure_rate", format!("{:.6e}", self.baseline_failure_rate())),
        ]
    }

    pub fn render_kv(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn render_table(&self) -> String {
        let fields = self.fields();
        let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        fields
            .into_iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

fn trial_rngs(seed: u64, trial: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut errors = ChaCha8Rng::seed_from_u64(seed);
    errors.set_stream(2 * trial as u64);
    let mut measurements = ChaCha8Rng::seed_from_u64(seed);
    measurements.set_stream(2 * trial as u64 + 1);
    (errors, measurements)
}

fn fresh_state(code: &StabilizerCode, width: usize, rng: &mut ChaCha8Rng) -> Result<Tableau, NoiseError> {
    let data = code.prepared_tableau(rng).map_err(ProtocolError::from)?;
    Ok(data.extended(width - code.n))
}

/// Pauli-frame bookkeeping: the product of every error and correction so far.
/// The code block has failed once the frame leaves the stabilizer group.
struct Frame {
    residual: PauliOp,
}

impl Frame {
    fn new(n: usize) -> Self {
        Frame {
            residual: PauliOp::identity(n),
        }
    }

    fn apply(&mut self, op: &PauliOp) {
        self.residual.mul_assign_unchecked(op);
    }

    /// Returns true on logical failure and resets the frame.
    fn settle(&mut self, code: &StabilizerCode) -> Result<bool, NoiseError> {
        let ok = code
            .in_stabilizer(&self.residual.unsigned())
            .map_err(ProtocolError::from)?;
        if !ok {
            self.residual = PauliOp::identity(code.n);
        }
        Ok(!ok)
    }
}

fn run_trial<S: ErrorSource>(
    code: &StabilizerCode,
    protocols: &[ExtendedProtocol],
    mut source: S,
    cycles: usize,
    seed: u64,
    trial: usize,
) -> Result<MonteCarloStats, NoiseError> {
    let n = code.n;
    let width = n + 2 + code.generators.len();
    let (mut error_rng, mut rng) = trial_rngs(seed, trial);
    let mut stats = MonteCarloStats::default();
    let mut history = CycleHistory::new();
    let mut state = fresh_state(code, width, &mut rng)?;
    let mut tracked: Option<usize> = None;
    let mut extended = Frame::new(n);
    let mut baseline = Frame::new(n);

    for _ in 0..cycles {
        let sampled = source.next_cycle(n, &history, &mut error_rng);
        let errors = sampled.errors();
        stats.new_errors += sampled.new.is_some() as u64;
        stats.relapses += sampled.relapse.is_some() as u64;
        if let (Some(a), Some(b)) = (sampled.new, sampled.relapse) {
            if a.site != b.site {
                stats.double_events += 1;
            }
        }
        let data_error = protocols[0].error_operator(&errors)?.truncated(n);

        // extended decoder, syndromes measured on the tableau
        let (verdict_qubit, correction) = match tracked {
            Some(j) => {
                let proto = &protocols[j];
                proto.entangle(&mut state, &mut rng)?;
                let report = proto.full_cycle(&mut state, &errors, &mut rng)?;
                let qubit = match &report.decision.verdict {
                    Verdict::NoError => {
                        stats.no_error += 1;
                        None
                    }
                    Verdict::Single(e) => {
                        stats.single += 1;
                        e.support().first().copied()
                    }
                    Verdict::Double { new, .. } => {
                        stats.double += 1;
                        new.support().first().copied()
                    }
                    Verdict::Uncorrectable => {
                        stats.uncorrectable += 1;
                        None
                    }
                };
                (qubit, report.decision.correction)
            }
            None => {
                let (_, decoded) = plain_cycle(code, &mut state, std::slice::from_ref(&data_error), &mut rng)?;
                match decoded {
                    Decoded::NoError => {
                        stats.no_error += 1;
                        (None, PauliOp::identity(n))
                    }
                    Decoded::Correct(e) => {
                        stats.single += 1;
                        (e.support().first().copied(), e)
                    }
                    Decoded::Uncorrectable => {
                        stats.uncorrectable += 1;
                        (None, PauliOp::identity(n))
                    }
                }
            }
        };
        tracked = verdict_qubit;
        extended.apply(&data_error);
        extended.apply(&correction);
        if extended.settle(code)? {
            stats.extended_failures += 1;
            state = fresh_state(code, width, &mut rng)?;
            tracked = None;
        }

        // baseline single-error decoder on the same errors
        baseline.apply(&data_error);
        let syndrome = code.syndrome_of(&baseline.residual).map_err(ProtocolError::from)?;
        if let Decoded::Correct(c) = code.decode_single(&syndrome) {
            baseline.apply(&c);
        }
        if baseline.settle(code)? {
            stats.baseline_failures += 1;
        }

        history.push(sampled.corrected());
    }
    Ok(stats)
}

/// Runs `trials` independent trials of `cycles` cycles each. Trial `t` draws
/// errors from ChaCha stream `2t` and measurement outcomes from stream `2t+1`
/// of `seed`, so both decoders see the same errors and results do not depend
/// on scheduling.
pub fn simulate<S, F>(
    code: &StabilizerCode,
    make_source: F,
    cycles: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloStats, NoiseError>
where
    S: ErrorSource,
    F: Fn(usize) -> S + Sync,
{
    let protocols = (0..code.n)
        .map(|j| ExtendedProtocol::new(code.clone(), j))
        .collect::<Result<Vec<_>, _>>()?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(code, &protocols, make_source(t), cycles, seed, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stats = MonteCarloStats {
        code: code.name.clone(),
        trials,
        cycles,
        seed,
        ..Default::default()
    };
    for s in &per_trial {
        stats.merge(s);
    }
    Ok(stats)
}

pub fn monte_carlo(
    code: &StabilizerCode,
    params: &NoiseParams,
    cycles: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloStats, NoiseError> {
    params.validate()?;
    simulate(code, |_| params.clone(), cycles, trials, seed)
}

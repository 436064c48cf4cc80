//! Command-line front end. `run_command` does all the work and returns the
//! exit status with the rendered output so it can be tested without a process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::codes::{StabilizerCode, SyndromeTable};
use crate::noise::{gate_budget, implementation_budgets, monte_carlo, NoiseParams, RelapsePolicy, Sci};
use crate::pauli::PauliKind;
use crate::protocol::{ExtendedProtocol, InjectedError, Verdict};
use crate::tableau::Tableau;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_UNCORRECTABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Kv,
}

#[derive(Debug, Parser)]
#[command(name = "tcqec", version, about = "Stabilizer codes under time-correlated errors")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Syndrome table of a builtin code or code definition file.
    Table {
        code: String,
        /// Largest error weight to enumerate.
        #[arg(long, default_value_t = 1)]
        weight: usize,
        /// List anticommuting generators instead of syndrome bits (default for five_qubit).
        #[arg(long)]
        by_generator: bool,
    },
    /// Generator checks plus codeword stabilization.
    Verify { code: String },
    /// One extended error-correction cycle from a scenario file.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Exit 0 even when the verdict is uncorrectable.
        #[arg(long)]
        allow_failure: bool,
    },
    /// Multi-cycle simulation with new and relapsing errors.
    Montecarlo {
        #[arg(long, default_value = "steane")]
        code: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// same_type or uniform_xyz.
        #[arg(long, default_value = "same_type")]
        relapse: String,
    },
    /// Gates per decoherence time; the implementation table unless both times are given.
    Budget {
        #[arg(long)]
        tau_dch: Option<String>,
        #[arg(long)]
        tau_gate: Option<String>,
    },
    /// Exhaustive code distance.
    Distance { code: String },
    /// Executes a circuit file on the tableau simulator.
    Sim {
        circuit: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Failure with an exit status and a one-line diagnostic.
#[derive(Debug)]
struct Failure {
    status: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        status: EXIT_USAGE,
        message: message.into(),
    }
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        status: EXIT_VALIDATION,
        message: message.to_string(),
    }
}

/// Exit status with what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run_command<I, S>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let status = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.to_string();
            let (stdout, stderr) = if status == EXIT_OK { (text, String::new()) } else { (String::new(), text) };
            return CommandOutput { status, stdout, stderr };
        }
    };
    match dispatch(&cli) {
        Ok(Report { status, out, diagnostic }) => CommandOutput {
            status,
            stdout: out,
            stderr: diagnostic.map(|d| format!("error: {d}\n")).unwrap_or_default(),
        },
        Err(f) => CommandOutput {
            status: f.status,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

/// Rendered output plus, for a nonzero status, the one-line reason.
struct Report {
    status: i32,
    out: String,
    diagnostic: Option<String>,
}

impl Report {
    fn ok(out: String) -> Self {
        Report {
            status: EXIT_OK,
            out,
            diagnostic: None,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Table {
            code,
            weight,
            by_generator,
        } => {
            let code = load_code(code)?;
            let by_generator = *by_generator || code.name == "five_qubit";
            Ok(Report::ok(render_table(&code, *weight, by_generator, format)))
        }
        Command::Verify { code } => verify(&load_code(code)?, format),
        Command::Run {
            scenario,
            seed,
            allow_failure,
        } => {
            let text = read(scenario)?;
            let mut config = ScenarioConfig::parse(&text).map_err(usage)?;
            if seed.is_some() {
                config.seed = *seed;
            }
            run_scenario(&config, *allow_failure, format)
        }
        Command::Montecarlo {
            code,
            epsilon,
            lambda,
            delta,
            cycles,
            trials,
            seed,
            relapse,
        } => {
            let seed = seed.ok_or_else(|| usage("montecarlo requires --seed"))?;
            let policy: RelapsePolicy = relapse.parse().map_err(usage)?;
            let params = NoiseParams::new(*epsilon, *lambda, *delta)
                .map_err(|e| usage(e.to_string()))?
                .with_policy(policy);
            let code = load_code(code)?;
            let stats = monte_carlo(&code, &params, *cycles, *trials, seed).map_err(invalid)?;
            let mut out = match format {
                Format::Table => stats.render_table(),
                Format::Kv => stats.render_kv(),
            };
            let extra = [
                ("epsilon", epsilon.to_string()),
                ("lambda", lambda.to_string()),
                ("delta", delta.to_string()),
                ("relapse_policy", policy.to_string()),
                ("relapse_probability", format!("{:.6e}", params.relapse_probability())),
            ];
            for (k, v) in extra {
                match format {
                    Format::Table => writeln!(out, "{k:<21}  {v}").unwrap(),
                    Format::Kv => writeln!(out, "{k}={v}").unwrap(),
                }
            }
            Ok(Report::ok(out))
        }
        Command::Budget { tau_dch, tau_gate } => budget(tau_dch.as_deref(), tau_gate.as_deref(), format),
        Command::Distance { code } => {
            let code = load_code(code)?;
            let d = code.distance().map_err(invalid)?;
            let out = match format {
                Format::Table => format!("{}: distance {d}\n", code.name),
                Format::Kv => format!("code={}\ndistance={d}\n", code.name),
            };
            Ok(Report::ok(out))
        }
        Command::Sim { circuit, seed } => {
            let seed = seed.ok_or_else(|| usage("sim requires --seed"))?;
            let circuit = Circuit::parse(&read(circuit)?).map_err(invalid)?;
            sim(&circuit, seed, format)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Builtin name or path to a code definition file.
pub fn load_code(spec: &str) -> Result<StabilizerCode, String> {
    if let Ok(code) = StabilizerCode::builtin(spec) {
        return Ok(code);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(format!("unknown code {spec:?} (builtins: five_qubit, steane)"));
    }
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {spec}: {e}"))?;
    StabilizerCode::from_definition(&text).map_err(|e| e.to_string())
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        invalid(message)
    }
}

fn generator_list(gens: &[usize]) -> String {
    if gens.is_empty() {
        return "-".to_string();
    }
    gens.iter().map(|g| format!("M{}", g + 1)).collect::<Vec<_>>().join(",")
}

/// Weight-1 tables use one row per qubit with X, Z and Y columns.
fn render_table(code: &StabilizerCode, weight: usize, by_generator: bool, format: Format) -> String {
    let cell = |e: &crate::pauli::PauliOp| -> String {
        if by_generator {
            generator_list(&code.anticommuting_generators(e).expect("sized"))
        } else {
            code.syndrome_of(e).expect("sized").to_string()
        }
    };
    let mut out = String::new();
    if weight <= 1 {
        if format == Format::Kv {
            for kind in PauliKind::ERRORS {
                for q in 0..code.n {
                    let e = crate::pauli::PauliOp::single(code.n, q, kind).expect("in range");
                    writeln!(out, "{}={}", e.label(), cell(&e)).unwrap();
                }
            }
            return out;
        }
        let rows: Vec<Vec<(String, String)>> = (0..code.n)
            .map(|q| {
                PauliKind::ERRORS
                    .iter()
                    .map(|&kind| {
                        let e = crate::pauli::PauliOp::single(code.n, q, kind).expect("in range");
                        (e.label(), cell(&e))
                    })
                    .collect()
            })
            .collect();
        let heading = if by_generator { "Error Generator(s)" } else { "Error Syndrome" };
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|row| row.iter().map(|(l, c)| format!("{l} {c}")).collect())
            .collect();
        let w = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(0).max(heading.len());
        let head = [heading; 3].map(|h| format!("{h:<w$}"));
        writeln!(out, "{}", head.join(" | ").trim_end()).unwrap();
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:<w$}")).collect();
            writeln!(out, "{}", padded.join(" | ").trim_end()).unwrap();
        }
        return out;
    }
    let table: SyndromeTable = code.syndrome_table(weight);
    let label_w = table.rows.iter().map(|r| r.error.label().len()).max().unwrap_or(0);
    for row in &table.rows {
        let c = cell(&row.error);
        match format {
            Format::Table => writeln!(out, "{:<label_w$} {c}", row.error.label()).unwrap(),
            Format::Kv => writeln!(out, "{}={c}", row.error.label()).unwrap(),
        }
    }
    for col in &table.collisions {
        let names: Vec<String> = col.errors.iter().map(|e| e.label()).collect();
        match format {
            Format::Table => writeln!(out, "collision {}: {}", col.syndrome, names.join(" ")).unwrap(),
            Format::Kv => writeln!(out, "collision.{}={}", col.syndrome, names.join(",")).unwrap(),
        }
    }
    out
}

fn verify(code: &StabilizerCode, format: Format) -> Result<Report, Failure> {
    let report = code.validate();
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let failures = report.failures();
    checks.push((
        "generators".to_string(),
        report.passed(),
        if failures.is_empty() {
            format!("{} independent commuting Hermitian generators", code.generators.len())
        } else {
            failures.join("; ")
        },
    ));
    if report.passed() {
        // Preparation outcome does not depend on the measurement stream.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tableau = code.prepared_tableau(&mut rng).map_err(invalid)?;
        for (i, g) in code.generators.iter().enumerate() {
            let e = tableau.expectation(g).map_err(invalid)?;
            let detail = match e {
                Some(v) => format!("{v:+}"),
                None => "indeterminate".to_string(),
            };
            checks.push((format!("M{} tableau", i + 1), e == Some(1), detail));
        }
        if let Some(states) = &code.logical_states {
            for (label, state) in ["0", "1"].iter().zip(states.iter()) {
                for (i, g) in code.generators.iter().enumerate() {
                    let v = state.expectation(g).map_err(invalid)?;
                    checks.push((
                        format!("M{} |{label}_L>", i + 1),
                        (v - 1.0).abs() <= 1e-12,
                        format!("{v:+.12}"),
                    ));
                }
            }
        }
    }
    let ok = checks.iter().all(|(_, pass, _)| *pass);
    let mut out = String::new();
    match format {
        Format::Table => {
            writeln!(out, "code {} [[{}, {}]]", code.name, code.n, code.k).unwrap();
            let w = checks.iter().map(|(n, _, _)| n.len()).max().unwrap_or(0);
            for (name, pass, detail) in &checks {
                writeln!(out, "{name:<w$}  {}  {detail}", if *pass { "ok  " } else { "FAIL" }).unwrap();
            }
        }
        Format::Kv => {
            writeln!(out, "code={}", code.name).unwrap();
            for (name, pass, _) in &checks {
                let key = name.replace(' ', ".").replace(['|', '>'], "");
                writeln!(out, "{key}={}", if *pass { "ok" } else { "fail" }).unwrap();
            }
            writeln!(out, "valid={ok}").unwrap();
        }
    }
    if ok {
        return Ok(Report::ok(out));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    Ok(Report {
        status: EXIT_VALIDATION,
        out,
        diagnostic: Some(format!("{} failed validation: {}", code.name, failed.join(", "))),
    })
}

/// Parsed scenario file.
///
/// ```text
/// code: steane
/// tracked: 3        # 1-based
/// error: Z3
/// error: Z5
/// seed: 1
/// verbose: false
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub code: String,
    /// 0-based.
    pub tracked: usize,
    pub errors: Vec<InjectedError>,
    pub seed: Option<u64>,
    pub verbose: bool,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut code = None;
        let mut tracked = None;
        let mut errors = Vec::new();
        let mut seed = None;
        let mut verbose = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |m: String| format!("line {}: {m}", idx + 1);
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| at(format!("expected `key: value`, got {line:?}")))?;
            let value = value.trim();
            match key.trim().to_ascii_lowercase().as_str() {
                "code" => code = Some(value.to_string()),
                "tracked" => {
                    let q: usize = value.parse().map_err(|_| at(format!("invalid qubit {value:?}")))?;
                    if q == 0 {
                        return Err(at("qubits are numbered from 1".to_string()));
                    }
                    tracked = Some(q - 1);
                }
                "error" | "errors" => {
                    for item in value.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                        errors.push(item.parse::<InjectedError>().map_err(|e| at(e.to_string()))?);
                    }
                }
                "seed" => seed = Some(value.parse().map_err(|_| at(format!("invalid seed {value:?}")))?),
                "verbose" => verbose = matches!(value, "true" | "yes" | "1"),
                other => return Err(at(format!("unknown key {other:?}"))),
            }
        }
        Ok(ScenarioConfig {
            code: code.ok_or("missing `code`")?,
            tracked: tracked.ok_or("missing `tracked`")?,
            errors,
            seed,
            verbose,
        })
    }

    pub fn validate(&self, code: &StabilizerCode) -> Result<(), String> {
        if self.tracked >= code.n {
            return Err(format!("tracked qubit {} outside 1..={}", self.tracked + 1, code.n));
        }
        for e in &self.errors {
            if let crate::protocol::ErrorSite::Data(q) = e.site {
                if q >= code.n {
                    return Err(format!("error {e} outside 1..={}", code.n));
                }
            }
        }
        Ok(())
    }
}

fn run_scenario(config: &ScenarioConfig, allow_failure: bool, format: Format) -> Result<Report, Failure> {
    let seed = config.seed.ok_or_else(|| usage("run requires a seed (scenario `seed:` or --seed)"))?;
    let code = load_code(&config.code)?;
    config.validate(&code)?;
    let proto = ExtendedProtocol::new(code, config.tracked).map_err(invalid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = proto.fresh_state(&mut rng).map_err(invalid)?;
    proto.entangle(&mut state, &mut rng).map_err(invalid)?;
    let report = proto.full_cycle(&mut state, &config.errors, &mut rng).map_err(invalid)?;
    let errors: Vec<String> = config.errors.iter().map(|e| e.to_string()).collect();
    let errors = if errors.is_empty() { "none".to_string() } else { errors.join(" ") };
    let mut fields = vec![
        ("code", proto.code().name.clone()),
        ("tracked", (config.tracked + 1).to_string()),
        ("errors", errors),
        ("sigma", report.outcome.sigma.to_string()),
        ("ancilla", report.outcome.ancilla_string()),
        ("verdict", report.decision.kind_name().to_string()),
        ("decision", report.decision.to_string()),
        ("valid", report.valid.to_string()),
    ];
    if config.verbose {
        fields.push(("extraction", proto.extraction_circuit().emit().replace('\n', "; ")));
    }
    let mut out = String::new();
    for (k, v) in &fields {
        match format {
            Format::Table => writeln!(out, "{k:<10} {v}").unwrap(),
            Format::Kv => writeln!(out, "{k}={v}").unwrap(),
        }
    }
    let (status, diagnostic) = if allow_failure {
        (EXIT_OK, None)
    } else if report.decision.verdict == Verdict::Uncorrectable {
        (EXIT_UNCORRECTABLE, Some(format!("syndrome {} is uncorrectable", report.outcome.sigma)))
    } else if !report.valid {
        (EXIT_VALIDATION, Some("state is not a codeword after correction".to_string()))
    } else {
        (EXIT_OK, None)
    };
    Ok(Report { status, out, diagnostic })
}

fn budget(tau_dch: Option<&str>, tau_gate: Option<&str>, format: Format) -> Result<Report, Failure> {
    let rows = match (tau_dch, tau_gate) {
        (None, None) => implementation_budgets(),
        (Some(d), Some(g)) => {
            let d: Sci = d.parse().map_err(|e: crate::noise::NoiseError| usage(e.to_string()))?;
            let g: Sci = g.parse().map_err(|e: crate::noise::NoiseError| usage(e.to_string()))?;
            vec![("custom", gate_budget(d, g).map_err(invalid)?)]
        }
        _ => return Err(usage("give both --tau-dch and --tau-gate, or neither")),
    };
    let mut out = String::new();
    match format {
        Format::Table => {
            let head = ["Qubit implementation", "tau_dch(sec)", "tau_gate(sec)", "n_gates"];
            let w0 = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(head[0].len());
            writeln!(out, "{:<w0$}  {:<12}  {:<13}  {}", head[0], head[1], head[2], head[3]).unwrap();
            for (name, b) in &rows {
                writeln!(
                    out,
                    "{name:<w0$}  {:<12}  {:<13}  {}",
                    b.tau_dch.to_string(),
                    b.tau_gate.to_string(),
                    b.n_gates
                )
                .unwrap();
            }
        }
        Format::Kv => {
            for (name, b) in &rows {
                let key: String = name
                    .to_ascii_lowercase()
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                    .collect();
                writeln!(out, "{key}.tau_dch={}", b.tau_dch).unwrap();
                writeln!(out, "{key}.tau_gate={}", b.tau_gate).unwrap();
                writeln!(out, "{key}.n_gates={}", b.n_gates).unwrap();
            }
        }
    }
    Ok(Report::ok(out))
}

fn sim(circuit: &Circuit, seed: u64, format: Format) -> Result<Report, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tableau::new(circuit.num_qubits());
    let records = t.run(circuit, &mut rng).map_err(invalid)?;
    let mut out = String::new();
    match format {
        Format::Table => {
            for m in &records {
                let q = m.qubit.map(|q| q + 1).unwrap_or(0);
                let how = if m.deterministic { "deterministic" } else { "random" };
                writeln!(out, "measure {q:<3} {}  {how}", m.outcome).unwrap();
            }
            writeln!(out, "stabilizers").unwrap();
            for s in t.canonical_stabilizers() {
                writeln!(out, "  {s}").unwrap();
            }
        }
        Format::Kv => {
            let outcomes: Vec<String> = records.iter().map(|m| m.outcome.to_string()).collect();
            let random = records.iter().filter(|m| !m.deterministic).count();
            writeln!(out, "qubits={}", circuit.num_qubits()).unwrap();
            writeln!(out, "measurements={}", records.len()).unwrap();
            writeln!(out, "outcomes={}", outcomes.join(",")).unwrap();
            writeln!(out, "random={random}").unwrap();
        }
    }
    Ok(Report::ok(out))
}

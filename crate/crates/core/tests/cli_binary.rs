use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn tcqec(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tcqec")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn regression_circuit_reproduces_golden_measurements() {
    let path = fixture("steane_double_error.stab");
    for seed in ["0", "17", "123456"] {
        let (status, out, _) = tcqec(&["--format", "kv", "sim", path.to_str().unwrap(), "--seed", seed]);
        assert_eq!(status, 0);
        // ancillas A, B | extended syndrome | check syndrome after correction
        assert!(out.contains("outcomes=1,0,1,0,0,0,1,1,0,0,0,0,0,0\n"), "{out}");
        assert!(out.contains("random=0\n"));
    }
}

#[test]
fn double_error_scenario() {
    let (status, out, _) = tcqec(&["run", fixture("example_double.scn").to_str().unwrap()]);
    assert_eq!(status, 0);
    assert!(out.contains("correct Z on qubit 3 and Z on qubit 5"), "{out}");
    assert!(out.contains("sigma      110000"));
    assert!(out.contains("ancilla    01"));
}

#[test]
fn uncorrectable_verdict_exits_two() {
    let path = scratch("two_new.scn", "code: steane\ntracked: 3\nerror: X1 Z2\nseed: 3\n");
    let (status, out, err) = tcqec(&["run", path.to_str().unwrap()]);
    assert_eq!(status, 2, "{out}{err}");
    assert!(out.contains("verdict    uncorrectable"));
    assert_eq!(err, "error: syndrome 010001 is uncorrectable\n");
    let (status, out, _) = tcqec(&["run", path.to_str().unwrap(), "--allow-failure"]);
    assert_eq!(status, 0);
    assert!(out.contains("uncorrectable"));
}

#[test]
fn stochastic_commands_require_a_seed() {
    let path = scratch("no_seed.scn", "code: steane\ntracked: 1\nerror: X1\n");
    assert_eq!(tcqec(&["run", path.to_str().unwrap()]).0, 3);
    assert_eq!(tcqec(&["run", path.to_str().unwrap(), "--seed", "2"]).0, 0);
    assert_eq!(tcqec(&["montecarlo", "--epsilon", "0.1"]).0, 3);
    assert_eq!(tcqec(&["sim", fixture("steane_double_error.stab").to_str().unwrap()]).0, 3);
}

#[test]
fn bad_inputs_fail_with_one_line() {
    let bad = scratch("bad.code", "name: bad\nn: 2\nk: 0\nXX\nZI\n");
    let (status, out, err) = tcqec(&["verify", bad.to_str().unwrap()]);
    assert_eq!(status, 1, "{out}");
    assert!(out.contains("M1 and M2 anti-commute"));
    assert_eq!(err, "error: bad failed validation: generators\n");
    let (status, _, err) = tcqec(&["run", scratch("range.scn", "code: steane\ntracked: 8\nseed: 1\n").to_str().unwrap()]);
    assert_eq!(status, 1);
    assert_eq!(err.lines().count(), 1, "{err}");
    let (status, _, err) = tcqec(&["sim", scratch("bad.stab", "qubits 2\ncnot 1 1\n").to_str().unwrap(), "--seed", "1"]);
    assert_eq!(status, 1);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert_eq!(tcqec(&["montecarlo", "--epsilon", "2", "--seed", "1"]).0, 3);
}

#[test]
fn code_definition_files_work_everywhere() {
    let path = fixture("five_qubit.code");
    let p = path.to_str().unwrap();
    assert_eq!(tcqec(&["distance", p]).1, "five_qubit_file: distance 3\n");
    assert_eq!(tcqec(&["verify", p]).0, 0);
    let (_, out, _) = tcqec(&["table", p, "--by-generator"]);
    assert!(out.contains("Z4 M1,M4"));
    let (_, out, _) = tcqec(&["--format", "kv", "table", p, "--weight", "2"]);
    assert!(out.contains("collision.1001=Z4,X1X2"), "{out}");
}

#[test]
fn budget_table_and_custom_times() {
    let (_, out, _) = tcqec(&["budget"]);
    let nuclear = out.lines().find(|l| l.starts_with("Nuclear spin")).unwrap();
    assert_eq!(nuclear.split_whitespace().collect::<Vec<_>>(), ["Nuclear", "spin", "10^4", "10^-3", "10^7"]);
    let (_, kv, _) = tcqec(&["--format", "kv", "budget"]);
    assert!(kv.contains("trapped_indium_ion.n_gates=10^13\n"));
    let (_, out, _) = tcqec(&["budget", "--tau-dch", "2e-3", "--tau-gate", "4e-9"]);
    assert!(out.contains("5e5"), "{out}");
}

#[test]
fn montecarlo_output_is_reproducible() {
    let args = ["--format", "kv", "montecarlo", "--epsilon", "0.1", "--lambda", "0.6", "--cycles", "30", "--trials", "20", "--seed", "5"];
    let a = tcqec(&args);
    let b = tcqec(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert!(a.1.contains("relapse_probability=1.620000e-2\n"), "{}", a.1);
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcqec::codes::StabilizerCode;
use tcqec::noise::{monte_carlo, simulate, CycleHistory, NoiseParams, SampledCycle, ScriptedErrors};
use tcqec::pauli::PauliKind;
use tcqec::protocol::InjectedError;

fn within_three_sigma(count: u64, trials: u64, p: f64) -> bool {
    let mean = trials as f64 * p;
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= 3.0 * sigma
}

#[test]
fn relapse_and_new_error_frequencies() {
    let params = NoiseParams::new(0.2, 0.9, 1.0).unwrap();
    let p_relapse = params.relapse_probability();
    assert!((p_relapse - 0.9f64.powi(4) / 8.0).abs() < 1e-15);
    let mut history = CycleHistory::new();
    history.push(Some((4, PauliKind::Z)));
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let trials = 100_000u64;
    let (mut relapses, mut new) = (0u64, 0u64);
    let mut per_qubit = [0u64; 7];
    for _ in 0..trials {
        let s = params.sample_cycle(7, &history, &mut rng);
        if let Some(r) = s.relapse {
            assert_eq!(r, InjectedError::data(4, PauliKind::Z));
            relapses += 1;
        }
        if let Some(e) = s.new {
            new += 1;
            if let tcqec::protocol::ErrorSite::Data(q) = e.site {
                per_qubit[q] += 1;
            }
        }
    }
    assert!(within_three_sigma(relapses, trials, p_relapse), "{relapses}");
    assert!(within_three_sigma(new, trials, 0.2), "{new}");
    for c in per_qubit {
        assert!(within_three_sigma(c, new, 1.0 / 7.0), "{per_qubit:?}");
    }
}

#[test]
fn certain_noise_gives_one_new_error_and_one_relapse() {
    let params = NoiseParams::new(1.0, 2.0, 1.0).unwrap();
    let code = StabilizerCode::steane();
    let stats = monte_carlo(&code, &params, 20, 3, 5).unwrap();
    assert_eq!(stats.new_errors, 60);
    // first cycle of each trial has nothing to relapse
    assert_eq!(stats.relapses, 57);
}

#[test]
fn quiet_channel_never_fails() {
    let code = StabilizerCode::five_qubit();
    let stats = monte_carlo(&code, &NoiseParams::new(0.0, 0.5, 1.0).unwrap(), 30, 5, 1).unwrap();
    assert_eq!(stats.no_error, 150);
    assert_eq!(stats.relapses + stats.extended_failures + stats.baseline_failures, 0);
}

#[test]
fn relapse_followed_by_new_error_is_corrected() {
    // cycle 1: X on qubit 2 is corrected; cycle 2: it relapses while qubit 6 takes a Z
    let script = vec![
        SampledCycle {
            new: Some(InjectedError::data(1, PauliKind::X)),
            relapse: None,
        },
        SampledCycle {
            new: Some(InjectedError::data(5, PauliKind::Z)),
            relapse: Some(InjectedError::data(1, PauliKind::X)),
        },
    ];
    let code = StabilizerCode::steane();
    let stats = simulate(&code, |_| ScriptedErrors::new(script.clone()), 3, 2, 0).unwrap();
    assert_eq!((stats.single, stats.double, stats.no_error), (2, 2, 2));
    assert_eq!(stats.extended_failures, 0);
    assert_eq!(stats.baseline_failures, 2);
}

fn double_event_script(seed: u64, events: usize) -> Vec<SampledCycle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..events {
        let a = rng.random_range(0..7);
        let b = (a + rng.random_range(1..7)) % 7;
        let ka = PauliKind::ERRORS[rng.random_range(0..3)];
        let kr = PauliKind::ERRORS[rng.random_range(0..3)];
        let kb = PauliKind::ERRORS[rng.random_range(0..3)];
        out.push(SampledCycle {
            new: Some(InjectedError::data(a, ka)),
            relapse: None,
        });
        out.push(SampledCycle {
            new: Some(InjectedError::data(b, kb)),
            relapse: Some(InjectedError::data(a, kr)),
        });
    }
    out
}

#[test]
fn scripted_double_events_defeat_only_the_baseline() {
    let code = StabilizerCode::steane();
    let events = 40;
    let stats = simulate(&code, |t| ScriptedErrors::new(double_event_script(t as u64, events)), 2 * events, 4, 3).unwrap();
    assert_eq!(stats.double_events, 4 * events as u64);
    assert_eq!(stats.extended_failures, 0);
    assert_eq!(stats.baseline_failures, stats.double_events);
    assert_eq!(stats.double, stats.double_events);
}

#[test]
fn statistics_do_not_depend_on_thread_count() {
    let code = StabilizerCode::steane();
    let params = NoiseParams::new(0.1, 0.7, 1.0).unwrap();
    let a = monte_carlo(&code, &params, 40, 16, 8).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| monte_carlo(&code, &params, 40, 16, 8).unwrap());
    assert_eq!(a.render_kv(), b.render_kv());
    let c = monte_carlo(&code, &params, 40, 16, 9).unwrap();
    assert_ne!(a.render_kv(), c.render_kv());
}

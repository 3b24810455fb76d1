//! Summary statistics, the oracle and file round trips.

use cbol_core::reporting::io::{history_jsonl, read_history, write_history};
use cbol_core::reporting::oracle::{run_oracle, DEFAULT_RESOLUTION};
use cbol_core::reporting::{compare, summarize, Config};
use cbol_core::{
    multi_run, BoundsBox, Objective, RunResult, SyntheticSystem, TunerConfig, Weights,
};

fn setup() -> (SyntheticSystem, Objective) {
    let system = SyntheticSystem::load_default().unwrap();
    let objective = Objective::new(Weights::step(), system.reference_intensity()).unwrap();
    (system, objective)
}

fn runs() -> Vec<RunResult> {
    let (system, objective) = setup();
    let cfg = TunerConfig {
        iterations: 24,
        runs: 10,
        candidate_count: 128,
        refine_steps: 8,
        ..TunerConfig::default()
    };
    multi_run(&cfg, &system, &objective).unwrap()
}

/// Second implementation: selection by counting, Welford variance.
fn oracle_stats(v: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = v.len();
    let k = (n - 1) / 2;
    let median = *v
        .iter()
        .find(|x| {
            let below = v.iter().filter(|y| y < x).count();
            let equal = v.iter().filter(|y| y == x).count();
            below <= k && k < below + equal
        })
        .unwrap();
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, x) in v.iter().enumerate() {
        let d = x - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (x - mean);
    }
    let std = if n > 1 {
        (m2 / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (median, mean, std, min, max)
}

#[test]
fn summary_matches_independent_statistics() {
    let results = runs();
    let s = summarize(&results, "bo").unwrap();
    assert_eq!(s.runs, 10);
    assert_eq!(s.per_run_best.len() + s.empty_runs, 10);
    let (median, mean, std, min, max) = oracle_stats(&s.per_run_best);
    assert!((s.median.unwrap() - median).abs() < 1e-12);
    assert!((s.mean.unwrap() - mean).abs() < 1e-12);
    assert!((s.std.unwrap() - std).abs() < 1e-12);
    assert_eq!(s.min.unwrap(), min);
    assert_eq!(s.max.unwrap(), max);
    assert!(s.min <= s.median && s.median <= s.max);
    let pooled: usize = results
        .iter()
        .map(|r| r.all_entries.len() - r.pruned_len())
        .sum();
    assert!((s.pruned_fraction - pooled as f64 / 240.0).abs() < 1e-15);

    let mut shuffled = results.clone();
    shuffled.reverse();
    shuffled.swap(0, 4);
    assert_eq!(summarize(&shuffled, "bo").unwrap(), s);

    let r = compare(s.clone(), summarize(&results[..], "rs").unwrap(), None).unwrap();
    assert_eq!(r.median_delta, Some(0.0));
}

#[test]
fn deltas_are_recomputable() {
    let results = runs();
    let bo = summarize(&results, "bo").unwrap();
    let mut rs = bo.clone();
    rs.method = "rs".into();
    rs.median = rs.median.map(|m| m + 0.013);
    rs.mean = rs.mean.map(|m| m - 0.2);
    rs.std = rs.std.map(|m| m * 3.0);
    let r = compare(bo.clone(), rs.clone(), None).unwrap();
    assert!((r.median_delta.unwrap() - (bo.median.unwrap() - rs.median.unwrap())).abs() < 1e-12);
    assert!((r.mean_delta.unwrap() - (bo.mean.unwrap() - rs.mean.unwrap())).abs() < 1e-12);
    assert!((r.std_delta.unwrap() - (bo.std.unwrap() - rs.std.unwrap())).abs() < 1e-12);
}

#[test]
fn oracle_refines_and_converges() {
    let (system, objective) = setup();
    let bounds = BoundsBox::unit_latent();
    let coarse = run_oracle(&system, &objective, &bounds, 3).unwrap();
    let fine = run_oracle(&system, &objective, &bounds, DEFAULT_RESOLUTION).unwrap();
    let finer = run_oracle(&system, &objective, &bounds, 2 * DEFAULT_RESOLUTION).unwrap();
    assert!(fine.loss <= coarse.loss);
    assert!((fine.loss - finer.loss).abs() < 1e-4);
    assert_eq!(
        run_oracle(&system, &objective, &bounds, DEFAULT_RESOLUTION).unwrap(),
        fine
    );
    assert!(system.in_manifold(&fine.z_star));
}

#[test]
fn oracle_is_a_lower_bound_on_manifold_samples() {
    let (system, objective) = setup();
    let bounds = BoundsBox::unit_latent();
    let fine = run_oracle(&system, &objective, &bounds, DEFAULT_RESOLUTION).unwrap();
    let m = system.constants().manifold.box_within(&bounds).unwrap();
    let mut rng = cbol_core::rng::seeded(9);
    for _ in 0..500 {
        let z = cbol_core::tuner::sample_initial(&m, &mut rng).unwrap();
        assert!(objective.evaluate(&system, &z).total_loss >= fine.loss - 1e-9);
    }
}

#[test]
fn history_round_trips_through_jsonl() {
    let results = runs();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run_0.jsonl");
    write_history(&path, &results[0]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, history_jsonl(&results[0]).unwrap());
    assert_eq!(text.lines().count(), 24);
    let back = read_history(&path).unwrap();
    assert_eq!(back, results[0].all_entries);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first["z1"].is_array());
    assert!(first["passed_classifier"].is_boolean());
    assert_eq!(first["trajectory"].as_array().unwrap().len(), 48);

    std::fs::write(&path, text.replacen("\"iteration\"", "\"iter\"", 1)).unwrap();
    assert!(read_history(&path).is_err());
}

#[test]
fn config_file_resolves_relative_asset_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("system.json"),
        cbol_core::system::DEFAULT_ASSET_JSON,
    )
    .unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        "[system]\nasset = \"system.json\"\n[tuner]\nruns = 2\n",
    )
    .unwrap();
    let cfg = Config::load(&cfg_path).unwrap();
    assert_eq!(cfg.tuner().unwrap().runs, 2);
    let system = cfg.system().unwrap();
    assert_eq!(
        system.constants(),
        SyntheticSystem::load_default().unwrap().constants()
    );

    std::fs::write(dir.path().join("system.json"), "{}").unwrap();
    assert!(cfg.system().is_err());
}

use std::fs;

use proptest::prelude::*;
use qdt::cli::run_cli;
use qdt::{builtin_with, parse_scenario, random_scenario, random_strict_scenario, BuiltinParams, MatrixKind};
use qdt_core::hilbert::StateOfMind;
use qdt_core::measure::{evaluate, NormalizationPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("qdt").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn evaluate_h2_as_json() {
    let (code, out, _) = cli(&["evaluate", "demo:h2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["optimal"], "pi1");
    assert!(v["checks"]["sum_q"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["prospects"][0]["p_raw"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["prospects"][0].get("p_normalized").is_none());
}

#[test]
fn rank_orders_by_probability() {
    let (code, out, _) = cli(&["rank", "demo:register", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<(String, f64, usize)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].parse().unwrap(), r[5].parse().unwrap())
        })
        .collect();
    assert_eq!(rows[0].0, "psi_plus");
    assert!(rows.windows(2).all(|w| w[0].1 >= w[1].1 && w[0].2 < w[1].2));
    assert_eq!(rows.last().unwrap().0, "vacuum");
}

#[test]
fn renorm_adds_normalized_column() {
    let (code, out, _) = cli(&["evaluate", "demo:disjunction", "--normalization", "renorm", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let total: f64 = v["prospects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["p_normalized"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn scenario_file_and_demo_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h2.json");
    let (code, json, _) = cli(&["demo", "h2"]);
    assert_eq!(code, 0);
    fs::write(&path, json).unwrap();
    let from_file = cli(&["evaluate", path.to_str().unwrap(), "--format", "csv"]);
    let from_demo = cli(&["evaluate", "demo:h2", "--format", "csv"]);
    assert_eq!(from_file.1, from_demo.1);
}

#[test]
fn random_command_is_reproducible() {
    let args = ["random", "--modes", "2,3", "--prospects", "6", "--seed", "11"];
    let (code, a, _) = cli(&args);
    assert_eq!(code, 0);
    assert_eq!(a, cli(&args).1);
    let s = parse_scenario(a.as_bytes()).unwrap();
    assert_eq!(s.prospects.len(), 6);
    assert_eq!(s.options.seed, Some(11));
}

#[test]
fn errors_are_reported_as_json_on_stderr() {
    let (code, out, err) = cli(&["evaluate", "demo:nonesuch"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "UsageError");

    let (code, _, _) = cli(&["evaluate", "demo:h2", "--tolerance", "-1"]);
    assert_eq!(code, 2);
}

#[test]
fn oracle_flag_adds_checks() {
    let (code, out, _) = cli(&["validate", "demo:register", "--oracle", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["checks"]["identity_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn strict_random_scenario_sums_to_one_for_many_states() {
    let s = random_strict_scenario(5, &[2, 3], 6).unwrap();
    let states = s.prospect_states().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let psi = StateOfMind::new(qdt::random::random_psi(&mut rng, 6), 1e-10).unwrap();
        let state = evaluate(&states, &psi, NormalizationPolicy::strict()).unwrap();
        state.check().unwrap();
        assert!((state.diagnostics.sum_p - 1.0).abs() < 1e-12);
        assert!(state.diagnostics.sum_q.abs() < 1e-12);
    }
}

#[test]
fn disjunction_decomposes_for_random_states() {
    let s = builtin_with("disjunction", &BuiltinParams { phase: 0.7, ..BuiltinParams::default() }).unwrap();
    let states = s.prospect_states().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let psi = StateOfMind::new(qdt::random::random_psi(&mut rng, 4), 1e-10).unwrap();
        let state = evaluate(&states, &psi, NormalizationPolicy::given()).unwrap();
        for row in &state.prospects {
            assert!(row.decomposition_residual() < 1e-12);
        }
    }
}

#[test]
fn disjunction_matches_closed_form() {
    for phase in [0.0, 0.5, 2.0] {
        let s = builtin_with("disjunction", &BuiltinParams { phase, ..BuiltinParams::default() }).unwrap();
        let state = evaluate(&s.prospect_states().unwrap(), &s.psi().unwrap(), NormalizationPolicy::given()).unwrap();
        let act = &state.prospects[0];
        assert!((act.q + phase.cos() / 2.0).abs() < 1e-12);
        assert!((act.p_raw - (1.0 - phase.cos()) / 2.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_scenarios_round_trip(seed in any::<u64>(), a in 1usize..5, b in 1usize..4, n in 1usize..5, kind in 0u8..2) {
        let kind = if kind == 0 { MatrixKind::ColumnUnit } else { MatrixKind::Free };
        let s = random_scenario(seed, &[a, b], n, kind).unwrap();
        let text = s.to_json();
        let back = parse_scenario(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_json(), text);
    }
}

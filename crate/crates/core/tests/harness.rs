use std::fs;
use std::path::PathBuf;

use mixlab_core::harness::{builtin, corpus_run, load, run, RowStatus, Scenario, BUILTIN_NAMES};
use mixlab_core::MixError;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn run_builtin(name: &str) -> mixlab_core::harness::ScenarioReport {
    let s = builtin(name).unwrap();
    run(&s.resolve().unwrap()).unwrap()
}

#[test]
fn every_builtin_resolves_and_round_trips() {
    for name in BUILTIN_NAMES {
        let s = builtin(name).unwrap();
        s.resolve().unwrap();
        let back = Scenario::from_json_str(&s.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

#[test]
fn sharpness_builtin_has_mixing_margin_two() {
    let r = run_builtin("sharpness_p1_nu025");
    assert!(r.passed());
    let mix = r.check("mixing_floor").unwrap();
    for s in &mix.samples {
        assert!((s.margin - 2.0).abs() <= 1e-12, "{}", s.margin);
    }
}

#[test]
fn heat_builtin_passes_the_c2_check() {
    let r = run_builtin("heat_cosy");
    assert!(r.passed());
    let c2 = r.check("exponential_lower").unwrap();
    assert_eq!(c2.certificate["c2"].as_f64().unwrap(), 0.2);
}

#[test]
fn couette_builtin_passes() {
    let r = run_builtin("couette_cosx");
    for c in &r.checks {
        assert!(c.passed(), "{} min margin {}", c.check, c.min_margin);
    }
    let residual = r.diagnostics["energy_identity"]["max_residual"].as_f64().unwrap();
    assert!(residual <= 1e-5, "{residual}");
}

#[test]
fn inviscid_builtin_passes() {
    let r = run_builtin("inviscid_cosx");
    assert!(
        r.passed(),
        "{:?}",
        r.checks.iter().map(|c| c.min_margin).collect::<Vec<_>>()
    );
    assert_eq!(r.check("inviscid_hneg1").unwrap().samples.len(), 200);
}

#[test]
fn fast_builtins_pass_and_itemize_the_threshold() {
    for name in ["fast_shear", "fast_cellular"] {
        let r = run_builtin(name);
        assert!(r.passed(), "{name}");
        let cert = &r.checks[0].certificate["certificate"];
        let terms = cert["terms"].as_object().unwrap();
        assert_eq!(terms.len(), 6);
        let max = terms.values().map(|v| v.as_f64().unwrap()).fold(f64::MIN, f64::max);
        assert_eq!(cert["A0"].as_f64().unwrap(), max);
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run_builtin("heat_cosy").without_timing();
    let b = run_builtin("heat_cosy").without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn missing_field_is_named_in_the_error() {
    let text = r#"{ "name": "x", "regime": "diffusive_shear", "initial": { "lattice": { "kmax": 1, "lmax": 2 },
        "terms": [{ "ampl": 1.0, "kx": 0, "ky": 1 }] }, "nu": 0.1 }"#;
    match Scenario::from_json_str(text) {
        Err(MixError::Schema { msg, .. }) => assert!(msg.contains("times"), "{msg}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn nested_errors_carry_their_path() {
    let text = r#"{ "name": "x", "regime": "diffusive_shear", "initial": { "lattice": { "kmax": 1, "lmax": 2 },
        "terms": [{ "ampl": "one", "kx": 0, "ky": 1 }] }, "nu": 0.1, "times": [1.0] }"#;
    match Scenario::from_json_str(text) {
        Err(MixError::Schema { path, .. }) => assert_eq!(path, "initial.terms[0].ampl"),
        other => panic!("expected a schema error, got {other:?}"),
    }
    let text = r#"{ "name": "x", "regime": "fast_oscillation", "initial": { "lattice": { "kmax": 1, "lmax": 2 },
        "terms": [{ "ampl": 1.0, "kx": 0, "ky": 1 }] }, "nu": 0.1, "A": 10, "times": [1.0],
        "flow": { "kind": "flow2d", "terms": [{ "ampl": 1.0, "kx": 1, "ky": 0, "time_mode": "weekly" }], "bounds": { "lip": 1 } } }"#;
    let s = Scenario::from_json_str(text).unwrap();
    match s.resolve() {
        Err(MixError::Schema { path, .. }) => assert_eq!(path, "flow.terms[0].time_mode"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn regime_consistency_is_enforced() {
    let mut s = builtin("inviscid_cosx").unwrap();
    s.nu = Some(0.1);
    assert!(matches!(s.resolve(), Err(MixError::Schema { path, .. }) if path == "nu"));
    let mut s = builtin("heat_cosy").unwrap();
    s.nu = None;
    assert!(matches!(s.resolve(), Err(MixError::Schema { path, .. }) if path == "nu"));
    let mut s = builtin("fast_shear").unwrap();
    s.a = None;
    assert!(matches!(s.resolve(), Err(MixError::Schema { path, .. }) if path == "A"));
    let mut s = builtin("heat_cosy").unwrap();
    s.flow = serde_json::json!("cellular");
    assert!(matches!(s.resolve(), Err(MixError::Schema { path, .. }) if path == "flow"));
}

#[test]
fn load_prefers_files_then_builtins() {
    assert_eq!(load("heat_cosy").unwrap().name, "heat_cosy");
    assert!(load("no_such_scenario").is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let mut s = builtin("heat_cosy").unwrap();
    s.name = "from_file".into();
    fs::write(&path, s.to_json_pretty().unwrap()).unwrap();
    assert_eq!(load(path.to_str().unwrap()).unwrap().name, "from_file");
}

#[test]
fn flow_and_field_files_resolve_relative_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("flow.json"),
        r#"{ "kind": "shear", "terms": [{ "ampl": 1.0, "ky": 1, "phase_mode": "sin" }], "bounds": { "M": 1.0, "w11": 0.7 } }"#,
    )
    .unwrap();
    fs::write(
        dir.path().join("rho.json"),
        r#"{ "kmax": 1, "lmax": 8, "coeffs": [[1, 0, 0.5, 0.0], [-1, 0, 0.5, 0.0]] }"#,
    )
    .unwrap();
    let text = r#"{ "name": "files", "regime": "diffusive_shear", "initial": { "file": "rho.json" },
        "flow": { "file": "flow.json" }, "nu": 0.1, "times": { "t_end": 1.0, "samples": 5 } }"#;
    let path = dir.path().join("s.json");
    fs::write(&path, text).unwrap();
    let s = Scenario::from_path(&path).unwrap().resolve().unwrap();
    assert_eq!(s.rho0.lattice().lmax, 8);
    assert!(s.flow.as_shear().is_some());
}

#[test]
fn empty_corpus_is_empty_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let summary = corpus_run(dir.path(), Some(out.path())).unwrap();
    assert!(summary.rows.is_empty());
    assert_eq!(summary.exit_code(), 0);
    let csv = fs::read_to_string(out.path().join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn corrupted_file_becomes_an_error_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut copied = 0;
    for entry in fs::read_dir(corpus_dir()).unwrap() {
        let p = entry.unwrap().path();
        if copied < 2 {
            fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
            copied += 1;
        }
    }
    fs::write(dir.path().join("zz_broken.json"), "{ \"name\": ").unwrap();
    let out = tempfile::tempdir().unwrap();
    let summary = corpus_run(dir.path(), Some(out.path())).unwrap();
    assert_eq!(summary.rows.len(), 3);
    assert_eq!(summary.count(RowStatus::Pass), 2);
    assert_eq!(summary.count(RowStatus::Error), 1);
    assert_eq!(summary.rows[2].file, "zz_broken.json");
    assert_ne!(summary.exit_code(), 0);
    assert_eq!(fs::read_dir(out.path()).unwrap().count(), 3);
}

#[test]
fn shipped_corpus_passes() {
    let out = tempfile::tempdir().unwrap();
    let summary = corpus_run(&corpus_dir(), Some(out.path())).unwrap();
    assert_eq!(summary.rows.len(), 12);
    for r in &summary.rows {
        assert_eq!(r.status, RowStatus::Pass, "{} {:?}", r.file, r.error);
    }
    assert_eq!(summary.exit_code(), 0);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mixlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixlab"))
        .args(args)
        .env_remove("MIXLAB_THREADS")
        .output()
        .unwrap()
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn simulate_writes_the_csv_header_and_one_row_per_sample() {
    let out = mixlab(&["simulate", "--scenario", "heat_cosy"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,l2,hneg1,mix_scale,E_-2,E_-1,E_0,E_1,E_2");
    assert_eq!(lines.count(), 51);
}

#[test]
fn simulate_out_writes_a_reloadable_field() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("final.json");
    let csv = dir.path().join("traj.csv");
    let out = mixlab(&[
        "simulate",
        "--scenario",
        "heat_cosy",
        "--out",
        field.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&field).unwrap()).unwrap();
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 2);
    for c in coeffs {
        assert!(c[0].is_i64() && c[1].is_i64());
        // cos y decays as e^{-ν t}, ν = 0.1, t = 5
        assert!((c[2].as_f64().unwrap() - 0.5 * (-0.5f64).exp()).abs() < 1e-12);
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 52);
}

#[test]
fn overrides_change_the_certificate() {
    let a = json_stdout(&mixlab(&["certify", "c2", "--scenario", "heat_cosy"]));
    let b = json_stdout(&mixlab(&["certify", "c2", "--scenario", "heat_cosy", "--nu", "0.2"]));
    assert_eq!(a["c2"].as_f64().unwrap(), 0.2);
    assert_eq!(b["c2"].as_f64().unwrap(), 0.4);
}

#[test]
fn certify_defaults_follow_the_kind() {
    let inv = json_stdout(&mixlab(&["certify", "inviscid"]));
    assert!(inv["S"].as_f64().unwrap() > 0.0);
    let fast = json_stdout(&mixlab(&["certify", "fast"]));
    assert_eq!(fast["certificate"]["terms"].as_object().unwrap().len(), 6);
}

#[test]
fn certify_rejects_a_mismatched_regime() {
    let out = mixlab(&["certify", "fast", "--scenario", "heat_cosy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diffusive_shear"));
}

#[test]
fn verify_prints_one_line_per_check_and_passes() {
    let out = mixlab(&["verify", "--scenario", "sharpness_p1_nu025"]);
    let report = json_stdout(&out);
    assert_eq!(report["verdict"], "PASS");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 4);
    assert!(stderr.lines().all(|l| l.contains("Pass")));
}

#[test]
fn declared_bounds_below_the_sampled_flow_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(
        &path,
        r#"{ "name": "m", "regime": "diffusive_shear",
            "initial": { "lattice": { "kmax": 1, "lmax": 16 }, "terms": [{ "ampl": 1.0, "kx": 1, "ky": 0 }] },
            "flow": { "kind": "shear", "terms": [{ "ampl": 1.0, "ky": 1, "phase_mode": "sin" }], "bounds": { "M": 0.01, "w11": 0.01 } },
            "nu": 0.1, "times": { "t_end": 1.0, "samples": 5 } }"#,
    )
    .unwrap();
    let out = mixlab(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("M = 0.01"));
}

#[test]
fn sharpness_reports_the_expected_family() {
    let v = json_stdout(&mixlab(&["sharpness", "--nu", "0.25", "--p", "1"]));
    assert!((v["measured_rate"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((v["certified_c_star"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert!((v["measured_over_certified"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn spectrum_honours_the_cutoff() {
    let v = json_stdout(&mixlab(&["spectrum", "--cutoff", "6", "--max", "5"]));
    assert_eq!(v["cutoff"], 6);
    assert!(v["dim"].as_u64().unwrap() > 0);
}

#[test]
fn corpus_writes_reports_and_exits_clean() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = mixlab(&[
        "corpus",
        corpus_dir().to_str().unwrap(),
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(out_dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 13);
    assert_eq!(fs::read_dir(out_dir.path()).unwrap().count(), 13);
}

#[test]
fn corpus_with_only_broken_files_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.json"), "[]").unwrap();
    let out = mixlab(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ERROR"));
}

#[test]
fn thread_cap_is_validated_and_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mixlab"))
            .args(["verify", "--scenario", "couette_cosx"])
            .env("MIXLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["runtime_s"] = Value::Null;
        for c in v["checks"].as_array_mut().unwrap() {
            c["runtime_s"] = Value::Null;
        }
        v
    };
    assert_eq!(strip(&run("1")), strip(&run("4")));
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn unknown_scenario_is_an_error() {
    let out = mixlab(&["verify", "--scenario", "no_such_thing"]);
    assert_eq!(out.status.code(), Some(2));
}

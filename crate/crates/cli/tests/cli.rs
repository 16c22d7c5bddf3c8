//! End-to-end tests through the binary: spec ingestion, exit codes, report
//! shapes, and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyhg"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn cheb(dir: &Path, dim: usize) -> PathBuf {
    write(
        dir,
        &format!("cheb{dim}.json"),
        &format!("{{ \"kind\": \"chebyshev\", \"dim\": {dim} }}"),
    )
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn verify_chebyshev_passes_and_records_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 2);
    let out = run(&["verify", "--spec", spec.to_str().unwrap(), "--box", "6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(true));
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"chebyshev_closed_form"));
    assert!(names.contains(&"nonnegativity"));
    assert!(names.contains(&"associativity"));
    assert!(names.contains(&"degree_basis"));
}

#[test]
fn verify_rejects_engineered_negative_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "badrec.json",
        r#"{ "kind": "recurrence1d", "a": ["1"], "b": ["0"], "c": ["0"],
             "tail": { "a": "1/4", "b": "0", "c": "3/4", "from": 1 } }"#,
    );
    let out = run(&["verify", "--spec", spec.to_str().unwrap(), "--box", "4"]);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(false));
    let nonneg = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "nonnegativity")
        .unwrap();
    let detail = nonneg["detail"].as_str().unwrap();
    assert!(
        detail.contains("c(2,2,2)") && detail.contains("-3/2"),
        "{detail}"
    );
}

#[test]
fn verify_malformed_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "broken.json", "{ not json");
    let out = run(&["verify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_is_deterministic_and_jobs_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let base = run(&["verify", "--spec", spec.to_str().unwrap(), "--box", "10"]);
    let again = run(&["verify", "--spec", spec.to_str().unwrap(), "--box", "10"]);
    assert_eq!(base.stdout, again.stdout);
    let jobs3 = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--box",
        "10",
        "--jobs",
        "3",
    ]);
    assert_eq!(base.stdout, jobs3.stdout);
}

#[test]
fn conv_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec2 = cheb(dir.path(), 2);
    let out = run(&[
        "conv",
        "--spec",
        spec2.to_str().unwrap(),
        "--x",
        "1,1",
        "--y",
        "1,1",
    ]);
    assert_eq!(code(&out), 0);
    let measure = stdout_json(&out);
    let entries = measure.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for entry in entries {
        assert_eq!(entry["re"], Value::String("1/4".into()));
    }

    // identity element
    let spec1 = cheb(dir.path(), 1);
    let out = run(&[
        "conv",
        "--spec",
        spec1.to_str().unwrap(),
        "--x",
        "0",
        "--y",
        "5",
    ]);
    let measure = stdout_json(&out);
    assert_eq!(measure.as_array().unwrap().len(), 1);
    assert_eq!(measure[0]["point"][0], Value::from(5));
    assert_eq!(measure[0]["re"], Value::String("1".into()));

    // ½δ_1 + ½δ_7
    let out = run(&[
        "conv",
        "--spec",
        spec1.to_str().unwrap(),
        "--x",
        "3",
        "--y",
        "4",
    ]);
    let measure = stdout_json(&out);
    let entries = measure.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["point"][0], Value::from(1));
    assert_eq!(entries[1]["point"][0], Value::from(7));
    assert_eq!(entries[0]["re"], Value::String("1/2".into()));
}

#[test]
fn conv_dimension_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 2);
    let out = run(&[
        "conv",
        "--spec",
        spec.to_str().unwrap(),
        "--x",
        "1",
        "--y",
        "1,1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fourier_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let mu = write(
        dir.path(),
        "mu.json",
        r#"[ { "point": [0], "re": "1/2", "im": "0" },
             { "point": [2], "re": "1/2", "im": "0" } ]"#,
    );
    // ½T_0 + ½T_2 = z²
    let out = run(&[
        "fourier",
        "--spec",
        spec.to_str().unwrap(),
        "--measure",
        mu.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let poly = stdout_json(&out);
    assert_eq!(poly["terms"].as_array().unwrap().len(), 1);
    assert_eq!(poly["terms"][0]["alpha"][0], Value::from(2));
    assert_eq!(poly["terms"][0]["coeff"], Value::String("1".into()));

    let poly_path = write(dir.path(), "poly.json", &poly.to_string());
    let back = run(&[
        "fourier",
        "--spec",
        spec.to_str().unwrap(),
        "--invert",
        poly_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&back), 0);
    let measure = stdout_json(&back);
    let original: Value = serde_json::from_str(&fs::read_to_string(&mu).unwrap()).unwrap();
    assert_eq!(measure, original);
}

#[test]
fn check_eq_exponential_passes_and_sine_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 2);
    let out = run(&[
        "check-eq",
        "--spec",
        spec.to_str().unwrap(),
        "--kind",
        "exponential",
        "--lambda",
        "1/2,-3/7",
        "--box",
        "6",
    ]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["checked"], Value::from(49 * 49));

    // sine checked against a mismatched exponential must fail with a witness
    let out = run(&[
        "check-eq",
        "--spec",
        spec.to_str().unwrap(),
        "--kind",
        "sine",
        "--lambda",
        "1/2,2/7",
        "--coeffs",
        "1,0",
        "--m-lambda",
        "1/3,2/7",
        "--box",
        "6",
    ]);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(false));
    assert!(report["counterexample"].is_object());
}

#[test]
fn check_eq_moment_and_float_mode() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 2);
    let out = run(&[
        "check-eq",
        "--spec",
        spec.to_str().unwrap(),
        "--kind",
        "moment",
        "--lambda",
        "1/3,2/5",
        "--cap",
        "2,2",
        "--box",
        "5",
    ]);
    assert_eq!(code(&out), 0);

    let spec1 = cheb(dir.path(), 1);
    let out = run(&[
        "check-eq",
        "--spec",
        spec1.to_str().unwrap(),
        "--kind",
        "exponential",
        "--lambda",
        "0.7310582",
        "--mode",
        "float",
        "--box",
        "10",
    ]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn degree_of_a_sine_function_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let f = write(
        dir.path(),
        "sine.json",
        r#"[ { "coeff": "2", "alpha": [1], "lambda": ["3/5"] } ]"#,
    );
    let out = run(&[
        "degree",
        "--spec",
        spec.to_str().unwrap(),
        "--function",
        f.to_str().unwrap(),
        "--box",
        "8",
    ]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["degree"], Value::from(1));
    assert_eq!(report["found"], Value::Bool(true));
}

#[test]
fn synth_recovers_hidden_operator() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 2);
    let pdo = write(
        dir.path(),
        "pdo.json",
        r#"{ "dim": 2, "terms": [ { "alpha": [0,0], "coeff": "5" },
                                  { "alpha": [1,1], "coeff": "-2/3" },
                                  { "alpha": [2,0], "coeff": "7/4" } ] }"#,
    );
    let out = run(&[
        "synth",
        "--spec",
        spec.to_str().unwrap(),
        "--pdo",
        pdo.to_str().unwrap(),
        "--lambda",
        "2/7,-3/5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["residual"], Value::String("0".into()));
    assert_eq!(report["unique"], Value::Bool(true));
    assert_eq!(report["variety_dim"], Value::from(4));
    assert_eq!(report["sine_dim"], Value::from(2));
    assert_eq!(report["stable"], Value::Bool(true));
    // the coefficient of atom (1,1) is -2/3
    let atoms = report["atoms"].as_array().unwrap();
    let coeffs = report["coefficients"].as_array().unwrap();
    let idx = atoms
        .iter()
        .position(|a| a["alpha"] == serde_json::json!([1, 1]))
        .unwrap();
    assert_eq!(coeffs[idx], Value::String("-2/3".into()));
}

#[test]
fn synth_exponential_seed_is_single_atom() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let f = write(
        dir.path(),
        "exp.json",
        r#"[ { "coeff": "1", "alpha": [0], "lambda": ["4/11"] } ]"#,
    );
    let out = run(&[
        "synth",
        "--spec",
        spec.to_str().unwrap(),
        "--function",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["atoms"].as_array().unwrap().len(), 1);
    assert_eq!(report["coefficients"][0], Value::String("1".into()));
    assert_eq!(report["degree"], Value::from(0));
    assert_eq!(report["sine_dim"], Value::from(0));
}

#[test]
fn explicit_recurrence_spec_matches_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    // the same three-term rule as the preset, spelled out
    let rec = write(
        dir.path(),
        "rec.json",
        r#"{ "kind": "recurrence1d", "a": ["1"], "b": ["0"], "c": ["0"],
             "tail": { "a": "1/2", "b": "0", "c": "1/2", "from": 1 } }"#,
    );
    let preset = cheb(dir.path(), 1);
    let via_rec = run(&[
        "conv",
        "--spec",
        rec.to_str().unwrap(),
        "--x",
        "2",
        "--y",
        "5",
    ]);
    let via_preset = run(&[
        "conv",
        "--spec",
        preset.to_str().unwrap(),
        "--x",
        "2",
        "--y",
        "5",
    ]);
    assert_eq!(code(&via_rec), 0);
    assert_eq!(via_rec.stdout, via_preset.stdout);
}

#[test]
fn check_eq_degree_kind_certifies_a_moment_member() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let f = write(
        dir.path(),
        "f2.json",
        r#"[ { "coeff": "1", "alpha": [2], "lambda": ["2/7"] } ]"#,
    );
    let out = run(&[
        "check-eq",
        "--spec",
        spec.to_str().unwrap(),
        "--kind",
        "degree",
        "--function",
        f.to_str().unwrap(),
        "--lambda",
        "2/7",
        "--degree",
        "2",
        "--trials",
        "8",
        "--box",
        "6",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(true));
}

#[test]
fn product_spec_builds_and_convolves() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "prod.json",
        r#"{ "kind": "product", "factors": [
              { "kind": "chebyshev", "dim": 1 },
              { "kind": "chebyshev", "dim": 1 } ] }"#,
    );
    let out = run(&[
        "conv",
        "--spec",
        spec.to_str().unwrap(),
        "--x",
        "1,1",
        "--y",
        "1,1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 4);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cheb(dir.path(), 1);
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--box",
        "6",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all") && text.contains("pass"), "{text}");
    let report: Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
}

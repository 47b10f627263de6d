//! Golden-file and exit-code tests for the `ffv` binary.
//!
//! Set `FFV_BLESS=1` to rewrite the golden files from the current build.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ffv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffv")).args(args).output().expect("ffv runs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Drops the `wall_time_s` line, the only non-deterministic field.
fn without_wall_time(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_s\""))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn compare_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("FFV_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from the golden file");
}

fn gen_to(dir: &Path, file: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(file);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", out.to_str().unwrap()]);
    let o = ffv(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn check_report(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let mut full = vec!["check"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--report", report.to_str().unwrap()]);
    let o = ffv(&full);
    let text = std::fs::read_to_string(&report).unwrap_or_default();
    (o.status.code().unwrap(), text)
}

const CROSS: &[&str] = &["--dim", "3", "--blocks", "3", "--dims", "1,1,1", "--symbol", "adversarial", "--seed", "1"];
const RANDOM: &[&str] = &[
    "--dim", "4", "--blocks", "3", "--dims", "2,2,1", "--symbol", "random_C_holding", "--seed", "42",
    "--local-redundancy", "2",
];

#[test]
fn generated_instances_match_golden() {
    let dir = tempfile::tempdir().unwrap();
    for (file, args) in [("cross3.json", CROSS), ("random42.json", RANDOM)] {
        let a = std::fs::read_to_string(gen_to(dir.path(), "a.json", args)).unwrap();
        let b = std::fs::read_to_string(gen_to(dir.path(), "b.json", args)).unwrap();
        assert_eq!(a, b, "generation is not deterministic");
        compare_golden(file, &a);
    }
}

#[test]
fn instance_reports_match_golden() {
    let cross = golden("cross3.json");
    let (code, text) = check_report(&["--suite", "multipliers", "--compare-ar", cross.to_str().unwrap()]);
    assert_eq!(code, 0);
    compare_golden("cross3.multipliers.report.json", &without_wall_time(&text));

    let random = golden("random42.json");
    let (code, text) = check_report(&["--suite", "all", random.to_str().unwrap()]);
    assert_eq!(code, 0);
    compare_golden("random42.all.report.json", &without_wall_time(&text));
}

#[test]
fn random_reports_match_golden_and_repeat() {
    let args = ["--suite", "all", "--random", "6", "--seed", "11"];
    let (code, first) = check_report(&args);
    let (_, second) = check_report(&args);
    assert_eq!(code, 0);
    assert_eq!(without_wall_time(&first), without_wall_time(&second));
    compare_golden("random6.seed11.all.report.json", &without_wall_time(&first));
}

#[test]
fn report_has_required_fields() {
    let (_, text) = check_report(&["--suite", "schatten", "--random", "2", "--seed", "3"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "ffv1-report");
    assert_eq!(v["suite"], "schatten");
    assert_eq!(v["seed"], 3);
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "anchor", "residual", "tolerance", "verdict"] {
            assert!(c.get(key).is_some(), "check lacks {key}");
        }
        let pass = c["residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap();
        assert_eq!(pass, c["verdict"] == "pass");
    }
    for key in ["pass", "fail", "indeterminate"] {
        assert!(v["summary"].get(key).is_some());
    }
}

#[test]
fn report_goes_to_stdout_without_report_flag() {
    let o = ffv(&["check", "--suite", "duals", "--random", "1", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["fail"], 0);
}

#[test]
fn failing_checks_exit_one() {
    // No floating-point residual meets a zero-width tolerance.
    let (code, text) = check_report(&["--suite", "duals", "--random", "2", "--seed", "1", "--tol-eq", "1e-300"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["summary"]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn usage_and_io_errors_exit_two() {
    let missing = ["check", "--suite", "all", "/definitely/not/here.json"];
    let cases: Vec<&[&str]> = vec![
        &missing,
        &["check", "--suite", "nope", "--random", "1", "--seed", "1"],
        &["check", "--suite", "all"],
        &["check", "--suite", "all", "--random", "3"],
        &["check", "--suite", "all", "--random", "1", "--seed", "1", "--tol-eq", "-1"],
        &["explain", "unknown_check"],
        &["gen", "--dim", "3", "--blocks", "2", "--dims", "1,1", "--symbol", "identity", "--seed", "1", "-o", "/tmp/ffv_never.json"],
        &["gen", "--dim", "2", "--blocks", "2", "--dims", "1,1", "--symbol", "sideways", "--seed", "1", "-o", "/tmp/ffv_never.json"],
        &["gen", "--dim", "2", "--blocks", "3", "--dims", "1,1", "--symbol", "identity", "--seed", "1", "-o", "/tmp/ffv_never.json"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(ffv(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn invalid_instance_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema\": \"ffv0\"}").unwrap();
    assert_eq!(ffv(&["check", "--suite", "all", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn explain_prints_anchor_quotes() {
    for (name, anchor) in [
        ("parsa1257", "\"if and only if C(m,R) holds\""),
        ("qdagger", "\"unique operator-valued dual frame of\""),
    ] {
        let o = ffv(&["explain", name]);
        assert_eq!(o.status.code(), Some(0));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains(anchor), "{text}");
        assert!(text.contains("tolerance"));
    }
}

#[test]
fn identity_symbol_and_zero_dims() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_to(
        dir.path(),
        "id.json",
        &["--dim", "2", "--blocks", "3", "--dims", "1,0,2", "--symbol", "identity", "--seed", "9"],
    );
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema"], "ffv1");
    assert_eq!(v["w"]["weights"][1], 0.0);
    assert_eq!(v["v"]["weights"][1], 0.0);
    for m in v["symbol"]["m"].as_array().unwrap() {
        assert_eq!(m, &serde_json::json!([1.0, 0.0]));
    }
    let r0 = &v["symbol"]["r"][0];
    assert_eq!(r0, &serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]));
}

use std::process::{Command, Output};

use serde_json::Value;

fn qpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpl")).args(args).output().expect("spawn qpl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn matrix_example() {
    let o = qpl(&["matrix", "--kind", "II", "--m", "1", "--hbar", "1", "--a", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["matrix"]["M0"], serde_json::json!([["0", "0"], ["1", "0"]]));
    assert_eq!(v["matrix"]["M1"], serde_json::json!([["0", "-1/2"], ["0", "0"]]));
}

#[test]
fn verify_kz_example() {
    let o = qpl(&["verify-kz", "--case", "V", "--m", "0", "--b", "1", "--c", "1", "--hbar", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn phi_empty_product() {
    let o = qpl(&["phi", "--kind", "II", "--m", "0", "--t", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["coeffs"], serde_json::json!([[1.0, 0.0]]));
}

#[test]
fn failed_verification_exits_one() {
    let o = qpl(&["verify-kz", "--case", "IV", "--m", "1", "--b", "2/5", "--hbar", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["matrix", "--kind", "VII", "--m", "1"],
        &["matrix", "--kind", "II", "--m", "1", "--d", "3"],
        &["matrix", "--kind", "II", "--m", "one"],
        &["matrix", "--kind", "II", "--m", "1", "--b", "1/0"],
        &["phi", "--kind", "II", "--m", "1", "--t", "1", "--nodes", "4"],
        &["phi", "--kind", "II", "--m", "1", "--t", "zz"],
        &["integrate", "--kind", "II", "--m", "1", "--t0", "0", "--t1", "1", "--phi0", "1"],
    ] {
        let o = qpl(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn numerical_failures_exit_three() {
    let o = qpl(&["phi", "--kind", "III", "--m", "1", "--b", "3/10", "--t", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_qpl"))
        .args(["phi", "--kind", "II", "--m", "2", "--t", "1"])
        .env("QPL_EVAL_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn integrate_csv_header() {
    let o = qpl(&["integrate", "--kind", "II", "--m", "1", "--t0", "0", "--t1", "1", "--phi0", "1,0"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,re_phi0,im_phi0,re_phi1,im_phi1"));
    assert!(text.lines().count() > 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["residual", "--kind", "V", "--m", "2", "--b", "-1/2", "--c", "-1/2", "--t", "1"][..],
        &["det", "--kind", "VI", "--m", "2", "--b", "-7/2", "--c", "-1/2", "--d", "3/10", "--t", "-1"],
        &["integrate", "--kind", "II", "--m", "1", "--t0", "0", "--t1", "2", "--format", "json"],
    ] {
        let (x, y) = (qpl(args), qpl(args));
        assert_eq!(code(&x), 0, "{args:?}: {}", String::from_utf8_lossy(&x.stderr));
        assert_eq!(x.stdout, y.stdout);
    }
}

#[test]
fn malformed_input_never_panics() {
    for args in [
        &["matrix", "--kind", "II", "--m", "100000"][..],
        &["phi", "--kind", "VI", "--m", "1", "--t", "1"],
        &["phi", "--kind", "VI", "--m", "1", "--t", "0"],
        &["integrate", "--kind", "VI", "--m", "1", "--t0", "0.5", "--t1", "2", "--phi0", "1,0"],
        &["ortho", "--kind", "V", "--m", "1", "--n", "1", "--t", "1"],
        &["verify-symmetry", "--kind", "II", "--m", "1", "--hbar", "0"],
        &["moments", "--kind", "II", "--t", "1", "--nodes", "0"],
        &["phi", "--kind", "II", "--m", "1", "--t", "1", "--hbar", "1/3"],
    ] {
        let o = qpl(args);
        let stderr = String::from_utf8_lossy(&o.stderr);
        assert!(matches!(code(&o), 1..=3), "{args:?}: {stderr}");
        assert!(!stderr.contains("panicked"), "{args:?}: {stderr}");
    }
}

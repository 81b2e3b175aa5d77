use std::fs;

use csrk::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("csrk").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn audit_json_reports_order() {
    let (code, out, _) = call(&["audit", "--method", "parallel4", "--theta", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["algebraic_order"], 4);
    assert_eq!(v["energy_preserving"], true);
}

#[test]
fn spectrum_verdicts() {
    let (code, out, _) = call(&["spectrum", "--method", "parallel4", "--theta", "1/2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["real_distinct"], false);
    let (_, out, _) = call(&["spectrum", "--method", "parallel4", "--theta", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["real_distinct"], true);
}

#[test]
fn order_csv_lists_trees() {
    let (code, out, _) = call(&["order", "--method", "avf", "--max-order", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("tree,order,sigma,e,phi,defect"));
    assert_eq!(lines.count(), 1 + 1 + 2);
}

#[test]
fn integrate_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let args = [
        "integrate", "--method", "avf-collocation", "--s", "2", "--problem", "henon-heiles", "--h", "0.1", "--steps",
        "50", "--out", out_dir,
    ];
    let (code, stdout, _) = call(&args);
    assert_eq!(code, 0);
    assert!(stdout.contains("max_energy_drift="));
    let path = dir.path().join("henon-heiles_avf-collocation_0.1.csv");
    let first = fs::read(&path).unwrap();
    assert_eq!(call(&args).0, 0);
    assert_eq!(first, fs::read(&path).unwrap());
    assert!(dir.path().join("henon-heiles_avf-collocation_0.1.json").exists());
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 52);
}

#[test]
fn tableau_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"s": 1, "M": [[1, 1]]}"#).unwrap();
    let (code, out, _) = call(&["audit", "--tableau", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["algebraic_order"], 2);
}

#[test]
fn bench_drift_prints_json() {
    let (code, out, _) =
        call(&["bench", "--study", "drift", "--method", "avf", "--problem", "oscillator", "--h", "0.1", "--steps", "20"]);
    assert_eq!(code, 0);
    assert!(serde_json::from_str::<serde_json::Value>(&out).is_ok(), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["audit", "--method", "nope"][..],
        &["audit", "--method", "parallel4", "--theta", "0"][..],
        &["integrate", "--method", "avf", "--problem", "pendulum", "--h", "0.1"][..],
        &["frobnicate"][..],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn compute_errors_exit_one_with_json() {
    let (code, _, err) = call(&[
        "integrate", "--method", "avf-collocation", "--problem", "pendulum", "--h", "50", "--steps", "1", "--mode",
        "picard", "--out", "/tmp",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert!(v["error"].is_string() && v["message"].is_string());
}

use std::fs;
use std::process::{Command, Output};

fn renewal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renewal"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn oracle_prints_the_optimum() {
    let out = renewal(&["oracle", "--model", "file_active"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "optimal");
    assert!((v["theta_star"].as_f64().unwrap() - 1.9).abs() < 1e-9);
    assert_eq!(v["policy"].as_array().unwrap().len(), 9);

    let out = renewal(&["oracle", "--model", "file"]);
    assert!(stdout_json(&out)["theta_star"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn run_then_diagnose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let p = prefix.to_str().unwrap();
    let out = renewal(&[
        "run",
        "--model",
        "file_active",
        "--frames",
        "4000",
        "--V",
        "30",
        "--delta",
        "0.7",
        "--seed",
        "5",
        "--diagnostics",
        "--out",
        p,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout_json(&out);
    assert_eq!(summary["frames"], 4000);
    for suffix in [
        "summary.json",
        "records.csv",
        "diagnostics.csv",
        "hitting.json",
    ] {
        assert!(
            dir.path().join(format!("run.{suffix}")).exists(),
            "{suffix}"
        );
    }

    let records = format!("{p}.records.csv");
    let out = renewal(&[
        "diagnose",
        "--records",
        &records,
        "--eta",
        "0.3",
        "--B",
        "4.4817",
        "--xi",
        "1",
        "--model",
        "file_active",
        "--V",
        "30",
        "--out",
        &format!("{p}.again"),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["comparison_violations"], 0);
    assert_eq!(report["hitting"]["n_k"][0], 0);
    let first = fs::read(format!("{p}.diagnostics.csv")).unwrap();
    let second = fs::read(format!("{p}.again.diagnostics.csv")).unwrap();
    assert!(!first.is_empty());
    assert_eq!(String::from_utf8(second).unwrap().lines().count(), 4001);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(
        &cfg,
        r#"{"base": {"model": "file", "frames": 500, "seed": 3}, "V_list": [3, 30], "delta_list": [0.7], "replications": 2, "parallelism": 2}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = renewal(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);

    let to_stdout = renewal(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(String::from_utf8(to_stdout.stdout).unwrap(), text);
}

#[test]
fn exit_codes_separate_config_from_runtime_errors() {
    assert_eq!(
        renewal(&["run", "--V", "-1", "--frames", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        renewal(&["run", "--delta", "2", "--frames", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(renewal(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        renewal(&["oracle", "--model", "quantum"]).status.code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        renewal(&["sweep", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let missing = dir.path().join("missing.csv");
    assert_eq!(
        renewal(&["diagnose", "--records", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(renewal(&["--help"]).status.code(), Some(0));
}

use std::process::{Command, Output};

fn qcertlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcertlab")).args(args).output().expect("binary runs")
}

#[test]
fn mixedness_writes_reproducible_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &std::path::Path| {
        vec!["mixedness", "--d", "2", "--t", "2", "--eps", "0.6", "--trials", "50", "--seed", "11", "--out"]
            .into_iter()
            .map(String::from)
            .chain([dir.to_string_lossy().into_owned()])
            .collect::<Vec<_>>()
    };
    let run = |dir: &std::path::Path| {
        let v = args(dir);
        qcertlab(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let out = run(a.path());
    assert!(out.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&out.stderr));
    let seq = Command::new(env!("CARGO_BIN_EXE_qcertlab"))
        .arg("--sequential")
        .args(args(b.path()))
        .output()
        .unwrap();
    assert_eq!(seq.status.code(), out.status.code());
    for f in ["trials.csv", "trials.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["arms"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    assert_eq!(qcertlab(&["verify-moments", "--d", "2", "--t", "2"]).status.code(), Some(0));
    assert_eq!(qcertlab(&["verify", "--scope", "schurweyl", "--fault", "perturbed-projector"]).status.code(), Some(1));
    assert_eq!(qcertlab(&["mixedness", "--d", "2", "--t", "3", "--eps", "0.6"]).status.code(), Some(3));
    assert_eq!(qcertlab(&["no-such-command"]).status.code(), Some(3));
    let capped = Command::new(env!("CARGO_BIN_EXE_qcertlab"))
        .env("QCERTLAB_DIM_CAP", "8")
        .args(["verify-moments", "--d", "3", "--t", "2"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn run_accepts_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"protocol":"bow","d":2,"t":2,"eps":0.5,"n":40,"trials":20,"seed":3,"mode":"exact"}"#,
    )
    .unwrap();
    let out = qcertlab(&["run", "--config", cfg.to_str().unwrap()]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["protocol"], "bow");
    assert!(summary["arms"][0]["exact"].is_array());
}

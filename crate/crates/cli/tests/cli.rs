use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn guidecheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guidecheck")).args(args).output().expect("binary runs")
}

fn serve_args(guideline: &str) -> Vec<String> {
    [
        "analyze".to_string(),
        "--program".into(),
        fixture("serve.fj").display().to_string(),
        "--guideline".into(),
        fixture(guideline).display().to_string(),
        "--config".into(),
        fixture("serve.cfg").display().to_string(),
        "--entry".into(),
        "Server.serve".into(),
    ]
    .to_vec()
}

fn run(args: &[String]) -> Output {
    guidecheck(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn safety_passes_with_exit_zero() {
    let out = run(&serve_args("safety.gdl"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("verdict: pass"));
}

#[test]
fn liveness_fails_with_a_json_counterexample() {
    let mut args = serve_args("liveness.gdl");
    args.extend(["--report".into(), "json".into()]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["signatures"][0]["infinite"], "fail");
    let cx = &v["counterexamples"][0];
    assert!(cx["cycle"].as_array().unwrap().iter().any(|e| e == "access"));
}

#[test]
fn report_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("r{i}.json"));
        let mut args = serve_args("liveness.gdl");
        args.extend(["--report".into(), "json".into(), "--out".into(), path.display().to_string()]);
        assert_eq!(run(&args).status.code(), Some(1));
        texts.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn concrete_and_demand_modes_run() {
    let mut args = serve_args("safety.gdl");
    args.extend(["--mode".into(), "concrete".into(), "--demand-driven".into()]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("advisory"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gdl");
    std::fs::write(&bad, "alphabet: authcheck access log\nstates: q\ninitial: q\ntrans: q open q\n").unwrap();
    let out = guidecheck(&[
        "analyze",
        "--program",
        &fixture("serve.fj").display().to_string(),
        "--guideline",
        &bad.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let mut args = serve_args("safety.gdl");
    args[8] = "Server.missing".into();
    assert_eq!(run(&args).status.code(), Some(2));

    let out = guidecheck(&["analyze", "--program", "/nonexistent.fj", "--guideline", &fixture("safety.gdl").display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
}

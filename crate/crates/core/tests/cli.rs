use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use carebot::service::cli::run;

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/clinic").join(rel).display().to_string()
}

fn carebot(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("carebot").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn plan_prints_the_tree_and_writes_a_verifiable_policy() {
    let dir = tempfile::tempdir().unwrap();
    let policy = tmp(&dir, "policy.json");
    let (code, out, _) = carebot(&["plan", &data("domain.pddl"), &data("problem.pddl"), "--out", policy.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("class: strong-cyclic"));
    assert!(out.contains("(test-anxiety prepare)"));
    let (code, out, _) = carebot(&["verify", &data("domain.pddl"), &data("problem.pddl"), policy.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "strong-cyclic"));
}

#[test]
fn strong_request_on_clinic_is_unsolvable() {
    let (code, out, _) = carebot(&["plan", &data("domain.pddl"), &data("problem.pddl"), "--semantics", "strong"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.starts_with("unsolvable"));
}

#[test]
fn verify_rejects_a_broken_policy() {
    let dir = tempfile::tempdir().unwrap();
    let policy = tmp(&dir, "policy.json");
    carebot(&["plan", &data("domain.pddl"), &data("problem.pddl"), "--out", policy.to_str().unwrap()]);
    let text = std::fs::read_to_string(&policy).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut broken = doc.clone();
    broken["entries"] = serde_json::Value::Array(doc["entries"].as_array().unwrap()[..1].to_vec());
    std::fs::write(&policy, broken.to_string()).unwrap();
    let (code, out, _) = carebot(&["verify", &data("domain.pddl"), &data("problem.pddl"), policy.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "invalid");
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tmp(&dir, "bad.pddl");
    std::fs::write(&bad, "(define (domain x) (:action").unwrap();
    assert_eq!(carebot(&["plan", bad.to_str().unwrap(), &data("problem.pddl")]).0, 2);
    assert_eq!(carebot(&["plan", "/no/such/file", &data("problem.pddl")]).0, 2);
    assert_eq!(carebot(&["frobnicate"]).0, 2);
    assert_eq!(carebot(&["plan"]).0, 2);
    assert_eq!(carebot(&["plan", "a", "b", "--semantics", "weak"]).0, 2);
    assert_eq!(carebot(&["--help"]).0, 0);
}

#[test]
fn simulate_then_replay_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["nominal", "channel-drop", "contradiction"] {
        let log = tmp(&dir, &format!("{scenario}.jsonl"));
        let (code, out, _) = carebot(&[
            "simulate",
            &data(&format!("scenarios/{scenario}.json")),
            "--seed",
            "17",
            "--out",
            log.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("done"), "{out}");
        let (code, out, _) = carebot(&["replay", log.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("identical"));
    }
}

#[test]
fn replay_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let log = tmp(&dir, "run.jsonl");
    carebot(&["simulate", &data("scenarios/nominal.json"), "--out", log.to_str().unwrap()]);
    let text = std::fs::read_to_string(&log).unwrap();
    std::fs::write(&log, text.replacen("\"outcome\":0", "\"outcome\":1", 1)).unwrap();
    let (code, out, _) = carebot(&["replay", log.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("diverged at event"), "{out}");
}

#[test]
fn simulate_writes_the_log_to_stdout_by_default() {
    let (code, out, _) = carebot(&["simulate", &data("scenarios/nominal.json")]);
    assert_eq!(code, 0);
    let first = out.lines().next().unwrap();
    assert!(first.contains("\"kind\":\"session-start\""));
    assert!(out.lines().last().unwrap().contains("\"kind\":\"done\""));
}

fn spawn_serve(args: &[&str], port_env: Option<&str>) -> std::process::Child {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_carebot"));
    cmd.arg("serve").args(args).stdout(Stdio::piped()).stderr(Stdio::null());
    cmd.env_remove("PORT").env_remove("LOG_DIR");
    if let Some(p) = port_env {
        cmd.env("PORT", p);
    }
    cmd.spawn().unwrap()
}

#[test]
fn serve_flag_overrides_port_env() {
    let mut child = spawn_serve(&["--port", "0"], Some("not-a-port"));
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    assert!(line.starts_with("listening on 0.0.0.0:"), "{line}");
    let port: u16 = line.trim().rsplit(':').next().unwrap().parse().unwrap();
    assert_ne!(port, 0);
    let body = std::net::TcpStream::connect(("127.0.0.1", port)).map(|_| ());
    child.kill().unwrap();
    child.wait().unwrap();
    body.unwrap();

    let status = spawn_serve(&[], Some("not-a-port")).wait().unwrap();
    assert_eq!(status.code(), Some(2));
}

use std::sync::Arc;

use carebot::executive::{EventKind, ManualClock, Phase, Session, SessionSpec};
use carebot::State;
use carebot::service::{load_session, parse_log, read_log, FileSink, ServiceError};
use carebot::sim::{run_scenario, Scenario};

fn logged_run(path: &std::path::Path, seed: u64) -> Arc<Session> {
    let scenario = Scenario::nominal();
    let clock = Arc::new(ManualClock::new(0));
    let sink = FileSink::append(path).unwrap();
    let session = Session::start_with_sinks(scenario.spec().unwrap(), clock.clone(), vec![Box::new(sink)]).unwrap();
    run_scenario(&scenario, &session, &clock, seed).unwrap();
    session
}

fn state_at(text: &str) -> State {
    let events = parse_log(text).unwrap().events;
    let bits = events.iter().rev().find_map(|e| e.kind.state()).unwrap();
    State::from_bitstring(bits).unwrap()
}

#[test]
fn file_log_matches_in_memory_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let session = logged_run(&path, 5);
    let on_disk = read_log(&path).unwrap();
    assert!(!on_disk.torn_tail);
    assert_eq!(on_disk.events, session.events());
}

#[test]
fn empty_or_missing_log_starts_fresh() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["missing.jsonl", "empty.jsonl"] {
        let path = dir.path().join(name);
        if name == "empty.jsonl" {
            std::fs::write(&path, "").unwrap();
        }
        let rec = load_session(&path, &SessionSpec::clinic()).unwrap();
        assert_eq!(rec.session.events().len(), 1);
        let on_disk = read_log(&path).unwrap().events;
        assert!(matches!(on_disk[0].kind, EventKind::SessionStart { .. }));
    }
}

#[test]
fn torn_tail_is_dropped_and_state_restored() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    logged_run(&path, 9);
    let full = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = full.lines().collect();
    for cut in [3, lines.len() / 2, lines.len() - 1] {
        let kept: String = lines[..cut].iter().map(|l| format!("{l}\n")).collect();
        let torn = &lines[cut][..lines[cut].len() / 2];
        std::fs::write(&path, format!("{kept}{torn}")).unwrap();
        let rec = load_session(&path, &SessionSpec::clinic()).unwrap();
        assert!(rec.torn_tail);
        let events = rec.session.events();
        assert_eq!(events.len(), cut + rec.appended);
        assert_eq!(&events[..], &parse_log(&full).unwrap().events[..events.len()]);
        let after = read_log(&path).unwrap();
        assert_eq!(rec.session.current_state(), state_at(&std::fs::read_to_string(&path).unwrap()));
        assert!(!after.torn_tail);
        assert_eq!(after.events, rec.session.events());
        drop(rec);
        std::fs::write(&path, &full).unwrap();
    }
}

#[test]
fn unterminated_last_line_is_kept() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let session = logged_run(&path, 2);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.trim_end()).unwrap();
    let rec = load_session(&path, &SessionSpec::clinic()).unwrap();
    assert!(!rec.torn_tail);
    assert_eq!(rec.session.events(), session.events());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn corrupt_middle_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    logged_run(&path, 4);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[2] = "{not json".into();
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    match load_session(&path, &SessionSpec::clinic()) {
        Err(ServiceError::CorruptLog { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected corrupt log, got {:?}", other.map(|r| r.session.phase())),
    }
}

#[test]
fn tampered_log_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    logged_run(&path, 4);
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"outcome\":0", "\"outcome\":1", 1);
    assert_ne!(tampered, text);
    std::fs::write(&path, tampered).unwrap();
    assert!(matches!(load_session(&path, &SessionSpec::clinic()), Err(ServiceError::CorruptLog { .. })));
}

#[test]
fn recovered_session_runs_to_completion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    logged_run(&path, 6);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let kept: String = lines[..lines.len() / 2].iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, &kept).unwrap();
    let rec = load_session(&path, &SessionSpec::clinic()).unwrap();
    let mut scenario = Scenario::nominal();
    scenario.max_turns = 200;
    run_scenario(&scenario, &rec.session, &rec.clock, 6).unwrap();
    assert_eq!(rec.session.phase(), Phase::Done);
    let on_disk = read_log(&path).unwrap().events;
    assert_eq!(on_disk, rec.session.events());
    assert!(carebot::executive::replay(&on_disk).unwrap().identical());
}

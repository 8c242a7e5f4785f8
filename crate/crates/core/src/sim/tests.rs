use super::*;
use crate::bundled::{clinic_task, CHANNEL_DROP_SCENARIO, CONTRADICTION_SCENARIO};
use crate::executive::{estimate, AffectThresholds, AnxietyLevel, Channel, EventKind, Phase, Query};

fn action(task: &crate::pddl::GroundedTask, name: &str) -> crate::pddl::GroundAction {
    task.actions[task.action_by_name(name).unwrap()].clone()
}

fn kinds(events: &[crate::executive::Event]) -> Vec<&'static str> {
    events.iter().map(|e| e.kind.name()).collect()
}

#[test]
fn strong_distraction_lowers_high_anxiety() {
    let task = clinic_task();
    let mut p = Patient::new(PatientModel::default(), 1);
    p.anxiety = AnxietyLevel::High;
    p.simulate_step(&task, &action(&task, "(distract breathing prepare high)"), &[], 0).unwrap();
    assert_eq!(p.anxiety, AnxietyLevel::Medium);
}

#[test]
fn query_leaves_anxiety_unchanged() {
    let task = clinic_task();
    let q = vec![Query { fluent: "(okanxiety prepare)".into(), channel: Channel::Operator }];
    for level in AnxietyLevel::ALL {
        let mut p = Patient::new(PatientModel::default(), 2);
        p.anxiety = level;
        let (bundle, _) = p.simulate_step(&task, &action(&task, "(test-anxiety prepare)"), &q, 0).unwrap();
        assert_eq!(p.anxiety, level);
        assert_eq!(bundle.value_of("(okanxiety prepare)"), Some(level.is_ok()));
    }
}

#[test]
fn procedure_step_while_highly_anxious_sets_distress() {
    let task = clinic_task();
    let q = vec![Query { fluent: "(stepdone insertion)".into(), channel: Channel::Operator }];
    let mut p = Patient::new(PatientModel::default(), 3);
    p.anxiety = AnxietyLevel::High;
    let (bundle, _) = p
        .simulate_step(&task, &action(&task, "(advance-step insertion aftercare)"), &q, 0)
        .unwrap();
    assert_eq!(p.anxiety, AnxietyLevel::High);
    assert!(p.distress);
    assert_eq!(bundle.value_of("(distress)"), Some(true));
    assert_eq!(bundle.value_of("(stepdone insertion)"), Some(true));
}

#[test]
fn foreign_action_is_rejected() {
    let task = clinic_task();
    let mut a = action(&task, "(debrief aftercare)");
    a.args = vec!["nowhere".into()];
    let mut p = Patient::new(PatientModel::default(), 0);
    assert!(matches!(p.simulate_step(&task, &a, &[], 0), Err(SimError::UnknownAction(_))));
}

#[test]
fn signals_recover_the_internal_level() {
    let t = AffectThresholds::default();
    let mut hits = 0;
    let mut total = 0;
    for seed in 0..20 {
        let mut p = Patient::new(PatientModel::default(), seed);
        for level in AnxietyLevel::ALL {
            p.anxiety = level;
            for _ in 0..50 {
                total += 1;
                if estimate(&p.signals(), &t).anxiety == level {
                    hits += 1;
                }
            }
        }
    }
    assert!(hits as f64 >= 0.95 * total as f64, "{hits}/{total}");
}

#[test]
fn nominal_run_reaches_done() {
    let run = simulate(&Scenario::nominal(), None).unwrap();
    assert_eq!(run.session.phase(), Phase::Done);
    assert!(run.session.task().is_goal(&run.session.current_state()));
    let requests = kinds(&run.transcript).iter().filter(|k| **k == "action-request").count() as u64;
    assert_eq!(requests, run.session.turn());
    assert_eq!(kinds(&run.transcript).last(), Some(&"done"));
}

#[test]
fn same_seed_same_transcript() {
    let a = simulate(&Scenario::nominal(), Some(42)).unwrap();
    let b = simulate(&Scenario::nominal(), Some(42)).unwrap();
    assert_eq!(a.log_text(), b.log_text());
}

#[test]
fn channel_drop_times_out_and_still_finishes() {
    let s = Scenario::from_json(CHANNEL_DROP_SCENARIO).unwrap();
    let run = simulate(&s, None).unwrap();
    assert!(kinds(&run.transcript).contains(&"timeout-default"));
    assert_eq!(run.session.phase(), Phase::Done);
}

#[test]
fn contradiction_reconciles_and_replans() {
    let s = Scenario::from_json(CONTRADICTION_SCENARIO).unwrap();
    let run = simulate(&s, None).unwrap();
    let k = kinds(&run.transcript);
    let rec = k.iter().position(|k| *k == "reconcile").unwrap();
    let replan = k.iter().position(|k| *k == "replan").unwrap();
    assert!(rec < replan);
    assert_eq!(run.session.phase(), Phase::Done);
}

#[test]
fn goal_at_init_gives_single_done_event() {
    let mut s = Scenario::nominal();
    s.problem = Some(crate::bundled::CLINIC_PROBLEM.replace("(:init", "(:init (procdone)"));
    let run = simulate(&s, None).unwrap();
    assert_eq!(kinds(&run.transcript), vec!["done"]);
}

#[test]
fn mismatched_scenarios_are_rejected() {
    let mut s = Scenario::nominal();
    s.steps.push("surgery".into());
    assert!(matches!(simulate(&s, None), Err(SimError::ScenarioMismatch(_))));
    let mut s = Scenario::nominal();
    s.faults.push(FaultInjection {
        turns: Some(vec![s.max_turns]),
        fault: Fault::Delay { ms: 1 },
    });
    assert!(matches!(s.check(), Err(SimError::ScenarioMismatch(_))));
}

#[test]
fn scripted_run_uses_script_and_fails_when_it_runs_out() {
    let mut s = Scenario::nominal();
    s.script = Some(vec![ScriptedTurn {
        readings: vec![ScriptedReading { fluent: "(okanxiety prepare)".into(), value: false }],
        signals: None,
    }]);
    let err = simulate(&s, None).err().unwrap();
    assert!(matches!(err, SimError::ScenarioMismatch(_)));
}

#[test]
fn scenario_json_roundtrips() {
    for text in [crate::bundled::NOMINAL_SCENARIO, CHANNEL_DROP_SCENARIO, CONTRADICTION_SCENARIO] {
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
    let events = simulate(&Scenario::nominal(), None).unwrap().transcript;
    assert!(!events.iter().any(|e| matches!(e.kind, EventKind::SessionStart { .. })));
}

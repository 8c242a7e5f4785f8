use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::patient::{Patient, PatientModel};
use super::SimError;
use crate::executive::{
    Channel, Clock, Event, EventKind, ExecError, ManualClock, NextAction, ObservationBundle, Phase, Reading, Session,
    SessionConfig, SessionSpec, SimulatedSignals, Source,
};
use crate::pddl::load_task;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedReading {
    pub fluent: String,
    pub value: bool,
}

/// Readings (and optionally vision features) for one turn of a scripted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedTurn {
    #[serde(default)]
    pub readings: Vec<ScriptedReading>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signals: Option<SimulatedSignals>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fault {
    /// Readings from this channel never arrive.
    DropChannel { channel: Channel },
    /// Answers arrive `ms` later than usual.
    Delay { ms: u64 },
    /// The answer is replaced by these readings.
    Contradict { readings: Vec<ScriptedReading> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultInjection {
    /// Turns the fault applies to; absent means every turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turns: Option<Vec<u64>>,
    #[serde(flatten)]
    pub fault: Fault,
}

impl FaultInjection {
    fn applies(&self, turn: u64) -> bool {
        self.turns.as_ref().is_none_or(|ts| ts.contains(&turn))
    }
}

fn default_max_turns() -> u64 {
    100
}

fn default_response_ms() -> u64 {
    1_500
}

fn default_think_ms() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Stochastic patient; used when there is no script.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patient: Option<PatientModel>,
    /// One entry per turn, replacing the patient model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Vec<ScriptedTurn>>,
    /// Procedure steps, in order; each must be an object of the problem.
    #[serde(default)]
    pub steps: Vec<String>,
    #[serde(default)]
    pub faults: Vec<FaultInjection>,
    /// Scenario length in turns; the run is stopped when it is reached.
    #[serde(default = "default_max_turns")]
    pub max_turns: u64,
    /// Delay between an action request and its answer.
    #[serde(default = "default_response_ms")]
    pub response_ms: u64,
    /// Delay between the end of a turn and the next request.
    #[serde(default = "default_think_ms")]
    pub think_ms: u64,
    /// PDDL texts and config; the bundled clinic files when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SessionConfig>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn nominal() -> Self {
        Self::from_json(crate::bundled::NOMINAL_SCENARIO).expect("bundled scenario is valid")
    }

    pub fn spec(&self) -> Result<SessionSpec, SimError> {
        let clinic = SessionSpec::clinic();
        Ok(SessionSpec {
            domain: self.domain.clone().unwrap_or(clinic.domain),
            problem: self.problem.clone().unwrap_or(clinic.problem),
            config: self.config.clone().unwrap_or(clinic.config),
        })
    }

    /// Checks the scenario against its own task.
    pub fn check(&self) -> Result<(), SimError> {
        let spec = self.spec()?;
        let task = load_task(&spec.domain, &spec.problem).map_err(|e| SimError::Exec(e.into()))?;
        for s in &self.steps {
            if !task.fluents.iter().any(|a| a.args.iter().any(|x| x == s)) {
                return Err(SimError::ScenarioMismatch(format!("step `{s}` is not an object of the problem")));
            }
        }
        if self.script.is_none() {
            self.patient.clone().unwrap_or_default().check(&task)?;
        }
        for f in &self.faults {
            if let Some(t) = f.turns.as_ref().and_then(|ts| ts.iter().find(|&&t| t >= self.max_turns)) {
                return Err(SimError::ScenarioMismatch(format!(
                    "fault at turn {t} is outside the scenario length {}",
                    self.max_turns
                )));
            }
            if let Fault::Contradict { readings } = &f.fault {
                for r in readings {
                    if task.fluent_by_name(&r.fluent).is_none() {
                        return Err(SimError::ScenarioMismatch(format!("unknown fluent `{}`", r.fluent)));
                    }
                }
            }
        }
        for turn in self.script.iter().flatten() {
            for r in &turn.readings {
                if task.fluent_by_name(&r.fluent).is_none() {
                    return Err(SimError::ScenarioMismatch(format!("unknown fluent `{}`", r.fluent)));
                }
            }
        }
        Ok(())
    }
}

/// A finished simulated run.
pub struct SimRun {
    pub session: Arc<Session>,
    pub clock: Arc<ManualClock>,
    /// Every event after `session-start`.
    pub transcript: Vec<Event>,
}

impl SimRun {
    /// Full event log, `session-start` included, one JSON object per line.
    pub fn log_text(&self) -> String {
        let mut out = String::new();
        for e in self.session.events() {
            out.push_str(&e.to_line());
            out.push('\n');
        }
        out
    }
}

/// Starts a session for `scenario` on a manual clock and runs it to the end.
/// `seed` overrides the scenario's own seed.
pub fn simulate(scenario: &Scenario, seed: Option<u64>) -> Result<SimRun, SimError> {
    scenario.check()?;
    let clock = Arc::new(ManualClock::new(0));
    let session = Session::start(scenario.spec()?, clock.clone())?;
    let transcript = run_scenario(scenario, &session, &clock, seed.unwrap_or(scenario.seed))?;
    Ok(SimRun {
        session,
        clock,
        transcript,
    })
}

/// Drives `session` turn by turn with simulated answers and the scenario's
/// faults; returns the events logged after `session-start`.
pub fn run_scenario(scenario: &Scenario, session: &Session, clock: &ManualClock, seed: u64) -> Result<Vec<Event>, SimError> {
    let task = session.task().clone();
    let mut patient = Patient::new(scenario.patient.clone().unwrap_or_default(), seed);
    loop {
        let turn = session.turn();
        if turn >= scenario.max_turns {
            session.stop();
            break;
        }
        let request = match session.next_action() {
            Ok(NextAction::Done) => break,
            Ok(NextAction::Request(r)) => r,
            Err(ExecError::Stopped | ExecError::Unsolvable(_) | ExecError::TurnLimit(_)) => break,
            Err(e) => return Err(e.into()),
        };
        let action = &task.actions[request.action_id];
        let (mut bundle, signals) = match &scenario.script {
            Some(script) => {
                let Some(step) = script.get(turn as usize) else {
                    return Err(SimError::ScenarioMismatch(format!("script has no entry for turn {turn}")));
                };
                (scripted(session, &step.readings, clock.now_ms()), step.signals)
            }
            None => {
                let (b, s) = patient.simulate_step(&task, action, &request.queries, clock.now_ms())?;
                (b, Some(s))
            }
        };
        let mut latency = scenario.response_ms;
        let mut sensed_alive = true;
        let mut dropped = false;
        for f in scenario.faults.iter().filter(|f| f.applies(turn)) {
            match &f.fault {
                Fault::DropChannel { channel } => {
                    let before = bundle.readings.len();
                    bundle.readings.retain(|r| r.channel != *channel);
                    dropped |= bundle.readings.len() < before
                        || request.queries.iter().any(|q| q.channel == *channel);
                    if *channel == Channel::Sensed {
                        sensed_alive = false;
                    }
                }
                Fault::Delay { ms } => latency += ms,
                Fault::Contradict { readings } => bundle = scripted(session, readings, clock.now_ms()),
            }
        }
        let answer_at = clock.now_ms() + latency;
        let silent = dropped && bundle.readings.is_empty();
        if silent || answer_at > request.deadline {
            clock.set(request.deadline + 1);
            session.handle_timeout()?;
        } else {
            clock.set(answer_at);
            for r in &mut bundle.readings {
                r.t = answer_at;
            }
            if sensed_alive {
                if let Some(s) = signals {
                    session.estimate_affect(&s);
                }
            }
            let result = session.apply_outcome(bundle.clone())?;
            if result.phase == Phase::Reconciling {
                clock.advance(1);
                match session.reconcile(bundle) {
                    Ok(_) | Err(ExecError::NoApplicableRule(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        clock.advance(scenario.think_ms);
    }
    Ok(session
        .events()
        .into_iter()
        .filter(|e| !matches!(e.kind, EventKind::SessionStart { .. }))
        .collect())
}

fn scripted(session: &Session, readings: &[super::ScriptedReading], t: u64) -> ObservationBundle {
    let task = session.task();
    let mut bundle = ObservationBundle::new(Source::Simulator);
    for r in readings {
        let channel = task
            .fluent_by_name(&r.fluent)
            .map(|f| session.channels().label(f))
            .filter(|c| c.is_world())
            .unwrap_or(Channel::Operator);
        bundle.readings.push(Reading {
            fluent: r.fluent.clone(),
            value: r.value,
            channel,
            t,
        });
    }
    bundle
}

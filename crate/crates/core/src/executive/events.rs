//! Observation bundles, action requests and the append-only event log format.

use serde::{Deserialize, Serialize};

use super::affect::AffectiveState;
use super::config::{Channel, SessionConfig};
use crate::pddl::ActionGroup;
use crate::planner::SolutionClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    /// Ground atom, e.g. `(okanxiety prepare)`.
    pub fluent: String,
    pub value: bool,
    pub channel: Channel,
    /// Milliseconds on the session clock.
    pub t: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Operator,
    Simulator,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationBundle {
    pub readings: Vec<Reading>,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affect: Option<AffectiveState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ObservationBundle {
    pub fn new(source: Source) -> Self {
        ObservationBundle {
            readings: Vec::new(),
            source,
            affect: None,
            label: None,
        }
    }

    pub fn with(mut self, fluent: &str, value: bool, channel: Channel, t: u64) -> Self {
        self.readings.push(Reading {
            fluent: fluent.to_string(),
            value,
            channel,
            t,
        });
        self
    }

    pub fn with_affect(mut self, affect: AffectiveState) -> Self {
        self.affect = Some(affect);
        self
    }

    pub fn value_of(&self, fluent: &str) -> Option<bool> {
        self.readings.iter().find(|r| r.fluent == fluent).map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub fluent: String,
    pub value: bool,
}

/// A world-determined fluent the current action may change, and where its
/// value is expected to come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub fluent: String,
    pub channel: Channel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRequest {
    pub action: String,
    pub action_id: usize,
    pub group: ActionGroup,
    pub outcome_count: usize,
    /// Effects of each outcome, in outcome order.
    pub expected: Vec<Vec<Delta>>,
    pub queries: Vec<Query>,
    /// Milliseconds on the session clock.
    pub deadline: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Operator,
    Unsolvable,
    TurnLimit,
    NoApplicableRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    SessionStart {
        domain: String,
        problem: String,
        config: SessionConfig,
        policy_class: SolutionClass,
        policy_size: usize,
        state: String,
    },
    ActionRequest(ActionRequest),
    Observation {
        bundle: ObservationBundle,
    },
    OutcomeChosen {
        outcome: usize,
        score: usize,
        deltas: Vec<Delta>,
        state: String,
    },
    Reconcile {
        bundle: ObservationBundle,
        outcome: usize,
        deviations: Vec<String>,
        rules: Vec<String>,
        deltas: Vec<Delta>,
        state: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    TimeoutDefault {
        bundle: ObservationBundle,
    },
    Replan {
        state: String,
        ok: bool,
        entries: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Stop {
        reason: StopReason,
    },
    Done {
        state: String,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SessionStart { .. } => "session-start",
            EventKind::ActionRequest(_) => "action-request",
            EventKind::Observation { .. } => "observation",
            EventKind::OutcomeChosen { .. } => "outcome-chosen",
            EventKind::Reconcile { .. } => "reconcile",
            EventKind::TimeoutDefault { .. } => "timeout-default",
            EventKind::Replan { .. } => "replan",
            EventKind::Stop { .. } => "stop",
            EventKind::Done { .. } => "done",
        }
    }

    /// The state recorded by this event, if it records one.
    pub fn state(&self) -> Option<&str> {
        match self {
            EventKind::SessionStart { state, .. }
            | EventKind::OutcomeChosen { state, .. }
            | EventKind::Reconcile { state, .. }
            | EventKind::Done { state } => Some(state),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, EventKind::Stop { .. } | EventKind::Done { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub turn: u64,
    /// Milliseconds on the session clock.
    pub t: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    /// One JSON line, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Receives every event, in log order, while the session lock is held.
pub trait EventSink: Send {
    fn emit(&mut self, event: &Event, line: &str);
}

impl<F: FnMut(&Event, &str) + Send> EventSink for F {
    fn emit(&mut self, event: &Event, line: &str) {
        self(event, line)
    }
}

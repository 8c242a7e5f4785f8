//! The turn loop that runs a solved policy against the world.
//!
//! Each fluent is labelled with a channel: modelled fluents follow the
//! planning model, world-determined fluents (operator or sensed) are read
//! back after every action. Per turn the executive emits one action request,
//! then closes the turn with exactly one of: an observation matched to an
//! outcome, a reconciliation, a timeout default, or a stop.

mod affect;
mod clock;
mod config;
mod events;
mod replay;
mod session;

pub use affect::{estimate, AffectThresholds, AffectiveState, AnxietyLevel, Attention, Engagement, SimulatedSignals, EXPRESSIONS};
pub use clock::{Clock, ManualClock, SystemClock};
pub use config::{
    AffectConfig, Channel, ChannelMap, DefaultObservation, FluentChannels, GroupTimeout, ReadingTemplate,
    ReconciliationRule, RuleSpec, SessionConfig, TemplateValue,
};
pub use events::{
    ActionRequest, Delta, Event, EventKind, EventSink, ObservationBundle, Query, Reading, Source, StopReason,
};
pub use replay::{replay, Divergence, ReplayOutcome};
pub use session::{NextAction, Phase, Session, SessionSpec, Snapshot, StopAck, TurnResult};

use thiserror::Error;

use crate::pddl::PddlError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExecError {
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    #[error("session is stopped")]
    Stopped,
    #[error("wrong phase: expected {expected}, session is {actual}")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("{0} is modelled and cannot be observed")]
    ModelledReading(String),
    #[error("no reconciliation rule covers {0}")]
    NoApplicableRule(String),
    #[error("turn limit {0} reached")]
    TurnLimit(usize),
    #[error("replay: {0}")]
    Replay(String),
}

//! Re-executes a logged session against a fresh executive.

use std::sync::Arc;

use super::clock::ManualClock;
use super::events::{Event, EventKind, StopReason};
use super::session::{Phase, Session, SessionSpec};
use super::ExecError;

/// First logged event that the re-execution did not reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub index: usize,
    pub expected: String,
    pub actual: String,
}

pub struct ReplayOutcome {
    pub session: Arc<Session>,
    pub clock: Arc<ManualClock>,
    /// Logged events reproduced byte for byte.
    pub matched: usize,
    /// Events the re-execution produced past the end of the log (a call
    /// whose effects were only partly written before a crash).
    pub extra: Vec<Event>,
    pub divergence: Option<Divergence>,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.divergence.is_none() && self.extra.is_empty()
    }

    /// States recorded along the re-executed run.
    pub fn trajectory(&self) -> Vec<String> {
        self.session
            .events()
            .iter()
            .filter_map(|e| e.kind.state().map(str::to_string))
            .collect()
    }
}

/// Rebuilds the session from its `session-start` event, then drives it with
/// the inputs implied by each logged event at the logged clock time and
/// compares every regenerated event with the log.
pub fn replay(events: &[Event]) -> Result<ReplayOutcome, ExecError> {
    let first = events.first().ok_or_else(|| ExecError::Replay("empty log".into()))?;
    let EventKind::SessionStart {
        domain,
        problem,
        config,
        ..
    } = &first.kind
    else {
        return Err(ExecError::Replay("log does not begin with session-start".into()));
    };
    let clock = Arc::new(ManualClock::new(first.t));
    let spec = SessionSpec {
        domain: domain.clone(),
        problem: problem.clone(),
        config: config.clone(),
    };
    let session = Session::start(spec, clock.clone())?;
    let mut out = ReplayOutcome {
        session,
        clock,
        matched: 0,
        extra: Vec::new(),
        divergence: None,
    };
    let mut i = 0;
    while i < events.len() {
        let before = if i == 0 { 0 } else { out.session.snapshot().events };
        if i > 0 {
            let e = &events[i];
            out.clock.set(e.t);
            if let Err(message) = drive(&out.session, &e.kind) {
                out.divergence = Some(Divergence {
                    index: i,
                    expected: e.to_line(),
                    actual: message,
                });
                return Ok(out);
            }
        }
        let produced = out.session.events_since(before);
        if produced.is_empty() {
            out.divergence = Some(Divergence {
                index: i,
                expected: events[i].to_line(),
                actual: "no event produced".into(),
            });
            return Ok(out);
        }
        for (j, p) in produced.iter().enumerate() {
            match events.get(i + j) {
                Some(logged) => {
                    let (a, b) = (logged.to_line(), p.to_line());
                    if a != b {
                        out.divergence = Some(Divergence {
                            index: i + j,
                            expected: a,
                            actual: b,
                        });
                        return Ok(out);
                    }
                    out.matched += 1;
                }
                None => out.extra.push(p.clone()),
            }
        }
        i += produced.len();
    }
    Ok(out)
}

/// Issues the executive call that produced `kind`. Errors the call returns as
/// part of normal operation (a halt, for example) still log events and are
/// not divergences.
fn drive(session: &Session, kind: &EventKind) -> Result<(), String> {
    match kind {
        EventKind::ActionRequest(_)
        | EventKind::Replan { .. }
        | EventKind::Done { .. }
        | EventKind::Stop {
            reason: StopReason::Unsolvable | StopReason::TurnLimit,
        } => {
            let _ = session.next_action();
        }
        EventKind::Stop {
            reason: StopReason::Operator,
        } => {
            session.stop();
        }
        EventKind::Observation { bundle } => {
            let r = if session.phase() == Phase::AwaitingAction {
                session.seed_world(bundle.clone())
            } else {
                session.apply_outcome(bundle.clone()).map(|_| ())
            };
            r.map_err(|e| e.to_string())?;
        }
        EventKind::TimeoutDefault { bundle } => {
            session.apply_logged_default(bundle.clone()).map_err(|e| e.to_string())?;
        }
        EventKind::Reconcile { bundle, .. } => {
            let _ = session.reconcile(bundle.clone());
        }
        other => return Err(format!("`{}` is never the first event of a call", other.name())),
    }
    Ok(())
}

use std::fmt;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::affect::{estimate, AffectiveState, Engagement, SimulatedSignals};
use super::clock::Clock;
use super::config::{Channel, FluentChannels, Resolved, SessionConfig};
use super::events::{
    ActionRequest, Delta, Event, EventKind, EventSink, ObservationBundle, Query, Reading, Source, StopReason,
};
use super::ExecError;
use crate::pddl::{load_task, ActionId, GroundedTask};
use crate::planner::{solve_from, Policy};
use crate::state::{FluentId, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    AwaitingAction,
    AwaitingObservation,
    Reconciling,
    Stopped,
    Done,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Stopped | Phase::Done)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::AwaitingAction => "awaiting-action",
            Phase::AwaitingObservation => "awaiting-observation",
            Phase::Reconciling => "reconciling",
            Phase::Stopped => "stopped",
            Phase::Done => "done",
        })
    }
}

/// Domain text, problem text and config: everything needed to start (or
/// replay) a session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionSpec {
    pub domain: String,
    pub problem: String,
    pub config: SessionConfig,
}

impl SessionSpec {
    pub fn clinic() -> Self {
        SessionSpec {
            domain: crate::bundled::CLINIC_DOMAIN.to_string(),
            problem: crate::bundled::CLINIC_PROBLEM.to_string(),
            config: SessionConfig::from_json(crate::bundled::CLINIC_CONFIG).expect("bundled config is valid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextAction {
    Request(ActionRequest),
    /// The goal holds; no request is emitted.
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnResult {
    /// `None` when no outcome reached the consistency threshold.
    pub outcome: Option<usize>,
    pub score: usize,
    pub deltas: Vec<Delta>,
    pub phase: Phase,
    pub turn: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopAck {
    pub phase: Phase,
    pub turn: u64,
    /// The session was already stopped or done.
    pub already_terminal: bool,
}

/// Cheap view of the session for waiting and polling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Snapshot {
    pub phase: Phase,
    pub turn: u64,
    pub events: usize,
}

struct Pending {
    action: ActionId,
    request: ActionRequest,
    queried: Vec<FluentId>,
    /// Set while reconciling.
    observed: Option<Observed>,
}

#[derive(Clone)]
struct Observed {
    readings: Vec<(FluentId, bool)>,
    bundle: ObservationBundle,
}

struct Core {
    policy: Policy,
    current: State,
    affect: AffectiveState,
    turn: u64,
    phase: Phase,
    pending: Option<Pending>,
    sensed: Vec<(FluentId, bool)>,
    sensed_affect: Option<AffectiveState>,
    replanned_turn: Option<u64>,
    events: Vec<Event>,
    sinks: Vec<Box<dyn EventSink>>,
}

/// One executive session. All mutating entry points serialize on an internal
/// lock, so they may be called from any thread.
pub struct Session {
    spec: SessionSpec,
    task: Arc<GroundedTask>,
    resolved: Resolved,
    clock: Arc<dyn Clock>,
    core: Mutex<Core>,
    changed: Condvar,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.snapshot();
        f.debug_struct("Session")
            .field("phase", &s.phase)
            .field("turn", &s.turn)
            .finish()
    }
}

impl Session {
    pub fn start(spec: SessionSpec, clock: Arc<dyn Clock>) -> Result<Arc<Session>, ExecError> {
        Self::start_with_sinks(spec, clock, Vec::new())
    }

    /// Grounds and solves the task, then logs `session-start`. The session is
    /// left awaiting its first action at turn 0.
    pub fn start_with_sinks(
        spec: SessionSpec,
        clock: Arc<dyn Clock>,
        sinks: Vec<Box<dyn EventSink>>,
    ) -> Result<Arc<Session>, ExecError> {
        let task = load_task(&spec.domain, &spec.problem)?;
        let resolved = spec.config.resolve(&task)?;
        let policy = solve_from(&task, &task.init, &spec.config.solver()).map_err(|e| ExecError::Unsolvable(e.to_string()))?;
        let core = Core {
            current: task.init.clone(),
            affect: spec.config.affect.baseline,
            turn: 0,
            phase: Phase::AwaitingAction,
            pending: None,
            sensed: Vec::new(),
            sensed_affect: None,
            replanned_turn: None,
            events: Vec::new(),
            sinks,
            policy,
        };
        let session = Arc::new(Session {
            task: Arc::new(task),
            resolved,
            clock,
            core: Mutex::new(core),
            changed: Condvar::new(),
            spec,
        });
        {
            let now = session.clock.now_ms();
            let mut core = session.lock();
            let kind = EventKind::SessionStart {
                domain: session.spec.domain.clone(),
                problem: session.spec.problem.clone(),
                config: session.spec.config.clone(),
                policy_class: core.policy.class,
                policy_size: core.policy.len(),
                state: core.current.to_bitstring(),
            };
            session.emit(&mut core, now, kind);
        }
        Ok(session)
    }

    fn lock(&self) -> MutexGuard<'_, Core> {
        self.core.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn emit(&self, core: &mut Core, now: u64, kind: EventKind) {
        let event = Event {
            seq: core.events.len() as u64,
            turn: core.turn,
            t: now,
            kind,
        };
        let line = event.to_line();
        for sink in &mut core.sinks {
            sink.emit(&event, &line);
        }
        core.events.push(event);
        self.changed.notify_all();
    }

    pub fn task(&self) -> &Arc<GroundedTask> {
        &self.task
    }

    pub fn spec(&self) -> &SessionSpec {
        &self.spec
    }

    pub fn config(&self) -> &SessionConfig {
        &self.spec.config
    }

    pub fn channels(&self) -> &FluentChannels {
        &self.resolved.channels
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn snapshot(&self) -> Snapshot {
        let core = self.lock();
        Snapshot {
            phase: core.phase,
            turn: core.turn,
            events: core.events.len(),
        }
    }

    pub fn phase(&self) -> Phase {
        self.lock().phase
    }

    pub fn turn(&self) -> u64 {
        self.lock().turn
    }

    pub fn current_state(&self) -> State {
        self.lock().current.clone()
    }

    pub fn affect(&self) -> AffectiveState {
        self.lock().affect
    }

    pub fn policy(&self) -> Policy {
        self.lock().policy.clone()
    }

    pub fn pending_request(&self) -> Option<ActionRequest> {
        self.lock().pending.as_ref().map(|p| p.request.clone())
    }

    pub fn events(&self) -> Vec<Event> {
        self.lock().events.clone()
    }

    pub fn events_since(&self, from: usize) -> Vec<Event> {
        let core = self.lock();
        core.events.get(from..).map(<[Event]>::to_vec).unwrap_or_default()
    }

    pub fn add_sink(&self, sink: Box<dyn EventSink>) {
        self.lock().sinks.push(sink);
    }

    /// Blocks until `pred` holds or `timeout` passes; returns the last view.
    pub fn wait_until(&self, timeout: Duration, pred: impl Fn(&Snapshot) -> bool) -> Snapshot {
        let deadline = std::time::Instant::now() + timeout;
        let mut core = self.lock();
        loop {
            let snap = Snapshot {
                phase: core.phase,
                turn: core.turn,
                events: core.events.len(),
            };
            let now = std::time::Instant::now();
            if pred(&snap) || now >= deadline {
                return snap;
            }
            core = self
                .changed
                .wait_timeout(core, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }

    /// World-determined fluents and their channels, as requested before the
    /// first action.
    pub fn initial_queries(&self) -> Vec<Query> {
        self.resolved
            .channels
            .world_fluents()
            .map(|f| Query {
                fluent: self.task.fluent_name(f),
                channel: self.resolved.channels.label(f),
            })
            .collect()
    }

    /// Records initial world-fluent values (and affect) before the first
    /// action. Not a turn.
    pub fn seed_world(&self, obs: ObservationBundle) -> Result<(), ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        if core.phase != Phase::AwaitingAction || core.turn != 0 || core.events.len() != 1 {
            return Err(ExecError::WrongPhase {
                expected: Phase::AwaitingAction,
                actual: core.phase,
            });
        }
        let observed = self.resolve_bundle(&obs, now)?;
        for &(f, v) in &observed.readings {
            core.current.set(f, v);
        }
        if let Some(a) = observed.bundle.affect {
            core.affect = a;
        }
        self.emit(&mut core, now, EventKind::Observation { bundle: observed.bundle });
        Ok(())
    }

    /// Looks up (or replans for) the action at the current state and emits
    /// the turn's single action request.
    pub fn next_action(&self) -> Result<NextAction, ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        match core.phase {
            Phase::Stopped => return Err(ExecError::Stopped),
            Phase::Done => return Ok(NextAction::Done),
            Phase::AwaitingAction => {}
            other => {
                return Err(ExecError::WrongPhase {
                    expected: Phase::AwaitingAction,
                    actual: other,
                })
            }
        }
        if self.task.is_goal(&core.current) {
            core.phase = Phase::Done;
            let state = core.current.to_bitstring();
            self.emit(&mut core, now, EventKind::Done { state });
            return Ok(NextAction::Done);
        }
        if core.turn >= self.spec.config.max_turns as u64 {
            self.halt(&mut core, now, StopReason::TurnLimit);
            return Err(ExecError::TurnLimit(self.spec.config.max_turns));
        }
        let action = match core.policy.action_for(&core.current) {
            Some(a) => a,
            None => self.replan(&mut core, now)?,
        };
        let a = &self.task.actions[action];
        let queried: Vec<FluentId> = {
            let mut fs: Vec<FluentId> = a
                .outcomes
                .iter()
                .flat_map(|o| o.touched())
                .filter(|&f| self.resolved.channels.is_world(f))
                .collect();
            fs.sort_unstable();
            fs.dedup();
            fs
        };
        let timeout = &self.spec.config.timeouts[&a.group];
        let request = ActionRequest {
            action: a.name(),
            action_id: action,
            group: a.group,
            outcome_count: a.outcomes.len(),
            expected: a
                .outcomes
                .iter()
                .map(|o| {
                    o.add
                        .iter()
                        .map(|&f| (f, true))
                        .chain(o.del.iter().map(|&f| (f, false)))
                        .map(|(f, value)| Delta {
                            fluent: self.task.fluent_name(f),
                            value,
                        })
                        .collect()
                })
                .collect(),
            queries: queried
                .iter()
                .map(|&f| Query {
                    fluent: self.task.fluent_name(f),
                    channel: self.resolved.channels.label(f),
                })
                .collect(),
            deadline: now + timeout.millis(),
        };
        core.pending = Some(Pending {
            action,
            request: request.clone(),
            queried,
            observed: None,
        });
        core.phase = Phase::AwaitingObservation;
        self.emit(&mut core, now, EventKind::ActionRequest(request.clone()));
        Ok(NextAction::Request(request))
    }

    fn replan(&self, core: &mut Core, now: u64) -> Result<ActionId, ExecError> {
        let state = core.current.to_bitstring();
        if core.replanned_turn == Some(core.turn) {
            self.halt(core, now, StopReason::Unsolvable);
            return Err(ExecError::Unsolvable("state still unmapped after replanning this turn".into()));
        }
        core.replanned_turn = Some(core.turn);
        match solve_from(&self.task, &core.current, &self.spec.config.solver()) {
            Ok(fresh) => {
                let entries = fresh.len();
                core.policy.entries.extend(fresh.entries);
                self.emit(
                    core,
                    now,
                    EventKind::Replan {
                        state,
                        ok: true,
                        entries,
                        error: None,
                    },
                );
                match core.policy.action_for(&core.current) {
                    Some(a) => Ok(a),
                    None => {
                        self.halt(core, now, StopReason::Unsolvable);
                        Err(ExecError::Unsolvable("replanned policy does not cover the state".into()))
                    }
                }
            }
            Err(e) => {
                self.emit(
                    core,
                    now,
                    EventKind::Replan {
                        state,
                        ok: false,
                        entries: 0,
                        error: Some(e.to_string()),
                    },
                );
                self.halt(core, now, StopReason::Unsolvable);
                Err(ExecError::Unsolvable(e.to_string()))
            }
        }
    }

    /// Selects the outcome most consistent with `obs` and applies it.
    pub fn apply_outcome(&self, obs: ObservationBundle) -> Result<TurnResult, ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        self.expect_observation_phase(&core)?;
        let mut observed = self.resolve_bundle(&obs, now)?;
        self.merge_sensed(&mut core, &mut observed, now);
        self.emit(
            &mut core,
            now,
            EventKind::Observation {
                bundle: observed.bundle.clone(),
            },
        );
        Ok(self.choose(&mut core, now, observed))
    }

    /// Applies the group's default observation once the deadline has passed.
    /// Returns `None` when there is no overdue request.
    pub fn handle_timeout(&self) -> Result<Option<(ObservationBundle, TurnResult)>, ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        let Some(p) = core.pending.as_ref() else { return Ok(None) };
        if core.phase != Phase::AwaitingObservation || now <= p.request.deadline {
            return Ok(None);
        }
        let action = &self.task.actions[p.action];
        let template = &self.spec.config.timeouts[&action.group].default;
        let readings = template.populate(&self.task, action, &core.current, &core.affect, &p.queried);
        let mut bundle = ObservationBundle::new(Source::Default);
        bundle.label = (!template.label.is_empty()).then(|| template.label.clone());
        for (f, v) in readings {
            bundle.readings.push(Reading {
                fluent: self.task.fluent_name(f),
                value: v,
                channel: self.resolved.channels.label(f),
                t: now,
            });
        }
        let mut observed = self.resolve_bundle(&bundle, now)?;
        self.merge_sensed(&mut core, &mut observed, now);
        let bundle = observed.bundle.clone();
        self.emit(&mut core, now, EventKind::TimeoutDefault { bundle: bundle.clone() });
        let result = self.choose(&mut core, now, observed);
        Ok(Some((bundle, result)))
    }

    /// Replays a logged timeout default exactly as recorded.
    pub(crate) fn apply_logged_default(&self, bundle: ObservationBundle) -> Result<TurnResult, ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        self.expect_observation_phase(&core)?;
        let observed = self.resolve_bundle(&bundle, now)?;
        self.emit(
            &mut core,
            now,
            EventKind::TimeoutDefault {
                bundle: observed.bundle.clone(),
            },
        );
        Ok(self.choose(&mut core, now, observed))
    }

    fn expect_observation_phase(&self, core: &Core) -> Result<(), ExecError> {
        match core.phase {
            Phase::AwaitingObservation => Ok(()),
            Phase::Stopped => Err(ExecError::Stopped),
            other => Err(ExecError::WrongPhase {
                expected: Phase::AwaitingObservation,
                actual: other,
            }),
        }
    }

    /// Validates readings, keeps one per fluent (operator over sensed, then
    /// the later one) and orders them by fluent.
    fn resolve_bundle(&self, obs: &ObservationBundle, _now: u64) -> Result<Observed, ExecError> {
        let mut kept: Vec<(FluentId, Reading)> = Vec::new();
        for r in &obs.readings {
            let f = self
                .task
                .fluent_by_name(&r.fluent)
                .ok_or_else(|| ExecError::UnknownFluent(r.fluent.clone()))?;
            if !self.resolved.channels.is_world(f) || !r.channel.is_world() {
                return Err(ExecError::ModelledReading(self.task.fluent_name(f)));
            }
            let reading = Reading {
                fluent: self.task.fluent_name(f),
                ..r.clone()
            };
            match kept.iter_mut().find(|(g, _)| *g == f) {
                Some((_, old)) if old.channel == Channel::Operator && reading.channel != Channel::Operator => {}
                Some((_, old)) => *old = reading,
                None => kept.push((f, reading)),
            }
        }
        kept.sort_by_key(|(f, _)| *f);
        let readings = kept.iter().map(|(f, r)| (*f, r.value)).collect();
        let bundle = ObservationBundle {
            readings: kept.into_iter().map(|(_, r)| r).collect(),
            source: obs.source,
            affect: obs.affect.map(|a| AffectiveState::new(a.anxiety, a.engagement, a.valence, a.arousal)),
            label: obs.label.clone(),
        };
        Ok(Observed { readings, bundle })
    }

    /// Folds in readings left by `estimate_affect`; explicit readings win.
    fn merge_sensed(&self, core: &mut Core, observed: &mut Observed, now: u64) {
        let sensed = std::mem::take(&mut core.sensed);
        let sensed_affect = core.sensed_affect.take();
        if observed.bundle.affect.is_none() {
            observed.bundle.affect = sensed_affect;
        }
        let mut added = false;
        for (f, v) in sensed {
            if observed.readings.iter().any(|&(g, _)| g == f) {
                continue;
            }
            observed.readings.push((f, v));
            observed.bundle.readings.push(Reading {
                fluent: self.task.fluent_name(f),
                value: v,
                channel: Channel::Sensed,
                t: now,
            });
            added = true;
        }
        if added {
            let mut pairs: Vec<((FluentId, bool), Reading)> = observed
                .readings
                .iter()
                .copied()
                .zip(observed.bundle.readings.drain(..))
                .collect();
            pairs.sort_by_key(|((f, _), _)| *f);
            observed.readings = pairs.iter().map(|(p, _)| *p).collect();
            observed.bundle.readings = pairs.into_iter().map(|(_, r)| r).collect();
        }
    }

    /// World value outcome `k` predicts for `f` from `state`.
    fn predicted(&self, action: ActionId, k: usize, f: FluentId, state: &State) -> bool {
        self.task.actions[action].outcomes[k].effect_on(f).unwrap_or_else(|| state.get(f))
    }

    /// (best outcome, its score), lowest index on ties.
    fn best_outcome(&self, action: ActionId, state: &State, readings: &[(FluentId, bool)]) -> (usize, usize) {
        let mut best = (0, 0);
        for k in 0..self.task.actions[action].outcomes.len() {
            let score = readings
                .iter()
                .filter(|&&(f, v)| self.predicted(action, k, f, state) == v)
                .count();
            if score > best.1 {
                best = (k, score);
            }
        }
        best
    }

    /// Modelled effects of outcome `k` plus every observed world value.
    fn successor(&self, action: ActionId, k: usize, state: &State, readings: &[(FluentId, bool)]) -> State {
        let o = &self.task.actions[action].outcomes[k];
        let mut next = state.clone();
        for f in o.touched() {
            if !self.resolved.channels.is_world(f) {
                next.set(f, o.effect_on(f).unwrap_or(false));
            }
        }
        for &(f, v) in readings {
            next.set(f, v);
        }
        next
    }

    fn deltas(&self, before: &State, after: &State) -> Vec<Delta> {
        (0..before.len())
            .filter(|&f| before.get(f) != after.get(f))
            .map(|f| Delta {
                fluent: self.task.fluent_name(f),
                value: after.get(f),
            })
            .collect()
    }

    fn choose(&self, core: &mut Core, now: u64, observed: Observed) -> TurnResult {
        let action = core.pending.as_ref().expect("pending request").action;
        let (k, score) = self.best_outcome(action, &core.current, &observed.readings);
        if !observed.readings.is_empty() && score < self.spec.config.consistency_threshold {
            core.phase = Phase::Reconciling;
            core.pending.as_mut().expect("pending request").observed = Some(observed);
            self.changed.notify_all();
            return TurnResult {
                outcome: None,
                score,
                deltas: Vec::new(),
                phase: Phase::Reconciling,
                turn: core.turn,
            };
        }
        let next = self.successor(action, k, &core.current, &observed.readings);
        let deltas = self.deltas(&core.current, &next);
        core.current = next;
        if let Some(a) = observed.bundle.affect {
            core.affect = a;
        }
        self.finish_turn(core);
        let state = core.current.to_bitstring();
        self.emit(
            core,
            now,
            EventKind::OutcomeChosen {
                outcome: k,
                score,
                deltas: deltas.clone(),
                state,
            },
        );
        TurnResult {
            outcome: Some(k),
            score,
            deltas,
            phase: core.phase,
            turn: core.turn,
        }
    }

    fn finish_turn(&self, core: &mut Core) {
        core.pending = None;
        core.sensed.clear();
        core.sensed_affect = None;
        core.turn += 1;
        core.phase = Phase::AwaitingAction;
    }

    /// Overwrites world fluents from `obs` after the best-matching outcome's
    /// modelled effects, then restores modelled consistency with the
    /// configured rules. Halts with `NoApplicableRule` when readings deviate
    /// from the model and no rule covers them.
    pub fn reconcile(&self, obs: ObservationBundle) -> Result<State, ExecError> {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        match core.phase {
            Phase::Reconciling => {}
            Phase::Stopped => return Err(ExecError::Stopped),
            other => {
                return Err(ExecError::WrongPhase {
                    expected: Phase::Reconciling,
                    actual: other,
                })
            }
        }
        let observed = self.resolve_bundle(&obs, now)?;
        let action = core.pending.as_ref().expect("pending request").action;
        let before = core.current.clone();
        let (k, _) = self.best_outcome(action, &before, &observed.readings);
        let mut next = self.successor(action, k, &before, &observed.readings);
        let deviating: Vec<FluentId> = observed
            .readings
            .iter()
            .filter(|&&(f, v)| self.predicted(action, k, f, &before) != v)
            .map(|&(f, _)| f)
            .collect();
        let mut fired = Vec::new();
        if !deviating.is_empty() {
            let mut assigned: Vec<FluentId> = Vec::new();
            for rule in &self.resolved.rules {
                let applies = rule.guard.iter().all(|l| l.holds(&next))
                    && rule.guard.iter().any(|l| deviating.contains(&l.fluent));
                if !applies {
                    continue;
                }
                fired.push(rule.name.clone());
                for l in &rule.fixups {
                    if !assigned.contains(&l.fluent) {
                        next.set(l.fluent, l.value);
                        assigned.push(l.fluent);
                    }
                }
            }
        }
        let deviations: Vec<String> = deviating.iter().map(|&f| self.task.fluent_name(f)).collect();
        let error = (!deviating.is_empty() && fired.is_empty()).then(|| deviations.join(" "));
        if error.is_none() {
            if let Some(a) = observed.bundle.affect {
                core.affect = a;
            }
            core.current = next;
        }
        let deltas = self.deltas(&before, &core.current);
        self.finish_turn(&mut core);
        let state = core.current.to_bitstring();
        self.emit(
            &mut core,
            now,
            EventKind::Reconcile {
                bundle: observed.bundle,
                outcome: k,
                deviations,
                rules: fired,
                deltas,
                state,
                error: error.clone(),
            },
        );
        if let Some(e) = error {
            self.halt(&mut core, now, StopReason::NoApplicableRule);
            return Err(ExecError::NoApplicableRule(e));
        }
        Ok(core.current.clone())
    }

    /// Stops the session. A pending turn is closed without an outcome.
    pub fn stop(&self) -> StopAck {
        let now = self.clock.now_ms();
        let mut core = self.lock();
        if core.phase.is_terminal() {
            return StopAck {
                phase: core.phase,
                turn: core.turn,
                already_terminal: true,
            };
        }
        self.halt(&mut core, now, StopReason::Operator);
        StopAck {
            phase: core.phase,
            turn: core.turn,
            already_terminal: false,
        }
    }

    fn halt(&self, core: &mut Core, now: u64, reason: StopReason) {
        if core.pending.is_some() {
            core.pending = None;
            core.turn += 1;
        }
        core.sensed.clear();
        core.sensed_affect = None;
        core.phase = Phase::Stopped;
        self.emit(core, now, EventKind::Stop { reason });
    }

    /// Estimates affect from `signals` and stages the mirrored sensed
    /// fluents the pending request asked for; they join the next observation.
    pub fn estimate_affect(&self, signals: &SimulatedSignals) -> AffectiveState {
        let affect = estimate(signals, &self.spec.config.affect.thresholds);
        let mut core = self.lock();
        if core.phase.is_terminal() {
            return affect;
        }
        core.sensed_affect = Some(affect);
        let queried = core.pending.as_ref().map(|p| p.queried.clone()).unwrap_or_default();
        let mut staged = Vec::new();
        for &f in &self.resolved.anxiety_sensed {
            if queried.contains(&f) {
                staged.push((f, affect.anxiety.is_ok()));
            }
        }
        for &f in &self.resolved.engagement_sensed {
            if queried.contains(&f) {
                staged.push((f, affect.engagement == Engagement::High));
            }
        }
        core.sensed = staged;
        affect
    }

    /// Runs `handle_timeout` whenever a deadline passes, until the session
    /// stops or finishes. Only meaningful with a real-time clock.
    pub fn spawn_watchdog(self: &Arc<Self>) -> JoinHandle<()> {
        let session = Arc::clone(self);
        std::thread::spawn(move || loop {
            let wait = {
                let core = session.lock();
                if core.phase.is_terminal() {
                    return;
                }
                let now = session.clock.now_ms();
                match (&core.pending, core.phase) {
                    (Some(p), Phase::AwaitingObservation) if now > p.request.deadline => None,
                    (Some(p), Phase::AwaitingObservation) => Some(p.request.deadline + 1 - now),
                    _ => Some(50),
                }
            };
            match wait {
                None => {
                    if let Err(e) = session.handle_timeout() {
                        log::warn!("timeout handling failed: {e}");
                    }
                }
                Some(ms) => {
                    let core = session.lock();
                    let _ = session
                        .changed
                        .wait_timeout(core, Duration::from_millis(ms.min(50)))
                        .unwrap_or_else(|e| e.into_inner());
                }
            }
        })
    }
}

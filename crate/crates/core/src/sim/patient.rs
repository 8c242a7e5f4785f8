use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::executive::{
    AnxietyLevel, Attention, Channel, ObservationBundle, Query, Reading, SimulatedSignals, Source,
};
use crate::pddl::{ActionGroup, GroundAction, GroundedTask};

/// Anxiety moves by `delta` levels with probability `probability`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shift {
    pub delta: i32,
    pub probability: f64,
}

/// Effect of an action schema on anxiety, keyed by the binding of one of its
/// parameters (typically a strength level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityEffect {
    pub action: String,
    pub strength_param: String,
    pub by_strength: BTreeMap<String, Shift>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatientModel {
    pub baseline: AnxietyLevel,
    pub effects: Vec<ActivityEffect>,
    /// Shift applied when a procedure-update action completes the keyed step.
    pub procedure_stress: BTreeMap<String, Shift>,
    /// Parameter of procedure-update actions naming the step.
    pub step_param: String,
    /// Uniform jitter on expression probabilities and head speed.
    pub noise: f64,
    pub anxiety_predicate: String,
    pub engagement_fluent: String,
    pub distress_fluent: String,
}

impl Default for PatientModel {
    fn default() -> Self {
        let shift = |delta, probability| Shift { delta, probability };
        PatientModel {
            baseline: AnxietyLevel::Medium,
            effects: vec![
                ActivityEffect {
                    action: "distract".into(),
                    strength_param: "?x".into(),
                    by_strength: BTreeMap::from([("high".into(), shift(-1, 1.0)), ("low".into(), shift(-1, 0.6))]),
                },
                ActivityEffect {
                    action: "do-activity".into(),
                    strength_param: "?x".into(),
                    by_strength: BTreeMap::from([("high".into(), shift(-1, 0.5)), ("low".into(), shift(-1, 0.3))]),
                },
            ],
            procedure_stress: BTreeMap::from([
                ("prepare".into(), shift(1, 0.3)),
                ("insertion".into(), shift(1, 0.7)),
                ("aftercare".into(), shift(-1, 0.5)),
            ]),
            step_param: "?p".into(),
            noise: 0.05,
            anxiety_predicate: "okanxiety".into(),
            engagement_fluent: "(engaged)".into(),
            distress_fluent: "(distress)".into(),
        }
    }
}

impl PatientModel {
    pub(crate) fn check(&self, task: &GroundedTask) -> Result<(), SimError> {
        for e in &self.effects {
            let Some(a) = task.actions.iter().find(|a| a.schema == e.action) else {
                return Err(SimError::ScenarioMismatch(format!("patient model names unknown action `{}`", e.action)));
            };
            if !a.params.contains(&e.strength_param) {
                return Err(SimError::ScenarioMismatch(format!(
                    "`{}` has no parameter `{}`",
                    e.action, e.strength_param
                )));
            }
        }
        for f in [&self.engagement_fluent, &self.distress_fluent] {
            if task.fluent_by_name(f).is_none() {
                return Err(SimError::ScenarioMismatch(format!("patient model names unknown fluent `{f}`")));
            }
        }
        Ok(())
    }
}

/// A simulated child: the dynamics table plus its evolving state.
#[derive(Debug, Clone)]
pub struct Patient {
    pub model: PatientModel,
    pub anxiety: AnxietyLevel,
    pub distress: bool,
    rng: ChaCha8Rng,
}

impl Patient {
    pub fn new(model: PatientModel, seed: u64) -> Self {
        Patient {
            anxiety: model.baseline,
            distress: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
            model,
        }
    }

    pub fn engaged(&self) -> bool {
        self.anxiety.is_ok()
    }

    fn roll(&mut self, shift: Shift) {
        if self.rng.gen_bool(shift.probability.clamp(0.0, 1.0)) {
            self.anxiety = self.anxiety.shifted(shift.delta);
        }
    }

    /// Advances the patient through `action` and reports the world fluents in
    /// `queries`, plus the distress marker once it is set.
    pub fn simulate_step(
        &mut self,
        task: &GroundedTask,
        action: &GroundAction,
        queries: &[Query],
        t: u64,
    ) -> Result<(ObservationBundle, SimulatedSignals), SimError> {
        if task.actions.get(action.id).map(|a| a.name()) != Some(action.name()) {
            return Err(SimError::UnknownAction(action.name()));
        }
        let distress_before = self.distress;
        if action.group == ActionGroup::ProcedureUpdate {
            if self.anxiety == AnxietyLevel::High {
                self.distress = true;
            }
            let step = action.binding(&self.model.step_param).map(str::to_string);
            if let Some(shift) = step.and_then(|s| self.model.procedure_stress.get(&s).copied()) {
                // stress never calms a highly anxious child mid-procedure
                if !(self.anxiety == AnxietyLevel::High && shift.delta < 0) {
                    self.roll(shift);
                }
            }
        }
        let effect = self
            .model
            .effects
            .iter()
            .find(|e| e.action == action.schema)
            .and_then(|e| action.binding(&e.strength_param).and_then(|s| e.by_strength.get(s)))
            .copied();
        if let Some(shift) = effect {
            self.roll(shift);
        }

        let mut bundle = ObservationBundle::new(Source::Simulator);
        for q in queries {
            let value = if q.fluent == self.model.engagement_fluent {
                self.engaged()
            } else if q.fluent == self.model.distress_fluent {
                self.distress
            } else if predicate_of(&q.fluent) == self.model.anxiety_predicate {
                self.anxiety.is_ok()
            } else {
                // everything else happens the way the model predicts
                let Some(f) = task.fluent_by_name(&q.fluent) else {
                    return Err(SimError::ScenarioMismatch(format!("unknown fluent {}", q.fluent)));
                };
                action.outcomes.iter().find_map(|o| o.effect_on(f)).unwrap_or(false)
            };
            bundle.readings.push(Reading {
                fluent: q.fluent.clone(),
                value,
                channel: q.channel,
                t,
            });
        }
        if self.distress && !distress_before && !queries.iter().any(|q| q.fluent == self.model.distress_fluent) {
            bundle.readings.push(Reading {
                fluent: self.model.distress_fluent.clone(),
                value: true,
                channel: Channel::Sensed,
                t,
            });
        }
        let signals = self.signals();
        Ok((bundle, signals))
    }

    /// Vision features consistent with the current anxiety level.
    pub fn signals(&mut self) -> SimulatedSignals {
        // happiness, sadness, fear, anger, surprise, neutral
        let (proto, attention, speed) = match self.anxiety {
            AnxietyLevel::Low => ([0.50, 0.02, 0.03, 0.0, 0.05, 0.40], Attention::OnRobot, 0.3),
            AnxietyLevel::Medium => ([0.10, 0.12, 0.25, 0.0, 0.08, 0.45], Attention::OnRobot, 0.6),
            AnxietyLevel::High => ([0.02, 0.15, 0.55, 0.08, 0.05, 0.15], Attention::OnProcedure, 1.4),
        };
        let n = self.model.noise.abs();
        let mut expression = [0.0; 6];
        for (e, p) in expression.iter_mut().zip(proto) {
            let jitter = if n > 0.0 { self.rng.gen_range(-n..=n) } else { 0.0 };
            *e = (p + jitter).max(0.0);
        }
        let total: f64 = expression.iter().sum();
        for e in &mut expression {
            *e /= total;
        }
        let jitter = if n > 0.0 { self.rng.gen_range(-n..=n) } else { 0.0 };
        SimulatedSignals {
            expression,
            attention,
            head_speed: (speed * (1.0 + jitter)).max(0.0),
        }
    }
}

fn predicate_of(fluent: &str) -> &str {
    fluent
        .trim_start_matches('(')
        .split(|c: char| c.is_whitespace() || c == ')')
        .next()
        .unwrap_or("")
}

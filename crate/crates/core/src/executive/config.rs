//! Session configuration (JSON) and its resolution against a grounded task.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::affect::{AffectThresholds, AnxietyLevel, AffectiveState};
use super::ExecError;
use crate::pddl::{parse_ground_literal, ActionGroup, GroundAction, GroundedTask, Lit};
use crate::planner::{Semantics, SolverConfig};
use crate::state::{FluentId, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Updated only by the planning model and reconciliation rules.
    Modelled,
    /// Answered by the operator through the console.
    #[serde(alias = "operator-provided")]
    Operator,
    /// Filled in from sensing (affect estimation or the simulator).
    Sensed,
}

impl Channel {
    pub fn is_world(self) -> bool {
        self != Channel::Modelled
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Modelled => "modelled",
            Channel::Operator => "operator",
            Channel::Sensed => "sensed",
        })
    }
}

/// Channel labels by fluent, by predicate, then a fallback. The most specific
/// match wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ChannelMap {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Channel>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub predicates: BTreeMap<String, Channel>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fluents: BTreeMap<String, Channel>,
}

/// Resolved per-fluent labels; fixed for the life of a session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentChannels {
    labels: Vec<Channel>,
}

impl FluentChannels {
    pub fn resolve(task: &GroundedTask, map: &ChannelMap) -> Result<Self, ExecError> {
        for p in map.predicates.keys() {
            if !task.fluents.iter().any(|a| &a.predicate == p) {
                return Err(ExecError::BadConfig(format!("channel map names unknown predicate `{p}`")));
            }
        }
        let mut by_fluent: BTreeMap<FluentId, Channel> = BTreeMap::new();
        for (name, &ch) in &map.fluents {
            let f = task
                .fluent_by_name(name)
                .ok_or_else(|| ExecError::BadConfig(format!("channel map names unknown fluent `{name}`")))?;
            by_fluent.insert(f, ch);
        }
        let labels = task
            .fluents
            .iter()
            .enumerate()
            .map(|(f, atom)| {
                by_fluent
                    .get(&f)
                    .or_else(|| map.predicates.get(&atom.predicate))
                    .copied()
                    .or(map.default)
                    .ok_or_else(|| ExecError::BadConfig(format!("fluent {atom} has no channel label")))
            })
            .collect::<Result<_, _>>()?;
        Ok(FluentChannels { labels })
    }

    pub fn all_modelled(n: usize) -> Self {
        FluentChannels {
            labels: vec![Channel::Modelled; n],
        }
    }

    pub fn label(&self, f: FluentId) -> Channel {
        self.labels[f]
    }

    pub fn is_world(&self, f: FluentId) -> bool {
        self.labels[f].is_world()
    }

    pub fn world_fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        (0..self.labels.len()).filter(|&f| self.is_world(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateValue {
    True,
    False,
    /// Keep the fluent's current value.
    Current,
    /// True unless the session's current anxiety is high.
    AnxietyOk,
}

/// One default reading; `?name` placeholders are replaced by the action's
/// binding for that parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadingTemplate {
    pub fluent: String,
    pub value: TemplateValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DefaultObservation {
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub readings: Vec<ReadingTemplate>,
}

impl DefaultObservation {
    /// Ground (fluent, value) pairs for `action`. Templates whose placeholders
    /// the action does not bind, or whose fluent is not in `wanted`, are skipped.
    pub(crate) fn populate(
        &self,
        task: &GroundedTask,
        action: &GroundAction,
        state: &State,
        affect: &AffectiveState,
        wanted: &[FluentId],
    ) -> Vec<(FluentId, bool)> {
        let mut out = Vec::new();
        for t in &self.readings {
            let Some(name) = substitute(&t.fluent, action) else { continue };
            let Some(f) = task.fluent_by_name(&name) else { continue };
            if !wanted.contains(&f) || out.iter().any(|&(g, _)| g == f) {
                continue;
            }
            let value = match t.value {
                TemplateValue::True => true,
                TemplateValue::False => false,
                TemplateValue::Current => state.get(f),
                TemplateValue::AnxietyOk => affect.anxiety.is_ok(),
            };
            out.push((f, value));
        }
        out
    }
}

fn substitute(template: &str, action: &GroundAction) -> Option<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(i) = rest.find('?') {
        out.push_str(&rest[..i]);
        let tail = &rest[i..];
        let end = tail
            .find(|c: char| c.is_whitespace() || c == ')' || c == '(')
            .unwrap_or(tail.len());
        out.push_str(action.binding(&tail[..end].to_ascii_lowercase())?);
        rest = &tail[end..];
    }
    out.push_str(rest);
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTimeout {
    pub seconds: f64,
    #[serde(default)]
    pub default: DefaultObservation,
}

impl GroupTimeout {
    pub fn millis(&self) -> u64 {
        (self.seconds * 1000.0).ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub name: String,
    /// Ground literals over world fluents, all of which must hold.
    pub guard: Vec<String>,
    /// Ground literals over modelled fluents.
    pub fixups: Vec<String>,
    pub priority: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconciliationRule {
    pub name: String,
    pub guard: Vec<Lit>,
    pub fixups: Vec<Lit>,
    pub priority: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AffectConfig {
    pub thresholds: AffectThresholds,
    pub baseline: AffectiveState,
    /// Boolean predicate that mirrors "anxiety is acceptable".
    pub anxiety_predicate: String,
    pub engagement_predicate: String,
}

impl Default for AffectConfig {
    fn default() -> Self {
        AffectConfig {
            thresholds: AffectThresholds::default(),
            baseline: AffectiveState {
                anxiety: AnxietyLevel::Medium,
                ..Default::default()
            },
            anxiety_predicate: "okanxiety".into(),
            engagement_predicate: "engaged".into(),
        }
    }
}

fn default_max_expansions() -> usize {
    SolverConfig::default().max_expansions
}

fn default_max_turns() -> usize {
    500
}

fn default_threshold() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub semantics: Semantics,
    #[serde(default = "default_max_expansions")]
    pub max_expansions: usize,
    pub channels: ChannelMap,
    pub timeouts: BTreeMap<ActionGroup, GroupTimeout>,
    #[serde(default)]
    pub rules: Vec<RuleSpec>,
    #[serde(default)]
    pub affect: AffectConfig,
    /// The session halts with reason `turn-limit` after this many turns.
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
    /// Minimum number of agreeing readings for an outcome to be accepted
    /// when anything was observed.
    #[serde(default = "default_threshold")]
    pub consistency_threshold: usize,
}

impl SessionConfig {
    pub fn from_json(text: &str) -> Result<Self, ExecError> {
        serde_json::from_str(text).map_err(|e| ExecError::BadConfig(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ExecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExecError::BadConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Every fluent modelled, every group with a `seconds` timeout and an
    /// empty default.
    pub fn autonomous(seconds: f64) -> Self {
        SessionConfig {
            semantics: Semantics::StrongCyclic,
            max_expansions: default_max_expansions(),
            channels: ChannelMap {
                default: Some(Channel::Modelled),
                ..Default::default()
            },
            timeouts: ActionGroup::ALL
                .into_iter()
                .map(|g| {
                    (
                        g,
                        GroupTimeout {
                            seconds,
                            default: DefaultObservation::default(),
                        },
                    )
                })
                .collect(),
            rules: Vec::new(),
            affect: AffectConfig::default(),
            max_turns: default_max_turns(),
            consistency_threshold: default_threshold(),
        }
    }

    /// Multiplies every timeout by `factor`.
    pub fn scale_timeouts(&mut self, factor: f64) {
        for t in self.timeouts.values_mut() {
            t.seconds *= factor;
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            semantics: self.semantics,
            max_expansions: self.max_expansions,
        }
    }

    pub fn max_timeout_ms(&self) -> u64 {
        self.timeouts.values().map(GroupTimeout::millis).max().unwrap_or(0)
    }

    pub(crate) fn resolve(&self, task: &GroundedTask) -> Result<Resolved, ExecError> {
        let channels = FluentChannels::resolve(task, &self.channels)?;
        for g in ActionGroup::ALL {
            match self.timeouts.get(&g) {
                None => return Err(ExecError::BadConfig(format!("no timeout entry for group `{g}`"))),
                Some(t) if !(t.seconds > 0.0 && t.seconds.is_finite()) => {
                    return Err(ExecError::BadConfig(format!("timeout for `{g}` must be positive")))
                }
                Some(t) => {
                    for r in &t.default.readings {
                        let lit = parse_ground_literal(&r.fluent)
                            .map_err(|e| ExecError::BadConfig(format!("default reading `{}`: {e}", r.fluent)))?;
                        if !task.fluents.iter().any(|a| a.predicate == lit.atom.predicate) {
                            return Err(ExecError::BadConfig(format!(
                                "default reading names unknown predicate `{}`",
                                lit.atom.predicate
                            )));
                        }
                    }
                }
            }
        }
        let mut rules = Vec::new();
        for spec in &self.rules {
            let lits = |texts: &[String], world: bool| -> Result<Vec<Lit>, ExecError> {
                texts
                    .iter()
                    .map(|t| {
                        let lit = parse_ground_literal(t)
                            .map_err(|e| ExecError::BadConfig(format!("rule `{}`: {e}", spec.name)))?;
                        let f = task.fluent_id(&lit.atom).ok_or_else(|| {
                            ExecError::BadConfig(format!("rule `{}` names unknown fluent {}", spec.name, lit.atom))
                        })?;
                        if channels.is_world(f) != world {
                            let want = if world { "world-determined" } else { "modelled" };
                            return Err(ExecError::BadConfig(format!(
                                "rule `{}`: {} is not {want}",
                                spec.name, lit.atom
                            )));
                        }
                        Ok(Lit {
                            fluent: f,
                            value: lit.positive,
                        })
                    })
                    .collect()
            };
            rules.push(ReconciliationRule {
                name: spec.name.clone(),
                guard: lits(&spec.guard, true)?,
                fixups: lits(&spec.fixups, false)?,
                priority: spec.priority,
            });
        }
        rules.sort_by_key(|r| std::cmp::Reverse(r.priority));
        if rules.windows(2).any(|w| w[0].priority == w[1].priority) {
            return Err(ExecError::BadConfig("rule priorities must be distinct".into()));
        }
        let mirror = |pred: &str| -> Vec<FluentId> {
            task.fluents
                .iter()
                .enumerate()
                .filter(|(f, a)| a.predicate == pred && channels.label(*f) == Channel::Sensed)
                .map(|(f, _)| f)
                .collect()
        };
        Ok(Resolved {
            anxiety_sensed: mirror(&self.affect.anxiety_predicate),
            engagement_sensed: mirror(&self.affect.engagement_predicate),
            channels,
            rules,
        })
    }
}

/// A config checked against a task.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub channels: FluentChannels,
    /// Descending priority.
    pub rules: Vec<ReconciliationRule>,
    /// Sensed fluents written by affect estimation.
    pub anxiety_sensed: Vec<FluentId>,
    pub engagement_sensed: Vec<FluentId>,
}

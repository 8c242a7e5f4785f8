//! JSON form of a policy: `{fluent_order, entries: [{state, action}], class}`.

use serde::{Deserialize, Serialize};

use super::{PlanError, Policy, SolutionClass};
use crate::pddl::GroundedTask;
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyEntry {
    /// One `0`/`1` per fluent in `fluent_order`.
    pub state: String,
    /// Ground action name and binding, e.g. `(test-anxiety prepare)`.
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub fluent_order: Vec<String>,
    pub entries: Vec<PolicyEntry>,
    pub class: SolutionClass,
}

impl PolicyDocument {
    pub fn from_policy(task: &GroundedTask, policy: &Policy) -> Self {
        PolicyDocument {
            fluent_order: task.fluent_order(),
            entries: policy
                .entries
                .iter()
                .map(|(s, &a)| PolicyEntry {
                    state: s.to_bitstring(),
                    action: task.actions[a].name(),
                })
                .collect(),
            class: policy.class,
        }
    }

    /// Resolves entries against `task`. The fluent order must match exactly.
    pub fn to_policy(&self, task: &GroundedTask) -> Result<Policy, PlanError> {
        if self.fluent_order != task.fluent_order() {
            return Err(PlanError::BadPolicy("fluent order does not match the task".into()));
        }
        let mut policy = Policy::empty();
        policy.class = self.class;
        for e in &self.entries {
            let state = State::from_bitstring(&e.state)
                .filter(|s| s.len() == task.fluents.len())
                .ok_or_else(|| PlanError::BadPolicy(format!("bad state bitstring `{}`", e.state)))?;
            let action = task
                .action_by_name(&e.action)
                .ok_or_else(|| PlanError::BadPolicy(format!("unknown action `{}`", e.action)))?;
            policy.entries.insert(state, action);
        }
        Ok(policy)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("policy serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PlanError> {
        serde_json::from_str(text).map_err(|e| PlanError::BadPolicy(e.to_string()))
    }
}

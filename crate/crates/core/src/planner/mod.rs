//! FOND planning: all-outcomes determinization, policy synthesis by
//! incremental replanning, an independent policy verifier and branched-plan
//! unfolding.

mod determinize;
mod io;
mod search;
mod solve;
mod unfold;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::ActionId;
use crate::state::State;

pub use determinize::{determinize, OutcomeTag};
pub use io::{PolicyDocument, PolicyEntry};
pub use search::weak_plan;
pub use solve::{solve, solve_from, SolverConfig};
pub use unfold::{unfold, BranchedPlan, PlanEdge, PlanNode, PlanNodeKind};
pub use verify::verify_policy;

/// Solution quality of a policy, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionClass {
    Invalid,
    Weak,
    StrongCyclic,
    Strong,
}

impl SolutionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SolutionClass::Invalid => "invalid",
            SolutionClass::Weak => "weak",
            SolutionClass::StrongCyclic => "strong-cyclic",
            SolutionClass::Strong => "strong",
        }
    }

    /// `true` if a policy of this class also satisfies `required`.
    pub fn satisfies(self, required: SolutionClass) -> bool {
        self >= required
    }
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolutionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "invalid" => Ok(SolutionClass::Invalid),
            "weak" => Ok(SolutionClass::Weak),
            "strong-cyclic" => Ok(SolutionClass::StrongCyclic),
            "strong" => Ok(SolutionClass::Strong),
            other => Err(format!("unknown solution class `{other}`")),
        }
    }
}

/// Solution semantics a caller can request from [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    Strong,
    #[default]
    StrongCyclic,
}

impl Semantics {
    pub fn class(self) -> SolutionClass {
        match self {
            Semantics::Strong => SolutionClass::Strong,
            Semantics::StrongCyclic => SolutionClass::StrongCyclic,
        }
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Semantics::Strong),
            "strong-cyclic" => Ok(Semantics::StrongCyclic),
            other => Err(format!("unknown semantics `{other}` (expected strong or strong-cyclic)")),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class().as_str())
    }
}

/// State-to-action mapping. Goal states are never mapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub entries: BTreeMap<State, ActionId>,
    pub class: SolutionClass,
}

impl Policy {
    pub fn empty() -> Self {
        Policy {
            entries: BTreeMap::new(),
            class: SolutionClass::Strong,
        }
    }

    pub fn action_for(&self, state: &State) -> Option<ActionId> {
        self.entries.get(state).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("no {0} policy exists")]
    Unsolvable(SolutionClass),
    #[error("search budget of {budget} node expansions exceeded")]
    ResourceLimit { budget: usize },
    #[error("acyclic unfolding exceeded depth limit {limit}")]
    DepthExceeded { limit: usize },
    #[error("policy document: {0}")]
    BadPolicy(String),
}

/// Successors of `state` under every outcome of `action`, in outcome order.
pub(crate) fn successors(task: &crate::pddl::GroundedTask, state: &State, action: ActionId) -> Vec<State> {
    task.actions[action]
        .outcomes
        .iter()
        .map(|o| o.apply(state))
        .collect()
}

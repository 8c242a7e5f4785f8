use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{PlanError, Policy};
use crate::pddl::{GroundedTask, Outcome};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanNodeKind {
    /// Applies `action`; one child per outcome.
    Action,
    Goal,
    /// Repeats an ancestor's state; `back_to` names that ancestor.
    BackEdge,
    /// Non-goal state without a policy entry (only in weak policies).
    Unmapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanNode {
    pub id: usize,
    pub kind: PlanNodeKind,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub back_to: Option<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEdge {
    pub from: usize,
    pub to: usize,
    pub outcome: usize,
    /// Effect summary of the outcome, e.g. `(okanxiety prepare)`.
    pub label: String,
}

/// Tree unfolding of a policy from the initial state. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchedPlan {
    pub fluent_order: Vec<String>,
    pub nodes: Vec<PlanNode>,
    pub edges: Vec<PlanEdge>,
}

impl BranchedPlan {
    pub fn children(&self, node: usize) -> impl Iterator<Item = &PlanEdge> {
        self.edges.iter().filter(move |e| e.from == node)
    }

    pub fn node(&self, id: usize) -> &PlanNode {
        &self.nodes[id]
    }

    /// Indented text rendering, one line per node.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(0, 0, None, &mut out);
        out
    }

    fn render_node(&self, id: usize, indent: usize, via: Option<&PlanEdge>, out: &mut String) {
        let node = &self.nodes[id];
        let pad = "  ".repeat(indent);
        let prefix = match via {
            Some(e) if self.children(e.from).count() > 1 => format!("[{}] {} -> ", e.outcome, e.label),
            _ => String::new(),
        };
        let _ = match node.kind {
            PlanNodeKind::Action => writeln!(out, "{pad}{prefix}{}", node.action.as_deref().unwrap_or("?")),
            PlanNodeKind::Goal => writeln!(out, "{pad}{prefix}GOAL"),
            PlanNodeKind::BackEdge => writeln!(out, "{pad}{prefix}LOOP to node {}", node.back_to.unwrap_or(0)),
            PlanNodeKind::Unmapped => writeln!(out, "{pad}{prefix}UNMAPPED"),
        };
        for e in self.children(id) {
            self.render_node(e.to, indent + 1, Some(e), out);
        }
    }
}

pub(crate) fn outcome_label(task: &GroundedTask, o: &Outcome) -> String {
    let mut parts: Vec<String> = Vec::new();
    for &f in &o.add {
        parts.push(task.fluent_name(f));
    }
    for &f in &o.del {
        parts.push(format!("(not {})", task.fluent_name(f)));
    }
    if parts.is_empty() {
        "(and)".into()
    } else {
        parts.join(" ")
    }
}

/// Unfolds `policy` into a tree. A successor equal to a state on the current
/// root path becomes a back-edge; any root-to-leaf path longer than
/// `depth_limit` is an error.
pub fn unfold(task: &GroundedTask, policy: &Policy, depth_limit: usize) -> Result<BranchedPlan, PlanError> {
    let mut plan = BranchedPlan {
        fluent_order: task.fluent_order(),
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let mut path: HashMap<State, usize> = HashMap::new();
    expand(task, policy, &task.init, 0, depth_limit, &mut path, &mut plan)?;
    Ok(plan)
}

fn expand(
    task: &GroundedTask,
    policy: &Policy,
    state: &State,
    depth: usize,
    limit: usize,
    path: &mut HashMap<State, usize>,
    plan: &mut BranchedPlan,
) -> Result<usize, PlanError> {
    if depth > limit {
        return Err(PlanError::DepthExceeded { limit });
    }
    let id = plan.nodes.len();
    let mut node = PlanNode {
        id,
        kind: PlanNodeKind::Goal,
        state: state.to_bitstring(),
        action: None,
        action_id: None,
        back_to: None,
        depth,
    };
    if task.is_goal(state) {
        plan.nodes.push(node);
        return Ok(id);
    }
    if let Some(&ancestor) = path.get(state) {
        node.kind = PlanNodeKind::BackEdge;
        node.back_to = Some(ancestor);
        plan.nodes.push(node);
        return Ok(id);
    }
    let Some(a) = policy.action_for(state) else {
        node.kind = PlanNodeKind::Unmapped;
        plan.nodes.push(node);
        return Ok(id);
    };
    let action = &task.actions[a];
    node.kind = PlanNodeKind::Action;
    node.action = Some(action.name());
    node.action_id = Some(a);
    plan.nodes.push(node);
    path.insert(state.clone(), id);
    for (k, o) in action.outcomes.iter().enumerate() {
        let next = o.apply(state);
        let child = expand(task, policy, &next, depth + 1, limit, path, plan)?;
        plan.edges.push(PlanEdge {
            from: id,
            to: child,
            outcome: k,
            label: outcome_label(task, o),
        });
    }
    path.remove(state);
    Ok(id)
}

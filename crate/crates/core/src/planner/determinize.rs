use serde::{Deserialize, Serialize};

use crate::pddl::{ActionId, GroundAction, GroundedTask};

/// Maps a deterministic variant back to its source action and outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeTag {
    pub action: ActionId,
    pub outcome: usize,
}

/// All-outcomes determinization: a k-outcome action becomes k single-outcome
/// actions. Variant `i` in the returned task is described by `tags[i]`;
/// variants appear in (action id, outcome index) order.
pub fn determinize(task: &GroundedTask) -> (GroundedTask, Vec<OutcomeTag>) {
    let mut actions = Vec::new();
    let mut tags = Vec::new();
    for a in &task.actions {
        for (k, o) in a.outcomes.iter().enumerate() {
            tags.push(OutcomeTag {
                action: a.id,
                outcome: k,
            });
            let mut variant = GroundAction {
                id: actions.len(),
                outcomes: vec![o.clone()],
                ..a.clone()
            };
            if a.outcomes.len() > 1 {
                variant.schema = format!("{}__o{k}", a.schema);
            }
            actions.push(variant);
        }
    }
    let det = GroundedTask::from_parts(
        task.domain_name.clone(),
        task.problem_name.clone(),
        task.fluents.clone(),
        task.init.clone(),
        task.goal.clone(),
        actions,
    );
    (det, tags)
}

//! Classical forward search over the all-outcomes determinization.
//!
//! Best-first on `g + h_add`, where `h_add` is the additive delete-relaxation
//! heuristic computed over positive preconditions only. Ties resolve by
//! generation order, which follows (action id, outcome index).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::determinize::OutcomeTag;
use super::PlanError;
use crate::pddl::{ActionId, GroundedTask};
use crate::state::State;

pub(crate) struct Budget {
    pub used: usize,
    pub limit: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget { used: 0, limit }
    }

    pub fn charge(&mut self) -> Result<(), PlanError> {
        self.used += 1;
        if self.used > self.limit {
            Err(PlanError::ResourceLimit { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

struct RelaxedVariant {
    pre: Vec<usize>,
    add: Vec<usize>,
}

pub(crate) struct Searcher<'a> {
    task: &'a GroundedTask,
    tags: Vec<OutcomeTag>,
    relaxed: Vec<RelaxedVariant>,
    goal_pos: Vec<usize>,
}

const INF: u32 = u32::MAX;

impl<'a> Searcher<'a> {
    pub fn new(task: &'a GroundedTask) -> Self {
        let mut tags = Vec::new();
        let mut relaxed = Vec::new();
        for a in &task.actions {
            let pre: Vec<usize> = a.pre.iter().filter(|l| l.value).map(|l| l.fluent).collect();
            for (k, o) in a.outcomes.iter().enumerate() {
                tags.push(OutcomeTag {
                    action: a.id,
                    outcome: k,
                });
                relaxed.push(RelaxedVariant {
                    pre: pre.clone(),
                    add: o.add.clone(),
                });
            }
        }
        let goal_pos = task.goal.iter().filter(|l| l.value).map(|l| l.fluent).collect();
        Searcher {
            task,
            tags,
            relaxed,
            goal_pos,
        }
    }

    /// Additive relaxed cost of the goal from `state`; `None` when the goal
    /// is unreachable even ignoring deletes and negative conditions.
    pub fn h_add(&self, state: &State) -> Option<u32> {
        let mut cost = vec![INF; state.len()];
        for f in state.true_fluents() {
            cost[f] = 0;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for v in &self.relaxed {
                let mut c: u32 = 1;
                let mut ok = true;
                for &p in &v.pre {
                    if cost[p] == INF {
                        ok = false;
                        break;
                    }
                    c = c.saturating_add(cost[p]);
                }
                if !ok {
                    continue;
                }
                for &f in &v.add {
                    if c < cost[f] {
                        cost[f] = c;
                        changed = true;
                    }
                }
            }
        }
        let mut h: u32 = 0;
        for &g in &self.goal_pos {
            if cost[g] == INF {
                return None;
            }
            h = h.saturating_add(cost[g]);
        }
        Some(h)
    }

    /// Finds a sequence of (state, variant) steps from `from` to the first
    /// state satisfying `is_target`. Pairs rejected by `forbidden` are never
    /// expanded. Returns `Ok(None)` when the search space is exhausted.
    pub fn search(
        &self,
        from: &State,
        is_target: impl Fn(&State) -> bool,
        forbidden: impl Fn(&State, ActionId) -> bool,
        budget: &mut Budget,
    ) -> Result<Option<Vec<(State, OutcomeTag)>>, PlanError> {
        if is_target(from) {
            return Ok(Some(Vec::new()));
        }
        let Some(h0) = self.h_add(from) else {
            return Ok(None);
        };
        // node: (state, parent, variant)
        let mut nodes: Vec<(State, usize, usize)> = vec![(from.clone(), usize::MAX, usize::MAX)];
        let mut seen: HashSet<State> = HashSet::new();
        seen.insert(from.clone());
        let mut open = BinaryHeap::new();
        let mut seq: u64 = 0;
        open.push(Reverse((h0, 0u32, seq, 0usize)));

        while let Some(Reverse((_, g, _, idx))) = open.pop() {
            budget.charge()?;
            let state = nodes[idx].0.clone();
            let mut v = 0;
            for a in &self.task.actions {
                let n = a.outcomes.len();
                if !a.applicable(&state) || forbidden(&state, a.id) {
                    v += n;
                    continue;
                }
                for o in &a.outcomes {
                    let next = o.apply(&state);
                    let variant = v;
                    v += 1;
                    if seen.contains(&next) {
                        continue;
                    }
                    if is_target(&next) {
                        nodes.push((next, idx, variant));
                        return Ok(Some(self.extract(&nodes, nodes.len() - 1)));
                    }
                    let Some(h) = self.h_add(&next) else {
                        seen.insert(next);
                        continue;
                    };
                    seen.insert(next.clone());
                    nodes.push((next, idx, variant));
                    seq += 1;
                    open.push(Reverse((g + 1 + h, g + 1, seq, nodes.len() - 1)));
                }
            }
        }
        Ok(None)
    }

    fn extract(&self, nodes: &[(State, usize, usize)], mut idx: usize) -> Vec<(State, OutcomeTag)> {
        let mut path = Vec::new();
        while nodes[idx].1 != usize::MAX {
            let (_, parent, variant) = nodes[idx];
            path.push((nodes[parent].0.clone(), self.tags[variant]));
            idx = parent;
        }
        path.reverse();
        path
    }
}

/// A classical plan for the all-outcomes determinization from `from`, as
/// (action, outcome) steps, or `None` if the goal is unreachable.
pub fn weak_plan(task: &GroundedTask, from: &State, budget: usize) -> Result<Option<Vec<OutcomeTag>>, PlanError> {
    let searcher = Searcher::new(task);
    let mut budget = Budget::new(budget);
    Ok(searcher
        .search(from, |s| task.is_goal(s), |_, _| false, &mut budget)?
        .map(|p| p.into_iter().map(|(_, t)| t).collect()))
}

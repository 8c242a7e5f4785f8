use std::collections::{HashMap, VecDeque};

use super::{Policy, SolutionClass};
use crate::pddl::GroundedTask;
use crate::state::State;

/// Classifies `policy` on `task` by analysing the graph of states the policy
/// can reach from the initial state. Shares no code with the solver.
///
/// * strong: every reachable non-goal state is mapped and the graph is acyclic
/// * strong-cyclic: every reachable non-goal state is mapped and can still
///   reach a goal state
/// * weak: some policy path from the initial state reaches a goal state
/// * invalid: none of the above, or some entry's action is not applicable
pub fn verify_policy(task: &GroundedTask, policy: &Policy) -> SolutionClass {
    for (state, &a) in &policy.entries {
        match task.actions.get(a) {
            Some(action) if state.len() == task.fluents.len() && action.applicable(state) => {}
            _ => return SolutionClass::Invalid,
        }
    }
    if task.is_goal(&task.init) {
        return SolutionClass::Strong;
    }

    let mut nodes: Vec<State> = vec![task.init.clone()];
    let mut ids: HashMap<State, usize> = HashMap::from([(task.init.clone(), 0)]);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut goal: Vec<bool> = Vec::new();
    let mut all_mapped = true;
    let mut i = 0;
    while i < nodes.len() {
        let s = nodes[i].clone();
        let is_goal = task.is_goal(&s);
        goal.push(is_goal);
        let mut out = Vec::new();
        if !is_goal {
            match policy.entries.get(&s) {
                None => all_mapped = false,
                Some(&a) => {
                    for o in &task.actions[a].outcomes {
                        let n = o.apply(&s);
                        let id = match ids.get(&n) {
                            Some(&id) => id,
                            None => {
                                nodes.push(n.clone());
                                ids.insert(n, nodes.len() - 1);
                                nodes.len() - 1
                            }
                        };
                        out.push(id);
                    }
                }
            }
        }
        succ.push(out);
        i += 1;
    }
    let n = nodes.len();

    // backward closure from goal states
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, outs) in succ.iter().enumerate() {
        for &v in outs {
            pred[v].push(u);
        }
    }
    let mut reaches = goal.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| goal[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &pred[v] {
            if !reaches[u] {
                reaches[u] = true;
                queue.push_back(u);
            }
        }
    }

    if all_mapped && reaches.iter().all(|&r| r) {
        if is_acyclic(&succ) {
            SolutionClass::Strong
        } else {
            SolutionClass::StrongCyclic
        }
    } else if reaches[0] {
        SolutionClass::Weak
    } else {
        SolutionClass::Invalid
    }
}

/// Kahn's algorithm over the reachable graph.
fn is_acyclic(succ: &[Vec<usize>]) -> bool {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for outs in succ {
        for &v in outs {
            indeg[v] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop_front() {
        removed += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    removed == n
}

//! Policy synthesis.
//!
//! Strong-cyclic: incremental replanning over the determinization. Starting
//! from the initial state, every unmapped non-goal state reached under the
//! current policy gets a weak plan towards the goal or any already mapped
//! state; each step of that plan is added to the policy and all outcomes of
//! the chosen actions are queued. A state with no such plan is a dead end;
//! state-action pairs with an outcome in a dead end are forbidden and the
//! policy is rebuilt. The loop ends when a pass closes without new dead ends.
//!
//! Strong: explicit AND/OR backward layering over the reachable state space,
//! which yields an acyclic policy whenever one exists.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::search::{Budget, Searcher};
use super::{successors, verify_policy, PlanError, Policy, Semantics};
use crate::pddl::{ActionId, GroundedTask};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub semantics: Semantics,
    /// Upper bound on node expansions (and state-action evaluations for the
    /// layered strong solver) per solve call.
    pub max_expansions: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            semantics: Semantics::StrongCyclic,
            max_expansions: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn with_semantics(semantics: Semantics) -> Self {
        SolverConfig {
            semantics,
            ..Default::default()
        }
    }
}

/// Solves `task` from its initial state.
pub fn solve(task: &GroundedTask, semantics: Semantics) -> Result<Policy, PlanError> {
    solve_from(task, &task.init, &SolverConfig::with_semantics(semantics))
}

/// Solves `task` from an arbitrary start state.
pub fn solve_from(task: &GroundedTask, start: &State, config: &SolverConfig) -> Result<Policy, PlanError> {
    let mut budget = Budget::new(config.max_expansions);
    let entries = match config.semantics {
        Semantics::StrongCyclic => strong_cyclic(task, start, &mut budget)?,
        Semantics::Strong => strong(task, start, &mut budget)?,
    };
    let mut policy = Policy {
        entries,
        class: super::SolutionClass::Invalid,
    };
    policy.class = verify_policy(&task.with_init(start.clone()), &policy);
    debug_assert!(policy.class.satisfies(config.semantics.class()));
    Ok(policy)
}

fn strong_cyclic(
    task: &GroundedTask,
    start: &State,
    budget: &mut Budget,
) -> Result<BTreeMap<State, ActionId>, PlanError> {
    let searcher = Searcher::new(task);
    let mut dead: HashSet<State> = HashSet::new();

    'rebuild: loop {
        let mut policy: BTreeMap<State, ActionId> = BTreeMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        let mut visited: HashSet<State> = HashSet::new();

        while let Some(s) = queue.pop_front() {
            if task.is_goal(&s) || !visited.insert(s.clone()) {
                continue;
            }
            if !policy.contains_key(&s) {
                let forbidden = |x: &State, a: ActionId| {
                    task.actions[a].outcomes.iter().any(|o| dead.contains(&o.apply(x)))
                };
                let found = searcher.search(
                    &s,
                    |x| task.is_goal(x) || policy.contains_key(x),
                    forbidden,
                    budget,
                )?;
                match found {
                    Some(path) => {
                        for (state, tag) in path {
                            policy.entry(state).or_insert(tag.action);
                        }
                    }
                    None => {
                        if &s == start {
                            return Err(PlanError::Unsolvable(super::SolutionClass::StrongCyclic));
                        }
                        dead.insert(s);
                        continue 'rebuild;
                    }
                }
            }
            let a = policy[&s];
            for next in successors(task, &s, a) {
                debug_assert!(!dead.contains(&next), "search never picks pairs leading to dead ends");
                queue.push_back(next);
            }
        }
        return Ok(policy);
    }
}

fn strong(
    task: &GroundedTask,
    start: &State,
    budget: &mut Budget,
) -> Result<BTreeMap<State, ActionId>, PlanError> {
    // reachable space under any action
    let mut states: Vec<State> = vec![start.clone()];
    let mut index: HashMap<State, usize> = HashMap::from([(start.clone(), 0)]);
    // per state: applicable (action, successor indices)
    let mut edges: Vec<Vec<(ActionId, Vec<usize>)>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut out = Vec::new();
        if !task.is_goal(&s) {
            for a in &task.actions {
                if !a.applicable(&s) {
                    continue;
                }
                budget.charge()?;
                let succ = a
                    .outcomes
                    .iter()
                    .map(|o| {
                        let n = o.apply(&s);
                        *index.entry(n.clone()).or_insert_with(|| {
                            states.push(n);
                            states.len() - 1
                        })
                    })
                    .collect();
                out.push((a.id, succ));
            }
        }
        edges.push(out);
        i += 1;
    }

    // layer[s] = length of the longest guaranteed path to the goal
    let n = states.len();
    let mut layer: Vec<Option<usize>> = states
        .iter()
        .map(|s| task.is_goal(s).then_some(0))
        .collect();
    let mut choice: Vec<Option<ActionId>> = vec![None; n];
    let mut current = 0;
    loop {
        current += 1;
        let mut added = Vec::new();
        for s in 0..n {
            if layer[s].is_some() {
                continue;
            }
            for (a, succ) in &edges[s] {
                if succ.iter().all(|&t| layer[t].is_some_and(|l| l < current)) {
                    added.push((s, *a));
                    break;
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (s, a) in added {
            layer[s] = Some(current);
            choice[s] = Some(a);
        }
    }
    if layer[0].is_none() {
        return Err(PlanError::Unsolvable(super::SolutionClass::Strong));
    }

    // keep only states the policy actually reaches
    let mut policy = BTreeMap::new();
    let mut queue = VecDeque::from([0usize]);
    let mut seen = HashSet::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let Some(a) = choice[s] else { continue };
        policy.insert(states[s].clone(), a);
        let succ = &edges[s].iter().find(|(b, _)| *b == a).unwrap().1;
        for &t in succ {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    Ok(policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{load_task, Atom, GroundAction, Lit, Outcome};
    use crate::planner::SolutionClass;

    /// One fluent `g`; `flip` sets or clears it nondeterministically.
    pub(crate) fn coin_flip() -> GroundedTask {
        GroundedTask::from_parts(
            "coin",
            "flip",
            vec![Atom::new("g", vec![])],
            State::empty(1),
            vec![Lit { fluent: 0, value: true }],
            vec![GroundAction {
                id: 0,
                schema: "flip".into(),
                params: vec![],
                args: vec![],
                pre: vec![],
                outcomes: vec![
                    Outcome { add: vec![0], del: vec![] },
                    Outcome { add: vec![], del: vec![0] },
                ],
                group: Default::default(),
            }],
        )
    }

    #[test]
    fn goal_at_init_gives_empty_strong_policy() {
        let mut task = coin_flip();
        task.init.set(0, true);
        for sem in [Semantics::Strong, Semantics::StrongCyclic] {
            let p = solve(&task, sem).unwrap();
            assert!(p.is_empty());
            assert_eq!(p.class, SolutionClass::Strong);
        }
    }

    #[test]
    fn coin_flip_is_strong_cyclic_only() {
        let task = coin_flip();
        let p = solve(&task, Semantics::StrongCyclic).unwrap();
        assert_eq!(p.class, SolutionClass::StrongCyclic);
        assert_eq!(p.len(), 1);
        assert_eq!(
            solve(&task, Semantics::Strong),
            Err(PlanError::Unsolvable(SolutionClass::Strong))
        );
    }

    #[test]
    fn dead_end_outcome_is_avoided() {
        // `risky` reaches the goal or a trap; `safe` is a two-step detour.
        let text_d = "(define (domain trap) (:requirements :negative-preconditions :non-deterministic)
            (:predicates (goal) (trap) (mid))
            (:action risky :precondition (and (not (trap))) :effect (oneof (goal) (trap)))
            (:action step :precondition (and (not (trap))) :effect (mid))
            (:action finish :precondition (and (mid)) :effect (goal)))";
        let text_p = "(define (problem p) (:domain trap) (:objects) (:init) (:goal (goal)))";
        let task = load_task(text_d, text_p).unwrap();
        let p = solve(&task, Semantics::StrongCyclic).unwrap();
        assert_eq!(p.class, SolutionClass::Strong);
        let first = p.action_for(&task.init).unwrap();
        assert_eq!(task.actions[first].schema, "step");
        assert!(solve(&task, Semantics::Strong).is_ok());
    }

    #[test]
    fn unsolvable_task() {
        let d = "(define (domain u) (:predicates (goal) (a)) (:action x :effect (a)))";
        let p = "(define (problem p) (:domain u) (:objects) (:init) (:goal (goal)))";
        let task = load_task(d, p).unwrap();
        for sem in [Semantics::Strong, Semantics::StrongCyclic] {
            assert!(matches!(solve(&task, sem), Err(PlanError::Unsolvable(_))));
        }
    }

    #[test]
    fn clinic_policy_is_strong_cyclic_and_reproducible() {
        let task = crate::bundled::clinic_task();
        let a = solve(&task, Semantics::StrongCyclic).unwrap();
        let b = solve(&task, Semantics::StrongCyclic).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.class, SolutionClass::StrongCyclic);
        assert_eq!(
            task.actions[a.action_for(&task.init).unwrap()].schema,
            "test-anxiety"
        );
        assert!(matches!(
            solve(&task, Semantics::Strong),
            Err(PlanError::Unsolvable(SolutionClass::Strong))
        ));
    }

    #[test]
    fn tiny_budget_reports_resource_limit() {
        let task = crate::bundled::clinic_task();
        let cfg = SolverConfig {
            max_expansions: 3,
            ..Default::default()
        };
        assert_eq!(
            solve_from(&task, &task.init, &cfg),
            Err(PlanError::ResourceLimit { budget: 3 })
        );
    }
}

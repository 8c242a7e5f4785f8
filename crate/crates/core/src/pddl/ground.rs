use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::*;
use super::PddlError;
use crate::state::{FluentId, State};

pub type ActionId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit {
    pub fluent: FluentId,
    pub value: bool,
}

impl Lit {
    pub fn holds(&self, state: &State) -> bool {
        state.get(self.fluent) == self.value
    }
}

/// Fluents an outcome makes true and false. The two lists are disjoint and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub add: Vec<FluentId>,
    pub del: Vec<FluentId>,
}

impl Outcome {
    pub fn apply(&self, state: &State) -> State {
        let mut next = state.clone();
        for &f in &self.del {
            next.set(f, false);
        }
        for &f in &self.add {
            next.set(f, true);
        }
        next
    }

    /// Value this outcome assigns to `fluent`, if it touches it.
    pub fn effect_on(&self, fluent: FluentId) -> Option<bool> {
        if self.add.binary_search(&fluent).is_ok() {
            Some(true)
        } else if self.del.binary_search(&fluent).is_ok() {
            Some(false)
        } else {
            None
        }
    }

    pub fn touched(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.add.iter().chain(self.del.iter()).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub id: ActionId,
    pub schema: String,
    /// Parameter names of the schema, aligned with `args`.
    pub params: Vec<String>,
    pub args: Vec<String>,
    pub pre: Vec<Lit>,
    pub outcomes: Vec<Outcome>,
    pub group: ActionGroup,
}

impl GroundAction {
    pub fn is_deterministic(&self) -> bool {
        self.outcomes.len() == 1
    }

    pub fn applicable(&self, state: &State) -> bool {
        self.pre.iter().all(|l| l.holds(state))
    }

    /// Value bound to a schema parameter such as `?p`.
    pub fn binding(&self, param: &str) -> Option<&str> {
        self.params
            .iter()
            .position(|p| p == param)
            .map(|i| self.args[i].as_str())
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// The finite FOND task: fluent universe, initial state, goal and ground actions.
#[derive(Debug, Clone)]
pub struct GroundedTask {
    pub domain_name: String,
    pub problem_name: String,
    pub fluents: Vec<Atom>,
    pub init: State,
    pub goal: Vec<Lit>,
    pub actions: Vec<GroundAction>,
    index: HashMap<Atom, FluentId>,
    action_index: HashMap<String, ActionId>,
}

impl GroundedTask {
    /// Assembles a task directly from grounded parts (used by generators and
    /// the all-outcomes determinization).
    pub fn from_parts(
        domain_name: impl Into<String>,
        problem_name: impl Into<String>,
        fluents: Vec<Atom>,
        init: State,
        goal: Vec<Lit>,
        actions: Vec<GroundAction>,
    ) -> Self {
        let index = fluents
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let action_index = actions
            .iter()
            .map(|a| (a.name(), a.id))
            .collect();
        GroundedTask {
            domain_name: domain_name.into(),
            problem_name: problem_name.into(),
            fluents,
            init,
            goal,
            actions,
            index,
            action_index,
        }
    }

    pub fn fluent_id(&self, atom: &Atom) -> Option<FluentId> {
        self.index.get(atom).copied()
    }

    pub fn fluent_name(&self, f: FluentId) -> String {
        self.fluents[f].to_string()
    }

    /// Looks up a fluent by its printed form, e.g. `(okanxiety prepare)`.
    pub fn fluent_by_name(&self, name: &str) -> Option<FluentId> {
        let lit = super::parse_ground_literal(name).ok()?;
        if !lit.positive {
            return None;
        }
        self.fluent_id(&lit.atom)
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn is_goal(&self, state: &State) -> bool {
        self.goal.iter().all(|l| l.holds(state))
    }

    pub fn with_init(&self, init: State) -> Self {
        let mut t = self.clone();
        t.init = init;
        t
    }

    pub fn fluent_order(&self) -> Vec<String> {
        self.fluents.iter().map(Atom::to_string).collect()
    }
}

/// Every type-consistent binding of `params`, odometer order over objects in
/// declaration order.
fn bindings<'a>(
    params: &'a [TypedVar],
    domain: &'a DomainModel,
    problem: &'a ProblemModel,
) -> Vec<Vec<&'a str>> {
    let pools: Vec<Vec<&str>> = params
        .iter()
        .map(|p| {
            problem
                .objects_of(domain, &p.ty)
                .map(|o| o.name.as_str())
                .collect()
        })
        .collect();
    if pools.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; pools.len()];
    loop {
        out.push(idx.iter().zip(&pools).map(|(&i, p)| p[i]).collect());
        let mut k = pools.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Instantiates predicates and schemas over the problem's objects.
///
/// No reachability pruning is performed: the fluent universe holds every
/// type-consistent instantiation of every predicate and the action list every
/// binding of every schema.
pub fn ground(domain: &DomainModel, problem: &ProblemModel) -> Result<GroundedTask, PddlError> {
    if problem.domain_name != domain.name {
        return Err(PddlError::MismatchedDomain {
            expected: domain.name.clone(),
            found: problem.domain_name.clone(),
        });
    }
    problem.validate(domain)?;

    let mut fluents = Vec::new();
    for pred in &domain.predicates {
        for b in bindings(&pred.params, domain, problem) {
            fluents.push(Atom::new(
                pred.name.clone(),
                b.into_iter().map(str::to_string).collect(),
            ));
        }
    }
    let index: HashMap<Atom, FluentId> = fluents
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();

    let lookup = |atom: &Atom| -> Result<FluentId, PddlError> {
        index
            .get(atom)
            .copied()
            .ok_or_else(|| PddlError::semantic_nopos(format!("atom {atom} is not in the fluent universe")))
    };

    let mut init = State::empty(fluents.len());
    for atom in &problem.init {
        init.set(lookup(atom)?, true);
    }
    let mut goal = Vec::new();
    for l in &problem.goal {
        let lit = Lit {
            fluent: lookup(&l.atom)?,
            value: l.positive,
        };
        if !goal.contains(&lit) {
            goal.push(lit);
        }
    }

    let mut actions = Vec::new();
    for schema in &domain.actions {
        let params: Vec<String> = schema.params.iter().map(|p| p.name.clone()).collect();
        for b in bindings(&schema.params, domain, problem) {
            let subst = |atom: &Atom| -> Atom {
                Atom::new(
                    atom.predicate.clone(),
                    atom.args
                        .iter()
                        .map(|v| {
                            let i = params.iter().position(|p| p == v).expect("validated variable");
                            b[i].to_string()
                        })
                        .collect(),
                )
            };
            let mut pre = Vec::new();
            for l in &schema.precondition {
                let lit = Lit {
                    fluent: lookup(&subst(&l.atom))?,
                    value: l.positive,
                };
                if !pre.contains(&lit) {
                    pre.push(lit);
                }
            }
            let mut outcomes = Vec::new();
            for eff in &schema.outcomes {
                let mut add = Vec::new();
                let mut del = Vec::new();
                for l in eff {
                    let f = lookup(&subst(&l.atom))?;
                    if l.positive {
                        add.push(f);
                    } else {
                        del.push(f);
                    }
                }
                add.sort_unstable();
                add.dedup();
                del.sort_unstable();
                del.dedup();
                // bindings can alias two variables; adds win over deletes
                del.retain(|f| add.binary_search(f).is_err());
                outcomes.push(Outcome { add, del });
            }
            actions.push(GroundAction {
                id: actions.len(),
                schema: schema.name.clone(),
                params: params.clone(),
                args: b.iter().map(|s| s.to_string()).collect(),
                pre,
                outcomes,
                group: schema.group,
            });
        }
    }

    Ok(GroundedTask::from_parts(
        domain.name.clone(),
        problem.name.clone(),
        fluents,
        init,
        goal,
        actions,
    ))
}

//! Random PDDL generators and brute-force oracles shared by the integration
//! tests. Nothing here calls into the planner or the grounder.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use carebot::pddl::{load_task, ActionId, GroundedTask};
use carebot::planner::SolutionClass;
use carebot::State;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct GenLit {
    pub pred: usize,
    /// Parameter indices for schema literals, object indices for ground ones.
    pub args: Vec<usize>,
    pub positive: bool,
}

#[derive(Debug, Clone)]
pub struct GenSchema {
    pub params: Vec<usize>,
    pub pre: Vec<GenLit>,
    pub outcomes: Vec<Vec<GenLit>>,
}

/// A random typed FOND domain and problem, kept in index form so oracles can
/// work from it without parsing.
#[derive(Debug, Clone)]
pub struct GenTask {
    /// Parent type per type; `None` hangs off `object`.
    pub types: Vec<Option<usize>>,
    pub preds: Vec<Vec<usize>>,
    pub schemas: Vec<GenSchema>,
    pub objects: Vec<usize>,
    pub init: Vec<GenLit>,
    pub goal: Vec<GenLit>,
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_types: usize,
    pub max_objects: usize,
    pub max_schemas: usize,
    pub max_preds: usize,
    pub max_arity: usize,
    pub max_outcomes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_types: 4,
            max_objects: 6,
            max_schemas: 5,
            max_preds: 5,
            max_arity: 2,
            max_outcomes: 3,
        }
    }
}

impl GenTask {
    pub fn is_subtype(&self, mut ty: usize, ancestor: usize) -> bool {
        loop {
            if ty == ancestor {
                return true;
            }
            match self.types[ty] {
                Some(p) => ty = p,
                None => return false,
            }
        }
    }

    /// Objects usable where `ty` is expected.
    pub fn pool(&self, ty: usize) -> Vec<usize> {
        (0..self.objects.len())
            .filter(|&o| self.is_subtype(self.objects[o], ty))
            .collect()
    }

    pub fn random(rng: &mut ChaCha8Rng, limits: Limits) -> Self {
        let n_types = rng.gen_range(1..=limits.max_types);
        let types: Vec<Option<usize>> = (0..n_types)
            .map(|i| if i > 0 && rng.gen_bool(0.5) { Some(rng.gen_range(0..i)) } else { None })
            .collect();
        let n_preds = rng.gen_range(1..=limits.max_preds);
        let preds: Vec<Vec<usize>> = (0..n_preds)
            .map(|_| {
                let arity = rng.gen_range(0..=limits.max_arity);
                (0..arity).map(|_| rng.gen_range(0..n_types)).collect()
            })
            .collect();
        let n_objects = rng.gen_range(1..=limits.max_objects);
        let objects: Vec<usize> = (0..n_objects).map(|_| rng.gen_range(0..n_types)).collect();
        let mut task = GenTask {
            types,
            preds,
            schemas: Vec::new(),
            objects,
            init: Vec::new(),
            goal: Vec::new(),
        };
        let n_schemas = rng.gen_range(1..=limits.max_schemas);
        for _ in 0..n_schemas {
            let n_params = rng.gen_range(0..=2);
            let params: Vec<usize> = (0..n_params).map(|_| rng.gen_range(0..n_types)).collect();
            let n_pre = rng.gen_range(0..=3);
            let pre = task.schema_lits(rng, &params, n_pre, &[]);
            let n_out = rng.gen_range(1..=limits.max_outcomes);
            let mut outcomes = Vec::new();
            for _ in 0..n_out {
                let n_eff = rng.gen_range(1..=3);
                let eff = task.schema_lits(rng, &params, n_eff, &[]);
                if !eff.is_empty() {
                    outcomes.push(eff);
                }
            }
            if !outcomes.is_empty() {
                task.schemas.push(GenSchema { params, pre, outcomes });
            }
        }
        let atoms = task.ground_atoms();
        for a in &atoms {
            if rng.gen_bool(0.35) {
                task.init.push(GenLit {
                    pred: a.0,
                    args: a.1.clone(),
                    positive: true,
                });
            }
        }
        let mut pool = atoms.clone();
        pool.shuffle(rng);
        for a in pool.into_iter().take(rng.gen_range(1..=3)) {
            task.goal.push(GenLit {
                pred: a.0,
                args: a.1,
                positive: rng.gen_bool(0.75),
            });
        }
        task
    }

    /// Up to `n` literals over `params`, no atom repeated.
    fn schema_lits(&self, rng: &mut ChaCha8Rng, params: &[usize], n: usize, avoid: &[GenLit]) -> Vec<GenLit> {
        let mut out: Vec<GenLit> = Vec::new();
        for _ in 0..n * 4 {
            if out.len() == n {
                break;
            }
            let pred = rng.gen_range(0..self.preds.len());
            let mut args = Vec::new();
            for &ty in &self.preds[pred] {
                let fits: Vec<usize> = (0..params.len()).filter(|&p| self.is_subtype(params[p], ty)).collect();
                match fits.choose(rng) {
                    Some(&p) => args.push(p),
                    None => break,
                }
            }
            if args.len() != self.preds[pred].len() {
                continue;
            }
            if out.iter().chain(avoid).any(|l| l.pred == pred && l.args == args) {
                continue;
            }
            out.push(GenLit {
                pred,
                args,
                positive: rng.gen_bool(0.6),
            });
        }
        out
    }

    /// Every type-consistent ground atom, by brute force over object tuples.
    pub fn ground_atoms(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (p, tys) in self.preds.iter().enumerate() {
            for tuple in tuples(self.objects.len(), tys.len()) {
                if tuple.iter().zip(tys).all(|(&o, &ty)| self.is_subtype(self.objects[o], ty)) {
                    out.push((p, tuple));
                }
            }
        }
        out
    }

    pub fn type_name(&self, ty: usize) -> String {
        format!("t{ty}")
    }

    pub fn atom_text(&self, pred: usize, args: &[String]) -> String {
        if args.is_empty() {
            format!("(p{pred})")
        } else {
            format!("(p{pred} {})", args.join(" "))
        }
    }

    fn lit_text(&self, l: &GenLit, names: &dyn Fn(usize) -> String) -> String {
        let atom = self.atom_text(l.pred, &l.args.iter().map(|&a| names(a)).collect::<Vec<_>>());
        if l.positive {
            atom
        } else {
            format!("(not {atom})")
        }
    }

    pub fn domain_text(&self) -> String {
        let mut s = String::from("(define (domain gen)\n  (:requirements :strips :typing :negative-preconditions :non-deterministic)\n  (:types");
        for (i, parent) in self.types.iter().enumerate() {
            match parent {
                Some(p) => s += &format!(" t{i} - t{p}"),
                None => s += &format!(" t{i} - object"),
            }
        }
        s += ")\n  (:predicates";
        for (i, tys) in self.preds.iter().enumerate() {
            s += &format!(" (p{i}");
            for (j, ty) in tys.iter().enumerate() {
                s += &format!(" ?v{j} - t{ty}");
            }
            s += ")";
        }
        s += ")\n";
        let param = |i: usize| format!("?x{i}");
        for (k, a) in self.schemas.iter().enumerate() {
            s += &format!("  (:action a{k}\n    :parameters (");
            s += &a.params.iter().enumerate().map(|(i, t)| format!("?x{i} - t{t}")).collect::<Vec<_>>().join(" ");
            s += ")\n    :precondition (and";
            for l in &a.pre {
                s += " ";
                s += &self.lit_text(l, &param);
            }
            s += ")\n    :effect ";
            let effect = |o: &Vec<GenLit>| {
                let parts: Vec<String> = o.iter().map(|l| self.lit_text(l, &param)).collect();
                format!("(and {})", parts.join(" "))
            };
            if a.outcomes.len() == 1 {
                s += &effect(&a.outcomes[0]);
            } else {
                s += "(oneof ";
                s += &a.outcomes.iter().map(effect).collect::<Vec<_>>().join(" ");
                s += ")";
            }
            s += ")\n";
        }
        s += ")\n";
        s
    }

    pub fn problem_text(&self) -> String {
        let obj = |i: usize| format!("o{i}");
        let mut s = String::from("(define (problem genp) (:domain gen)\n  (:objects");
        for (i, ty) in self.objects.iter().enumerate() {
            s += &format!(" o{i} - t{ty}");
        }
        s += ")\n  (:init";
        for l in &self.init {
            s += " ";
            s += &self.lit_text(l, &obj);
        }
        s += ")\n  (:goal (and";
        for l in &self.goal {
            s += " ";
            s += &self.lit_text(l, &obj);
        }
        s += ")))\n";
        s
    }

    pub fn load(&self) -> GroundedTask {
        load_task(&self.domain_text(), &self.problem_text())
            .unwrap_or_else(|e| panic!("generated task rejected: {e}\n{}\n{}", self.domain_text(), self.problem_text()))
    }
}

/// All `len`-tuples over `0..n`, odometer order.
pub fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |o| {
                    let mut t = t.clone();
                    t.push(o);
                    t
                })
            })
            .collect();
    }
    out
}

pub struct GroundingCounts {
    pub fluents: usize,
    pub actions: usize,
    /// Per ground action name: precondition literals and per-outcome effect
    /// literals as text, sorted.
    pub detail: BTreeMap<String, (Vec<String>, Vec<Vec<String>>)>,
}

/// Naive enumeration of fluents and ground actions.
pub fn naive_grounding(g: &GenTask) -> GroundingCounts {
    let fluents = g.ground_atoms().len();
    let mut detail = BTreeMap::new();
    let mut actions = 0;
    for (k, a) in g.schemas.iter().enumerate() {
        for tuple in tuples(g.objects.len(), a.params.len()) {
            if !tuple.iter().zip(&a.params).all(|(&o, &ty)| g.is_subtype(g.objects[o], ty)) {
                continue;
            }
            actions += 1;
            let names = |p: usize| format!("o{}", tuple[p]);
            let mut pre: Vec<String> = a.pre.iter().map(|l| g.lit_text(l, &names)).collect();
            pre.sort();
            pre.dedup();
            let outcomes: Vec<Vec<String>> = a
                .outcomes
                .iter()
                .map(|o| {
                    let adds: BTreeSet<String> = o.iter().filter(|l| l.positive).map(|l| g.lit_text(l, &names)).collect();
                    let mut lits: Vec<String> = o
                        .iter()
                        .filter(|l| {
                            l.positive || {
                                let pos = GenLit { positive: true, ..(*l).clone() };
                                !adds.contains(&g.lit_text(&pos, &names))
                            }
                        })
                        .map(|l| g.lit_text(l, &names))
                        .collect();
                    lits.sort();
                    lits.dedup();
                    lits
                })
                .collect();
            let name = if tuple.is_empty() {
                format!("(a{k})")
            } else {
                format!("(a{k} {})", tuple.iter().map(|o| format!("o{o}")).collect::<Vec<_>>().join(" "))
            };
            detail.insert(name, (pre, outcomes));
        }
    }
    GroundingCounts { fluents, actions, detail }
}

/// Same shape as [`GroundingCounts::detail`], read off a grounded task.
pub fn grounded_detail(task: &GroundedTask) -> BTreeMap<String, (Vec<String>, Vec<Vec<String>>)> {
    let text = |f: usize, v: bool| {
        let n = task.fluent_name(f);
        if v {
            n
        } else {
            format!("(not {n})")
        }
    };
    task.actions
        .iter()
        .map(|a| {
            let mut pre: Vec<String> = a.pre.iter().map(|l| text(l.fluent, l.value)).collect();
            pre.sort();
            let outcomes = a
                .outcomes
                .iter()
                .map(|o| {
                    let mut lits: Vec<String> = o
                        .add
                        .iter()
                        .map(|&f| text(f, true))
                        .chain(o.del.iter().map(|&f| text(f, false)))
                        .collect();
                    lits.sort();
                    lits
                })
                .collect();
            (a.name(), (pre, outcomes))
        })
        .collect()
}

pub fn is_goal(task: &GroundedTask, s: &State) -> bool {
    task.goal.iter().all(|l| s.get(l.fluent) == l.value)
}

fn applicable(task: &GroundedTask, a: ActionId, s: &State) -> bool {
    task.actions[a].pre.iter().all(|l| s.get(l.fluent) == l.value)
}

fn apply(task: &GroundedTask, a: ActionId, o: usize, s: &State) -> State {
    let out = &task.actions[a].outcomes[o];
    let mut n = s.clone();
    for &f in &out.del {
        n.set(f, false);
    }
    for &f in &out.add {
        n.set(f, true);
    }
    n
}

/// Explicit state space reachable from the initial state, or `None` when it
/// has more than `limit` states.
pub struct StateSpace {
    pub states: Vec<State>,
    pub goal: Vec<bool>,
    /// Per state: applicable actions with their successor indices.
    pub moves: Vec<Vec<(ActionId, Vec<usize>)>>,
}

pub fn explore(task: &GroundedTask, limit: usize) -> Option<StateSpace> {
    let mut states = vec![task.init.clone()];
    let mut index: HashMap<State, usize> = HashMap::from([(task.init.clone(), 0)]);
    let mut moves = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut here = Vec::new();
        for a in 0..task.actions.len() {
            if !applicable(task, a, &s) {
                continue;
            }
            let mut succ = Vec::new();
            for o in 0..task.actions[a].outcomes.len() {
                let n = apply(task, a, o, &s);
                let id = *index.entry(n.clone()).or_insert_with(|| {
                    states.push(n);
                    states.len() - 1
                });
                succ.push(id);
            }
            here.push((a, succ));
        }
        moves.push(here);
        if states.len() > limit {
            return None;
        }
        i += 1;
    }
    let goal = states.iter().map(|s| is_goal(task, s)).collect();
    Some(StateSpace { states, goal, moves })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solvability {
    pub weak: bool,
    pub strong_cyclic: bool,
    pub strong: bool,
}

impl Solvability {
    pub fn for_class(&self, class: SolutionClass) -> bool {
        match class {
            SolutionClass::Strong => self.strong,
            SolutionClass::StrongCyclic => self.strong_cyclic,
            SolutionClass::Weak => self.weak,
            SolutionClass::Invalid => true,
        }
    }
}

/// AND/OR fixpoints over the explicit state space.
pub fn fixpoint_oracle(space: &StateSpace) -> Solvability {
    let n = space.states.len();
    // weak: plain reachability of a goal state
    let weak_set = backward(space, &vec![true; n], |_, _| true);

    // strong: least fixpoint, an action qualifies when every outcome is won
    let mut won = space.goal.clone();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !won[s] && space.moves[s].iter().any(|(_, succ)| succ.iter().all(|&t| won[t])) {
                won[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // strong-cyclic: greatest fixpoint of "can reach the goal using only
    // actions whose outcomes all stay inside the set"
    let mut keep = vec![true; n];
    loop {
        let next = backward(space, &keep, |succ, keep| succ.iter().all(|&t| keep[t]));
        if next == keep {
            break;
        }
        keep = next;
    }

    Solvability {
        weak: weak_set[0],
        strong_cyclic: keep[0],
        strong: won[0],
    }
}

/// States inside `within` that reach a goal through actions accepted by
/// `allowed` with at least one outcome already in the result.
fn backward(space: &StateSpace, within: &[bool], allowed: impl Fn(&[usize], &[bool]) -> bool) -> Vec<bool> {
    let n = space.states.len();
    let mut reach: Vec<bool> = (0..n).map(|s| within[s] && space.goal[s]).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if reach[s] || !within[s] || space.goal[s] {
                continue;
            }
            if space
                .moves[s]
                .iter()
                .any(|(_, succ)| allowed(succ, within) && succ.iter().any(|&t| reach[t]))
            {
                reach[s] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Classifies a policy by explicit simulation: depth-first colouring for
/// cycles and repeated relaxation for goal reachability.
pub fn classify_policy(task: &GroundedTask, entries: &BTreeMap<State, ActionId>) -> SolutionClass {
    if entries
        .iter()
        .any(|(s, &a)| a >= task.actions.len() || !applicable(task, a, s))
    {
        return SolutionClass::Invalid;
    }
    if is_goal(task, &task.init) {
        return SolutionClass::Strong;
    }
    let mut states: Vec<State> = Vec::new();
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut closed = true;
    let mut stack = vec![task.init.clone()];
    index.insert(task.init.clone(), 0);
    states.push(task.init.clone());
    edges.push(Vec::new());
    while let Some(s) = stack.pop() {
        let id = index[&s];
        if is_goal(task, &s) {
            continue;
        }
        let Some(&a) = entries.get(&s) else {
            closed = false;
            continue;
        };
        for o in 0..task.actions[a].outcomes.len() {
            let n = apply(task, a, o, &s);
            let nid = match index.get(&n) {
                Some(&x) => x,
                None => {
                    states.push(n.clone());
                    edges.push(Vec::new());
                    index.insert(n.clone(), states.len() - 1);
                    stack.push(n);
                    states.len() - 1
                }
            };
            edges[id].push(nid);
        }
    }
    let n = states.len();
    let mut good: Vec<bool> = states.iter().map(|s| is_goal(task, s)).collect();
    loop {
        let mut changed = false;
        for v in 0..n {
            if !good[v] && edges[v].iter().any(|&w| good[w]) {
                good[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if closed && good.iter().all(|&g| g) {
        if has_cycle(&edges) {
            SolutionClass::StrongCyclic
        } else {
            SolutionClass::Strong
        }
    } else if good[0] {
        SolutionClass::Weak
    } else {
        SolutionClass::Invalid
    }
}

fn has_cycle(edges: &[Vec<usize>]) -> bool {
    // 0 unvisited, 1 on the current path, 2 finished
    let mut colour = vec![0u8; edges.len()];
    for root in 0..edges.len() {
        if colour[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        colour[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < edges[v].len() {
                let w = edges[v][*next];
                *next += 1;
                match colour[w] {
                    0 => {
                        colour[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                colour[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// Random tasks whose reachable space fits in `limit` states, generated
/// deterministically from `seed`.
pub fn small_tasks(seed: u64, count: usize, limit: usize) -> Vec<(GenTask, GroundedTask, StateSpace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = GenTask::random(&mut rng, Limits::default());
        let task = g.load();
        if let Some(space) = explore(&task, limit) {
            out.push((g, task, space));
        }
    }
    out
}

/// 0 unsolvable, 1 weak only, 2 strong-cyclic but not strong, 3 strong.
pub fn verdict(s: &Solvability) -> usize {
    s.weak as usize + s.strong_cyclic as usize + s.strong as usize
}

/// `per_verdict` tasks for each of the four oracle verdicts, in generation
/// order.
pub fn stratified_tasks(seed: u64, per_verdict: usize, limit: usize) -> Vec<(GenTask, GroundedTask, StateSpace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0; 4];
    let mut out = Vec::new();
    while counts.iter().any(|&c| c < per_verdict) {
        let g = GenTask::random(&mut rng, Limits::default());
        let task = g.load();
        let Some(space) = explore(&task, limit) else { continue };
        let v = verdict(&fixpoint_oracle(&space));
        if counts[v] < per_verdict {
            counts[v] += 1;
            out.push((g, task, space));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

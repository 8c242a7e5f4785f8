use std::collections::{HashMap, HashSet};

use super::model::*;
use super::sexpr::{read_one, Pos, SExpr};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":non-deterministic",
];

/// Constructs outside the supported dialect; rejected with a semantic error.
const UNSUPPORTED_FORMS: &[&str] = &[
    "when", "forall", "exists", "or", "imply", "=", "increase", "decrease", "assign",
    "scale-up", "scale-down", "either", "probabilistic",
];

const UNSUPPORTED_SECTIONS: &[&str] = &[
    ":constants",
    ":functions",
    ":derived",
    ":axiom",
    ":durative-action",
    ":constraints",
];

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], PddlError> {
    e.as_list()
        .ok_or_else(|| PddlError::syntax(e.pos(), &[what], &e.describe()))
}

fn expect_word<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, PddlError> {
    e.as_word()
        .ok_or_else(|| PddlError::syntax(e.pos(), &[what], &e.describe()))
}

fn expect_keyword(e: &SExpr, kw: &str) -> Result<(), PddlError> {
    match e.as_word() {
        Some(w) if w == kw => Ok(()),
        _ => Err(PddlError::syntax(e.pos(), &[kw], &e.describe())),
    }
}

fn is_variable(w: &str) -> bool {
    w.starts_with('?') && w.len() > 1
}

fn check_identifier(w: &str, pos: Pos) -> Result<(), PddlError> {
    if w.is_empty() || w.starts_with('?') || w.starts_with(':') || w == "-" {
        return Err(PddlError::syntax(pos, &["identifier"], &format!("`{w}`")));
    }
    Ok(())
}

/// `a b - t c` style list. Entries without an explicit type get `object`.
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<(String, String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if let Some(list) = item.as_list() {
            if list.first().and_then(SExpr::as_word) == Some("either") {
                return Err(PddlError::semantic(item.pos(), "`either` types are not supported"));
            }
            return Err(PddlError::syntax(item.pos(), &["name"], &item.describe()));
        }
        let w = item.as_word().unwrap();
        if w == "-" {
            let Some(ty) = items.get(i + 1) else {
                return Err(PddlError::syntax(item.pos(), &["type name"], "end of list"));
            };
            if let Some(l) = ty.as_list() {
                if l.first().and_then(SExpr::as_word) == Some("either") {
                    return Err(PddlError::semantic(ty.pos(), "`either` types are not supported"));
                }
            }
            let ty_name = expect_word(ty, "type name")?;
            check_identifier(ty_name, ty.pos())?;
            if pending.is_empty() {
                return Err(PddlError::syntax(item.pos(), &["name"], "`-`"));
            }
            for (name, pos) in pending.drain(..) {
                out.push((name, ty_name.to_string(), pos));
            }
            i += 2;
            continue;
        }
        if variables {
            if !is_variable(w) {
                return Err(PddlError::syntax(item.pos(), &["?variable"], &format!("`{w}`")));
            }
        } else {
            check_identifier(w, item.pos())?;
        }
        pending.push((w.to_string(), item.pos()));
        i += 1;
    }
    for (name, pos) in pending {
        out.push((name, OBJECT_TYPE.to_string(), pos));
    }
    Ok(out)
}

/// Parses a domain file into a validated [`DomainModel`].
pub fn parse_domain(text: &str) -> Result<DomainModel, PddlError> {
    let root = read_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    let mut it = items.iter();
    let head = it
        .next()
        .ok_or_else(|| PddlError::syntax(root.pos(), &["define"], "empty list"))?;
    expect_keyword(head, "define")?;
    let decl = it
        .next()
        .ok_or_else(|| PddlError::syntax(root.pos(), &["(domain NAME)"], "end of list"))?;
    let decl_items = expect_list(decl, "(domain NAME)")?;
    if decl_items.len() != 2 {
        return Err(PddlError::syntax(decl.pos(), &["(domain NAME)"], &decl.describe()));
    }
    expect_keyword(&decl_items[0], "domain")?;
    let name = expect_word(&decl_items[1], "domain name")?;
    check_identifier(name, decl_items[1].pos())?;

    let mut dp = DomainParser {
        model: DomainModel {
            name: name.to_string(),
            requirements: Vec::new(),
            types: Vec::new(),
            predicates: Vec::new(),
            actions: Vec::new(),
        },
        seen_sections: HashSet::new(),
    };

    for section in it {
        let sitems = expect_list(section, "section")?;
        let key = sitems
            .first()
            .and_then(SExpr::as_word)
            .ok_or_else(|| PddlError::syntax(section.pos(), &[":requirements", ":types", ":predicates", ":action"], &section.describe()))?;
        match key {
            ":requirements" | ":types" | ":predicates" => {
                if !dp.seen_sections.insert(key.to_string()) {
                    return Err(PddlError::semantic(section.pos(), format!("duplicate `{key}` section")));
                }
                if !dp.model.actions.is_empty() {
                    return Err(PddlError::syntax(section.pos(), &[":action", ")"], &format!("`{key}`")));
                }
                match key {
                    ":requirements" => dp.requirements(&sitems[1..])?,
                    ":types" => dp.types(&sitems[1..], section.pos())?,
                    _ => dp.predicates(&sitems[1..])?,
                }
            }
            ":action" => {
                let annotation = match section {
                    SExpr::List { annotation, .. } => annotation.as_deref(),
                    _ => None,
                };
                dp.action(&sitems[1..], section.pos(), annotation)?
            }
            k if UNSUPPORTED_SECTIONS.contains(&k) => {
                return Err(PddlError::semantic(section.pos(), format!("`{k}` is not supported")))
            }
            other => {
                return Err(PddlError::syntax(
                    sitems[0].pos(),
                    &[":requirements", ":types", ":predicates", ":action"],
                    &format!("`{other}`"),
                ))
            }
        }
    }
    Ok(dp.model)
}

struct DomainParser {
    model: DomainModel,
    seen_sections: HashSet<String>,
}

impl DomainParser {
    fn requirements(&mut self, items: &[SExpr]) -> Result<(), PddlError> {
        for item in items {
            let w = expect_word(item, "requirement keyword")?;
            if !w.starts_with(':') {
                return Err(PddlError::syntax(item.pos(), &[":requirement"], &format!("`{w}`")));
            }
            if !SUPPORTED_REQUIREMENTS.contains(&w) {
                return Err(PddlError::semantic(item.pos(), format!("requirement `{w}` is not supported")));
            }
            if !self.model.requirements.iter().any(|r| r == w) {
                self.model.requirements.push(w.to_string());
            }
        }
        Ok(())
    }

    fn types(&mut self, items: &[SExpr], pos: Pos) -> Result<(), PddlError> {
        let entries = typed_list(items, false)?;
        let mut declared: Vec<TypeDecl> = Vec::new();
        for (name, parent, p) in &entries {
            if name == OBJECT_TYPE {
                continue;
            }
            if declared.iter().any(|t| &t.name == name) {
                return Err(PddlError::semantic(*p, format!("type `{name}` declared twice")));
            }
            declared.push(TypeDecl {
                name: name.clone(),
                parent: parent.clone(),
            });
        }
        // parents that are only mentioned become children of `object`
        for (_, parent, _) in &entries {
            if parent != OBJECT_TYPE && !declared.iter().any(|t| &t.name == parent) {
                declared.push(TypeDecl {
                    name: parent.clone(),
                    parent: OBJECT_TYPE.to_string(),
                });
            }
        }
        self.model.types = declared;
        for t in &self.model.types {
            let mut cur = t.name.as_str();
            let mut steps = 0;
            while cur != OBJECT_TYPE {
                cur = self.model.parent_of(cur).unwrap_or(OBJECT_TYPE);
                steps += 1;
                if steps > self.model.types.len() {
                    return Err(PddlError::semantic(pos, format!("type hierarchy cycle through `{}`", t.name)));
                }
            }
        }
        Ok(())
    }

    fn check_type(&self, ty: &str, pos: Pos) -> Result<(), PddlError> {
        if self.model.has_type(ty) {
            Ok(())
        } else {
            Err(PddlError::semantic(pos, format!("undeclared type `{ty}`")))
        }
    }

    fn predicates(&mut self, items: &[SExpr]) -> Result<(), PddlError> {
        for item in items {
            let parts = expect_list(item, "(predicate ?args)")?;
            let name_expr = parts
                .first()
                .ok_or_else(|| PddlError::syntax(item.pos(), &["predicate name"], "empty list"))?;
            let name = expect_word(name_expr, "predicate name")?;
            check_identifier(name, name_expr.pos())?;
            if self.model.predicate(name).is_some() {
                return Err(PddlError::semantic(item.pos(), format!("predicate `{name}` declared twice")));
            }
            let mut params = Vec::new();
            for (var, ty, p) in typed_list(&parts[1..], true)? {
                self.check_type(&ty, p)?;
                params.push(TypedVar { name: var, ty });
            }
            self.model.predicates.push(PredicateDecl {
                name: name.to_string(),
                params,
            });
        }
        Ok(())
    }

    fn action(&mut self, items: &[SExpr], pos: Pos, annotation: Option<&str>) -> Result<(), PddlError> {
        let name_expr = items
            .first()
            .ok_or_else(|| PddlError::syntax(pos, &["action name"], "end of list"))?;
        let name = expect_word(name_expr, "action name")?;
        check_identifier(name, name_expr.pos())?;
        if self.model.action(name).is_some() {
            return Err(PddlError::semantic(name_expr.pos(), format!("action `{name}` declared twice")));
        }
        let group = match annotation {
            None => ActionGroup::default(),
            Some(g) => g
                .parse()
                .map_err(|e: String| PddlError::semantic(pos, e))?,
        };

        let mut params: Vec<TypedVar> = Vec::new();
        let mut precondition = Vec::new();
        let mut outcomes = vec![Vec::new()];
        let mut seen_keys: HashSet<&str> = HashSet::new();
        let mut i = 1;
        while i < items.len() {
            let key_expr = &items[i];
            let key = expect_word(key_expr, ":parameters, :precondition or :effect")?;
            let Some(value) = items.get(i + 1) else {
                return Err(PddlError::syntax(key_expr.pos(), &["value"], "end of list"));
            };
            if !seen_keys.insert(key) {
                return Err(PddlError::semantic(key_expr.pos(), format!("duplicate `{key}`")));
            }
            match key {
                ":parameters" => {
                    let list = expect_list(value, "(typed variables)")?;
                    for (var, ty, p) in typed_list(list, true)? {
                        self.check_type(&ty, p)?;
                        if params.iter().any(|v| v.name == var) {
                            return Err(PddlError::semantic(p, format!("parameter `{var}` repeated")));
                        }
                        params.push(TypedVar { name: var, ty });
                    }
                }
                ":precondition" => {
                    let scope: HashMap<&str, &str> =
                        params.iter().map(|v| (v.name.as_str(), v.ty.as_str())).collect();
                    precondition = self.condition(value, &scope)?;
                }
                ":effect" => {
                    let scope: HashMap<&str, &str> =
                        params.iter().map(|v| (v.name.as_str(), v.ty.as_str())).collect();
                    outcomes = self.effect(value, &scope)?;
                }
                other => {
                    return Err(PddlError::syntax(
                        key_expr.pos(),
                        &[":parameters", ":precondition", ":effect"],
                        &format!("`{other}`"),
                    ))
                }
            }
            i += 2;
        }
        self.model.actions.push(ActionSchema {
            name: name.to_string(),
            params,
            precondition,
            outcomes,
            group,
        });
        Ok(())
    }

    fn condition(&self, e: &SExpr, scope: &HashMap<&str, &str>) -> Result<Vec<Literal>, PddlError> {
        let list = expect_list(e, "condition")?;
        if list.is_empty() {
            return Ok(Vec::new());
        }
        if list[0].as_word() == Some("and") {
            let mut out = Vec::new();
            for c in &list[1..] {
                for lit in self.condition(c, scope)? {
                    if !out.contains(&lit) {
                        out.push(lit);
                    }
                }
            }
            return Ok(out);
        }
        Ok(vec![self.literal(e, scope)?])
    }

    /// Outcome list of an effect. `and` takes the cross product of its
    /// children, `oneof` concatenates them.
    fn effect(&self, e: &SExpr, scope: &HashMap<&str, &str>) -> Result<Vec<EffectSet>, PddlError> {
        let list = expect_list(e, "effect")?;
        if list.is_empty() {
            return Ok(vec![Vec::new()]);
        }
        match list[0].as_word() {
            Some("and") => {
                let mut acc: Vec<EffectSet> = vec![Vec::new()];
                for child in &list[1..] {
                    let branches = self.effect(child, scope)?;
                    let mut next = Vec::with_capacity(acc.len() * branches.len());
                    for a in &acc {
                        for b in &branches {
                            next.push(merge_effects(a, b, child.pos())?);
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            Some("oneof") => {
                if list.len() < 3 {
                    return Err(PddlError::semantic(e.pos(), "`oneof` needs at least two branches"));
                }
                let mut out = Vec::new();
                for child in &list[1..] {
                    out.extend(self.effect(child, scope)?);
                }
                Ok(out)
            }
            _ => Ok(vec![vec![self.literal(e, scope)?]]),
        }
    }

    fn literal(&self, e: &SExpr, scope: &HashMap<&str, &str>) -> Result<Literal, PddlError> {
        let list = expect_list(e, "literal")?;
        let head = list
            .first()
            .and_then(SExpr::as_word)
            .ok_or_else(|| PddlError::syntax(e.pos(), &["predicate name", "not"], &e.describe()))?;
        if head == "not" {
            if list.len() != 2 {
                return Err(PddlError::syntax(e.pos(), &["(not ATOM)"], &e.describe()));
            }
            let atom = self.atom(&list[1], scope)?;
            return Ok(Literal { atom, positive: false });
        }
        Ok(Literal {
            atom: self.atom(e, scope)?,
            positive: true,
        })
    }

    fn atom(&self, e: &SExpr, scope: &HashMap<&str, &str>) -> Result<Atom, PddlError> {
        let list = expect_list(e, "atom")?;
        let head = list
            .first()
            .and_then(SExpr::as_word)
            .ok_or_else(|| PddlError::syntax(e.pos(), &["predicate name"], &e.describe()))?;
        if UNSUPPORTED_FORMS.contains(&head) || head == "and" || head == "oneof" || head == "not" {
            return Err(PddlError::semantic(e.pos(), format!("`{head}` is not supported here")));
        }
        let pred = self
            .model
            .predicate(head)
            .ok_or_else(|| PddlError::semantic(e.pos(), format!("undeclared predicate `{head}`")))?;
        if pred.params.len() != list.len() - 1 {
            return Err(PddlError::semantic(
                e.pos(),
                format!(
                    "predicate `{head}` takes {} argument(s), got {}",
                    pred.params.len(),
                    list.len() - 1
                ),
            ));
        }
        let mut args = Vec::new();
        for (term, param) in list[1..].iter().zip(&pred.params) {
            let w = expect_word(term, "?variable")?;
            if !is_variable(w) {
                return Err(PddlError::semantic(term.pos(), format!("constant `{w}` in schema (constants are not supported)")));
            }
            let ty = scope
                .get(w)
                .ok_or_else(|| PddlError::semantic(term.pos(), format!("unbound variable `{w}`")))?;
            if !self.model.is_subtype(ty, &param.ty) {
                return Err(PddlError::semantic(
                    term.pos(),
                    format!("`{w}` has type `{ty}` but `{head}` expects `{}`", param.ty),
                ));
            }
            args.push(w.to_string());
        }
        Ok(Atom::new(head, args))
    }
}

fn merge_effects(a: &EffectSet, b: &EffectSet, pos: Pos) -> Result<EffectSet, PddlError> {
    let mut out = a.clone();
    for lit in b {
        if out.iter().any(|l| l.atom == lit.atom && l.positive != lit.positive) {
            return Err(PddlError::semantic(pos, format!("effect both adds and deletes {}", lit.atom)));
        }
        if !out.contains(lit) {
            out.push(lit.clone());
        }
    }
    Ok(out)
}

/// Parses a problem file. Names are checked against a domain by
/// [`ProblemModel::validate`] or directly via [`parse_problem_for`].
pub fn parse_problem(text: &str) -> Result<ProblemModel, PddlError> {
    parse_problem_inner(text, None)
}

/// Parses a problem and checks every object type, predicate and arity
/// against `domain`, reporting source positions.
pub fn parse_problem_for(text: &str, domain: &DomainModel) -> Result<ProblemModel, PddlError> {
    parse_problem_inner(text, Some(domain))
}

fn parse_problem_inner(text: &str, domain: Option<&DomainModel>) -> Result<ProblemModel, PddlError> {
    let root = read_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    let head = items
        .first()
        .ok_or_else(|| PddlError::syntax(root.pos(), &["define"], "empty list"))?;
    expect_keyword(head, "define")?;
    let decl = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(root.pos(), &["(problem NAME)"], "end of list"))?;
    let decl_items = expect_list(decl, "(problem NAME)")?;
    if decl_items.len() != 2 {
        return Err(PddlError::syntax(decl.pos(), &["(problem NAME)"], &decl.describe()));
    }
    expect_keyword(&decl_items[0], "problem")?;
    let name = expect_word(&decl_items[1], "problem name")?;
    check_identifier(name, decl_items[1].pos())?;

    let mut problem = ProblemModel {
        name: name.to_string(),
        domain_name: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut have_domain = false;
    let mut seen = HashSet::new();
    for section in &items[2..] {
        let sitems = expect_list(section, "section")?;
        let key = sitems
            .first()
            .and_then(SExpr::as_word)
            .ok_or_else(|| PddlError::syntax(section.pos(), &[":domain", ":objects", ":init", ":goal"], &section.describe()))?;
        if !seen.insert(key.to_string()) {
            return Err(PddlError::semantic(section.pos(), format!("duplicate `{key}` section")));
        }
        match key {
            ":domain" => {
                if sitems.len() != 2 {
                    return Err(PddlError::syntax(section.pos(), &["(:domain NAME)"], &section.describe()));
                }
                problem.domain_name = expect_word(&sitems[1], "domain name")?.to_string();
                have_domain = true;
            }
            ":requirements" => {}
            ":objects" => {
                for (obj, ty, p) in typed_list(&sitems[1..], false)? {
                    if problem.objects.iter().any(|o| o.name == obj) {
                        return Err(PddlError::semantic(p, format!("object `{obj}` declared twice")));
                    }
                    if let Some(d) = domain {
                        if !d.has_type(&ty) {
                            return Err(PddlError::semantic(p, format!("object `{obj}` has undeclared type `{ty}`")));
                        }
                    }
                    problem.objects.push(TypedObject { name: obj, ty });
                }
            }
            ":init" => {
                for item in &sitems[1..] {
                    let atom = ground_atom(item, &problem, domain)?;
                    if !problem.init.contains(&atom) {
                        problem.init.push(atom);
                    }
                }
            }
            ":goal" => {
                let g = sitems
                    .get(1)
                    .ok_or_else(|| PddlError::syntax(section.pos(), &["goal condition"], "end of list"))?;
                if sitems.len() > 2 {
                    return Err(PddlError::syntax(sitems[2].pos(), &[")"], &sitems[2].describe()));
                }
                problem.goal = ground_condition(g, &problem, domain)?;
            }
            k if k.starts_with(':') => {
                return Err(PddlError::semantic(section.pos(), format!("`{k}` is not supported")))
            }
            other => {
                return Err(PddlError::syntax(
                    sitems[0].pos(),
                    &[":domain", ":objects", ":init", ":goal"],
                    &format!("`{other}`"),
                ))
            }
        }
    }
    if !have_domain {
        return Err(PddlError::syntax(root.pos(), &["(:domain NAME)"], "no :domain section"));
    }
    Ok(problem)
}

fn ground_condition(
    e: &SExpr,
    problem: &ProblemModel,
    domain: Option<&DomainModel>,
) -> Result<Vec<Literal>, PddlError> {
    let list = expect_list(e, "condition")?;
    if list.is_empty() {
        return Ok(Vec::new());
    }
    if list[0].as_word() == Some("and") {
        let mut out = Vec::new();
        for c in &list[1..] {
            for lit in ground_condition(c, problem, domain)? {
                if !out.contains(&lit) {
                    out.push(lit);
                }
            }
        }
        return Ok(out);
    }
    if list[0].as_word() == Some("not") {
        if list.len() != 2 {
            return Err(PddlError::syntax(e.pos(), &["(not ATOM)"], &e.describe()));
        }
        return Ok(vec![Literal {
            atom: ground_atom(&list[1], problem, domain)?,
            positive: false,
        }]);
    }
    Ok(vec![Literal {
        atom: ground_atom(e, problem, domain)?,
        positive: true,
    }])
}

fn ground_atom(
    e: &SExpr,
    problem: &ProblemModel,
    domain: Option<&DomainModel>,
) -> Result<Atom, PddlError> {
    let list = expect_list(e, "ground atom")?;
    let head = list
        .first()
        .and_then(SExpr::as_word)
        .ok_or_else(|| PddlError::syntax(e.pos(), &["predicate name"], &e.describe()))?;
    if UNSUPPORTED_FORMS.contains(&head) || head == "not" || head == "and" {
        return Err(PddlError::semantic(e.pos(), format!("`{head}` is not supported here")));
    }
    let mut args = Vec::new();
    for t in &list[1..] {
        let w = expect_word(t, "object name")?;
        if is_variable(w) {
            return Err(PddlError::semantic(t.pos(), format!("variable `{w}` in ground atom")));
        }
        args.push(w.to_string());
    }
    let atom = Atom::new(head, args);
    if let Some(d) = domain {
        check_ground_atom(&atom, problem, d).map_err(|m| PddlError::semantic(e.pos(), m))?;
    }
    Ok(atom)
}

pub(crate) fn check_ground_atom(
    atom: &Atom,
    problem: &ProblemModel,
    domain: &DomainModel,
) -> Result<(), String> {
    let pred = domain
        .predicate(&atom.predicate)
        .ok_or_else(|| format!("undeclared predicate `{}`", atom.predicate))?;
    if pred.params.len() != atom.args.len() {
        return Err(format!(
            "predicate `{}` takes {} argument(s), got {}",
            atom.predicate,
            pred.params.len(),
            atom.args.len()
        ));
    }
    for (arg, param) in atom.args.iter().zip(&pred.params) {
        let obj = problem
            .objects
            .iter()
            .find(|o| &o.name == arg)
            .ok_or_else(|| format!("undeclared object `{arg}`"))?;
        if !domain.is_subtype(&obj.ty, &param.ty) {
            return Err(format!(
                "object `{arg}` of type `{}` does not fit `{}` parameter of `{}`",
                obj.ty, param.ty, atom.predicate
            ));
        }
    }
    Ok(())
}

impl ProblemModel {
    /// Checks object types, init atoms and goal literals against `domain`.
    pub fn validate(&self, domain: &DomainModel) -> Result<(), PddlError> {
        for o in &self.objects {
            if !domain.has_type(&o.ty) {
                return Err(PddlError::semantic_nopos(format!(
                    "object `{}` has undeclared type `{}`",
                    o.name, o.ty
                )));
            }
        }
        for atom in self.init.iter().chain(self.goal.iter().map(|l| &l.atom)) {
            check_ground_atom(atom, self, domain).map_err(PddlError::semantic_nopos)?;
        }
        Ok(())
    }
}

/// Parses a single ground literal such as `(okanxiety prepare)` or
/// `(not (distress))`. Used by configuration files.
pub fn parse_ground_literal(text: &str) -> Result<Literal, PddlError> {
    let e = read_one(text)?;
    let list = expect_list(&e, "literal")?;
    let (positive, atom_expr) = if list.first().and_then(SExpr::as_word) == Some("not") {
        if list.len() != 2 {
            return Err(PddlError::syntax(e.pos(), &["(not ATOM)"], &e.describe()));
        }
        (false, &list[1])
    } else {
        (true, &e)
    };
    let items = expect_list(atom_expr, "atom")?;
    let head = items
        .first()
        .and_then(SExpr::as_word)
        .ok_or_else(|| PddlError::syntax(atom_expr.pos(), &["predicate name"], &atom_expr.describe()))?;
    let args = items[1..]
        .iter()
        .map(|t| expect_word(t, "term").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Literal {
        atom: Atom::new(head, args),
        positive,
    })
}

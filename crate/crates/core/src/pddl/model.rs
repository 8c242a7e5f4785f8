use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const OBJECT_TYPE: &str = "object";

/// Behavioural category of an action; drives timeouts and default observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ActionGroup {
    #[default]
    RobotBehaviour,
    ProcedureUpdate,
    ImplicitSignal,
    ExplicitQuery,
}

impl ActionGroup {
    pub const ALL: [ActionGroup; 4] = [
        ActionGroup::RobotBehaviour,
        ActionGroup::ProcedureUpdate,
        ActionGroup::ImplicitSignal,
        ActionGroup::ExplicitQuery,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionGroup::RobotBehaviour => "robot-behaviour",
            ActionGroup::ProcedureUpdate => "procedure-update",
            ActionGroup::ImplicitSignal => "implicit-signal",
            ActionGroup::ExplicitQuery => "explicit-query",
        }
    }
}

impl fmt::Display for ActionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown action group `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// A `?var - type` pair. Variable names keep their leading `?`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedVar {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedVar>,
}

/// Predicate applied to terms. In schemas the terms are variables, in problems objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

/// One possible result of applying an action: literals made true or false.
pub type EffectSet = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub precondition: Vec<Literal>,
    /// Never empty; a single entry means the schema is deterministic.
    pub outcomes: Vec<EffectSet>,
    pub group: ActionGroup,
}

impl ActionSchema {
    pub fn is_deterministic(&self) -> bool {
        self.outcomes.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn has_type(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|t| t.name == ty)
    }

    pub fn parent_of(&self, ty: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|t| t.name == ty)
            .map(|t| t.parent.as_str())
    }

    /// `true` when `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE {
            return self.has_type(ty);
        }
        let mut cur = ty;
        // bounded walk; the parser rejects cycles
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedObject {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemModel {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedObject>,
    /// Positive ground atoms; everything else starts false.
    pub init: Vec<Atom>,
    pub goal: Vec<Literal>,
}

impl ProblemModel {
    pub fn objects_of<'a>(
        &'a self,
        domain: &'a DomainModel,
        ty: &'a str,
    ) -> impl Iterator<Item = &'a TypedObject> + 'a {
        self.objects
            .iter()
            .filter(move |o| domain.is_subtype(&o.ty, ty))
    }
}

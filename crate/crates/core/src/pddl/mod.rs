//! FOND PDDL frontend: parsing, canonical printing and grounding.
//!
//! The dialect is typed STRIPS with negative preconditions plus `oneof`
//! effects. Each `:action` may be preceded by a `;; @group: NAME` comment that
//! assigns its [`ActionGroup`]; without one the group is `robot-behaviour`.

mod ground;
mod model;
mod parser;
mod printer;
mod sexpr;

pub use ground::{ground, ActionId, GroundAction, GroundedTask, Lit, Outcome};
pub use model::*;
pub use parser::{parse_domain, parse_ground_literal, parse_problem, parse_problem_for};
pub use sexpr::Pos;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PddlError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: Pos,
        expected: Vec<String>,
        found: String,
    },
    #[error("semantic error{}: {message}", pos.map(|p| format!(" at {p}")).unwrap_or_default())]
    Semantic { pos: Option<Pos>, message: String },
    #[error("problem targets domain `{found}` but domain is `{expected}`")]
    MismatchedDomain { expected: String, found: String },
}

impl PddlError {
    pub(crate) fn syntax(pos: Pos, expected: &[&str], found: &str) -> Self {
        PddlError::Syntax {
            pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.to_string(),
        }
    }

    pub(crate) fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        PddlError::Semantic {
            pos: Some(pos),
            message: message.into(),
        }
    }

    pub(crate) fn semantic_nopos(message: impl Into<String>) -> Self {
        PddlError::Semantic {
            pos: None,
            message: message.into(),
        }
    }
}

/// Parses, checks and grounds a domain/problem pair in one go.
pub fn load_task(domain_text: &str, problem_text: &str) -> Result<GroundedTask, PddlError> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem_for(problem_text, &domain)?;
    ground(&domain, &problem)
}

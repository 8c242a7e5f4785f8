//! Canonical PDDL output. Printing then reparsing yields an equal model.

use std::fmt::{self, Write};

use super::model::*;

fn write_typed(out: &mut String, vars: &[TypedVar]) {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{} - {}", v.name, v.ty);
    }
}

fn write_conjunction(out: &mut String, lits: &[Literal]) {
    out.push_str("(and");
    for l in lits {
        let _ = write!(out, " {l}");
    }
    out.push(')');
}

impl fmt::Display for DomainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "(define (domain {})", self.name);
        if !self.requirements.is_empty() {
            let _ = writeln!(out, "  (:requirements {})", self.requirements.join(" "));
        }
        if !self.types.is_empty() {
            out.push_str("  (:types");
            for t in &self.types {
                let _ = write!(out, " {} - {}", t.name, t.parent);
            }
            out.push_str(")\n");
        }
        if !self.predicates.is_empty() {
            out.push_str("  (:predicates");
            for p in &self.predicates {
                let _ = write!(out, "\n    ({}", p.name);
                if !p.params.is_empty() {
                    out.push(' ');
                    write_typed(&mut out, &p.params);
                }
                out.push(')');
            }
            out.push_str(")\n");
        }
        for a in &self.actions {
            let _ = writeln!(out, "\n  ;; @group: {}", a.group);
            let _ = writeln!(out, "  (:action {}", a.name);
            out.push_str("    :parameters (");
            write_typed(&mut out, &a.params);
            out.push_str(")\n    :precondition ");
            write_conjunction(&mut out, &a.precondition);
            out.push_str("\n    :effect ");
            if a.outcomes.len() == 1 {
                write_conjunction(&mut out, &a.outcomes[0]);
            } else {
                out.push_str("(oneof");
                for o in &a.outcomes {
                    out.push_str("\n      ");
                    write_conjunction(&mut out, o);
                }
                out.push(')');
            }
            out.push_str(")\n");
        }
        out.push_str(")\n");
        f.write_str(&out)
    }
}

impl fmt::Display for ProblemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "(define (problem {})", self.name);
        let _ = writeln!(out, "  (:domain {})", self.domain_name);
        out.push_str("  (:objects");
        for o in &self.objects {
            let _ = write!(out, " {} - {}", o.name, o.ty);
        }
        out.push_str(")\n  (:init");
        for a in &self.init {
            let _ = write!(out, "\n    {a}");
        }
        out.push_str(")\n  (:goal ");
        write_conjunction(&mut out, &self.goal);
        out.push_str("))\n");
        f.write_str(&out)
    }
}

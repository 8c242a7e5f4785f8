//! The bundled clinic scenario: domain, problem, session config and scenarios.

use crate::pddl::{load_task, GroundedTask};

pub const CLINIC_DOMAIN: &str = include_str!("../data/clinic/domain.pddl");
pub const CLINIC_PROBLEM: &str = include_str!("../data/clinic/problem.pddl");
pub const CLINIC_CONFIG: &str = include_str!("../data/clinic/config.json");
pub const NOMINAL_SCENARIO: &str = include_str!("../data/clinic/scenarios/nominal.json");
pub const CHANNEL_DROP_SCENARIO: &str = include_str!("../data/clinic/scenarios/channel-drop.json");
pub const CONTRADICTION_SCENARIO: &str = include_str!("../data/clinic/scenarios/contradiction.json");

pub fn clinic_task() -> GroundedTask {
    load_task(CLINIC_DOMAIN, CLINIC_PROBLEM).expect("bundled clinic task is valid")
}

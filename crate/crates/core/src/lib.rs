//! Planning-driven interaction engine for a social robot that supports a child
//! through a clinical procedure.
//!
//! * [`pddl`] parses and grounds FOND planning domains.
//! * [`planner`] synthesizes and verifies branched (strong / strong-cyclic) plans.
//! * [`executive`] runs the turn loop: channels, outcome selection,
//!   reconciliation, timeouts, defaults and stop.
//! * [`sim`] stands in for the patient and vision pipeline.
//! * [`service`] hosts sessions over HTTP, persists event logs and backs the CLI.

pub mod bundled;
pub mod executive;
pub mod pddl;
pub mod planner;
pub mod service;
pub mod sim;
pub mod state;

pub use state::{FluentId, State};

//! Stand-in for the child and the vision pipeline, and a headless driver
//! that closes the loop around an executive session.

mod patient;
mod scenario;

pub use crate::executive::SimulatedSignals;
pub use patient::{ActivityEffect, Patient, PatientModel, Shift};
pub use scenario::{run_scenario, simulate, Fault, FaultInjection, Scenario, ScriptedReading, ScriptedTurn, SimRun};

use thiserror::Error;

use crate::executive::ExecError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("scenario does not fit the task: {0}")]
    ScenarioMismatch(String),
    #[error("action {0} is not part of the session's task")]
    UnknownAction(String),
    #[error("bad scenario file: {0}")]
    Parse(String),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[cfg(test)]
mod tests;

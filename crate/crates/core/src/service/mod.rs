//! Hosting: the HTTP API, append-only event logs with crash recovery, and the
//! command-line front end.

pub mod api;
pub mod cli;
pub mod persist;

use thiserror::Error;

use crate::executive::ExecError;
use crate::sim::SimError;

pub use api::{router, serve, AppState, Prompt, PromptKind, PromptStatus, ServerConfig};
pub use persist::{load_session, parse_log, read_log, FileSink, ParsedLog, Recovered};

#[derive(Debug, Error)]
pub enum ServiceError {
    /// A log line that is neither valid nor a torn final write.
    #[error("corrupt event log at line {line}: {message}")]
    CorruptLog { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

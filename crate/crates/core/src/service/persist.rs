//! Append-only JSON-lines event logs and crash recovery by replay.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::ServiceError;
use crate::executive::{replay, Event, EventSink, ManualClock, Session, SessionSpec};

/// Appends each event as one line and flushes it before returning.
pub struct FileSink {
    path: PathBuf,
    file: File,
}

impl FileSink {
    pub fn append(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(FileSink {
            path: path.to_path_buf(),
            file,
        })
    }
}

impl EventSink for FileSink {
    fn emit(&mut self, _event: &Event, line: &str) {
        let mut buf = String::with_capacity(line.len() + 1);
        buf.push_str(line);
        buf.push('\n');
        if let Err(e) = self.file.write_all(buf.as_bytes()).and_then(|_| self.file.flush()) {
            log::error!("cannot append to {}: {e}", self.path.display());
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLog {
    pub events: Vec<Event>,
    /// Byte length of the complete lines kept.
    pub valid_len: usize,
    /// An unterminated, unparsable final line was dropped.
    pub torn_tail: bool,
    /// The last kept line has no trailing newline.
    pub unterminated: bool,
}

/// Parses a log. Only an unterminated final line may be malformed; it is
/// dropped. Any other bad line is `CorruptLog`.
pub fn parse_log(text: &str) -> Result<ParsedLog, ServiceError> {
    let mut events = Vec::new();
    let mut offset = 0;
    let mut valid_len = 0;
    let mut torn_tail = false;
    let mut unterminated = false;
    for (i, chunk) in text.split_inclusive('\n').enumerate() {
        offset += chunk.len();
        let terminated = chunk.ends_with('\n');
        let line = chunk.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            valid_len = offset;
            continue;
        }
        match Event::from_line(line) {
            Ok(e) => {
                events.push(e);
                valid_len = offset;
                unterminated = !terminated;
            }
            Err(_) if !terminated => {
                log::warn!("discarding torn final log line {}", i + 1);
                torn_tail = true;
            }
            Err(e) => {
                return Err(ServiceError::CorruptLog {
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(ParsedLog {
        events,
        valid_len,
        torn_tail,
        unterminated,
    })
}

pub fn read_log(path: &Path) -> Result<ParsedLog, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ServiceError::Io(format!("{}: {e}", path.display())))?;
    parse_log(&text)
}

pub struct Recovered {
    pub session: Arc<Session>,
    pub clock: Arc<ManualClock>,
    pub torn_tail: bool,
    /// Events regenerated past the end of the log and appended to it.
    pub appended: usize,
}

/// Rebuilds a session from the log at `path` and keeps appending to it.
/// An empty (or missing) log starts a fresh session from `fresh`. The
/// returned clock is still manual; call `run_free` to resume real time.
pub fn load_session(path: &Path, fresh: &SessionSpec) -> Result<Recovered, ServiceError> {
    let parsed = if path.exists() {
        read_log(path)?
    } else {
        ParsedLog {
            events: Vec::new(),
            valid_len: 0,
            torn_tail: false,
            unterminated: false,
        }
    };
    if parsed.events.is_empty() {
        let _ = std::fs::remove_file(path);
        let clock = Arc::new(ManualClock::new(0));
        let sink = FileSink::append(path).map_err(|e| ServiceError::Io(e.to_string()))?;
        let session = Session::start_with_sinks(fresh.clone(), clock.clone(), vec![Box::new(sink)])?;
        return Ok(Recovered {
            session,
            clock,
            torn_tail: parsed.torn_tail,
            appended: 0,
        });
    }
    let out = replay(&parsed.events)?;
    if let Some(d) = &out.divergence {
        return Err(ServiceError::CorruptLog {
            line: d.index + 1,
            message: "log does not replay".into(),
        });
    }
    // drop the torn tail, then add whatever the replay completed beyond it
    let file = OpenOptions::new().write(true).open(path).map_err(|e| ServiceError::Io(e.to_string()))?;
    file.set_len(parsed.valid_len as u64).map_err(|e| ServiceError::Io(e.to_string()))?;
    drop(file);
    let mut sink = FileSink::append(path).map_err(|e| ServiceError::Io(e.to_string()))?;
    if parsed.unterminated {
        sink.file.write_all(b"\n").map_err(|e| ServiceError::Io(e.to_string()))?;
    }
    for e in &out.extra {
        sink.emit(e, &e.to_line());
    }
    out.session.add_sink(Box::new(sink));
    Ok(Recovered {
        appended: out.extra.len(),
        session: out.session,
        clock: out.clock,
        torn_tail: parsed.torn_tail,
    })
}

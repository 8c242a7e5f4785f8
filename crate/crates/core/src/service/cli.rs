//! `carebot` subcommands. Exit codes: 0 success, 1 a negative answer
//! (unsolvable, invalid policy, divergent replay), 2 bad input or usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::api::{serve, AppState, ServerConfig};
use super::persist::parse_log;
use crate::executive::{replay, SessionConfig, SessionSpec};
use crate::pddl::load_task;
use crate::planner::{solve_from, unfold, verify_policy, PlanError, PolicyDocument, Semantics, SolutionClass, SolverConfig};
use crate::sim::{simulate, Scenario};

const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Parser)]
#[command(name = "carebot", version, about = "FOND planning and plan execution for robot-assisted procedures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a branched plan and print it.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long, default_value = "strong-cyclic")]
        semantics: Semantics,
        /// Write the policy as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        max_expansions: usize,
    },
    /// Classify a policy file against a task.
    Verify {
        domain: PathBuf,
        problem: PathBuf,
        policy: PathBuf,
    },
    /// Run a scenario against a simulated patient and emit the event log.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the log here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a logged session and compare it line by line.
    Replay { transcript: PathBuf },
    /// Serve the HTTP API.
    Serve {
        /// Overrides PORT; 8080 when neither is set.
        #[arg(long)]
        port: Option<u16>,
        /// Session config used when a create request has none.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides LOG_DIR.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Plan {
            domain,
            problem,
            semantics,
            out: policy_out,
            max_expansions,
        } => {
            let task = load_task(&read(&domain)?, &read(&problem)?).map_err(input)?;
            let config = SolverConfig {
                semantics,
                max_expansions,
            };
            let policy = match solve_from(&task, &task.init, &config) {
                Ok(p) => p,
                Err(e @ (PlanError::Unsolvable(_) | PlanError::ResourceLimit { .. })) => {
                    let _ = writeln!(out, "unsolvable: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(input(e)),
            };
            let _ = writeln!(out, "class: {}", policy.class);
            let _ = writeln!(out, "entries: {}", policy.len());
            match unfold(&task, &policy, 1_000) {
                Ok(plan) => {
                    let _ = write!(out, "{}", plan.render());
                }
                Err(e) => {
                    let _ = writeln!(out, "(tree not shown: {e})");
                }
            }
            if let Some(path) = policy_out {
                write_file(&path, &PolicyDocument::from_policy(&task, &policy).to_json())?;
            }
            Ok(0)
        }
        Command::Verify { domain, problem, policy } => {
            let task = load_task(&read(&domain)?, &read(&problem)?).map_err(input)?;
            let doc = PolicyDocument::from_json(&read(&policy)?).map_err(input)?;
            let class = match doc.to_policy(&task) {
                Ok(p) => verify_policy(&task, &p),
                Err(e) => {
                    let _ = writeln!(out, "{e}");
                    SolutionClass::Invalid
                }
            };
            let _ = writeln!(out, "{class}");
            Ok(if class == SolutionClass::Invalid { 1 } else { 0 })
        }
        Command::Simulate {
            scenario,
            seed,
            out: log_out,
        } => {
            let scenario = Scenario::from_json(&read(&scenario)?).map_err(input)?;
            let run = simulate(&scenario, seed).map_err(input)?;
            match log_out {
                Some(path) => {
                    write_file(&path, &run.log_text())?;
                    let _ = writeln!(
                        out,
                        "{}: {} events, {} turns, {}",
                        scenario.name,
                        run.transcript.len() + 1,
                        run.session.turn(),
                        run.session.phase()
                    );
                }
                None => {
                    let _ = write!(out, "{}", run.log_text());
                }
            }
            Ok(0)
        }
        Command::Replay { transcript } => {
            let parsed = parse_log(&read(&transcript)?).map_err(input)?;
            let outcome = replay(&parsed.events).map_err(input)?;
            match &outcome.divergence {
                None if outcome.extra.is_empty() => {
                    let _ = writeln!(out, "identical ({} events)", outcome.matched);
                    Ok(0)
                }
                None => {
                    let _ = writeln!(out, "diverged: replay produced {} extra events", outcome.extra.len());
                    Ok(1)
                }
                Some(d) => {
                    let _ = writeln!(out, "diverged at event {}", d.index);
                    let _ = writeln!(out, "  logged:   {}", d.expected);
                    let _ = writeln!(out, "  replayed: {}", d.actual);
                    Ok(1)
                }
            }
        }
        Command::Serve { port, config, log_dir } => {
            let port = match port {
                Some(p) => p,
                None => match std::env::var("PORT") {
                    Ok(v) => v.parse().map_err(|_| input(format!("PORT `{v}` is not a port number")))?,
                    Err(_) => DEFAULT_PORT,
                },
            };
            let log_dir = log_dir.or_else(|| std::env::var_os("LOG_DIR").map(PathBuf::from));
            let mut default_spec = SessionSpec::clinic();
            if let Some(path) = config {
                default_spec.config = SessionConfig::load(&path).map_err(input)?;
            }
            if let Some(dir) = &log_dir {
                std::fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            }
            let state = AppState::new(ServerConfig {
                default_spec,
                log_dir,
                autocomplete: true,
            });
            for (id, result) in state.recover() {
                match result {
                    Ok(()) => log::info!("recovered session {id}"),
                    Err(e) => log::warn!("session {id} not recovered: {e}"),
                }
            }
            let runtime = tokio::runtime::Runtime::new().map_err(input)?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await.map_err(input)?;
                let _ = writeln!(out, "listening on {}", listener.local_addr().map_err(input)?);
                let _ = out.flush();
                serve(listener, state).await.map_err(input)
            })?;
            Ok(0)
        }
    }
}

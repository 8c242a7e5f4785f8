// Writes a simulated session to a JSON-lines log, reads it back and replays
// it, then shows what a tampered log looks like to the replayer.

use carebot::executive::replay;
use carebot::service::parse_log;
use carebot::sim::{simulate, Scenario};

fn main() {
    let run = simulate(&Scenario::nominal(), Some(99)).expect("scenario runs");
    let path = std::env::temp_dir().join("carebot-replay-example.jsonl");
    std::fs::write(&path, run.log_text()).expect("log written");
    println!("wrote {} events to {}", run.transcript.len() + 1, path.display());

    let text = std::fs::read_to_string(&path).expect("log read");
    let events = parse_log(&text).expect("log parses").events;
    let out = replay(&events).expect("replays");
    println!("identical: {}  states: {}", out.identical(), out.trajectory().len());

    let tampered = text.replacen("\"outcome\":0", "\"outcome\":1", 1);
    let out = replay(&parse_log(&tampered).expect("still parses").events).expect("replays");
    if let Some(d) = out.divergence {
        println!("tampered log diverges at event {}", d.index);
        println!("  logged   {}", &d.expected[..d.expected.len().min(100)]);
        println!("  replayed {}", &d.actual[..d.actual.len().min(100)]);
    }
    let _ = std::fs::remove_file(path);
}

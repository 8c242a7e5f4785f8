// Runs the nominal scenario against the simulated patient and prints one
// line per turn.

use carebot::executive::EventKind;
use carebot::sim::{simulate, Scenario};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok());
    let run = simulate(&Scenario::nominal(), seed).expect("scenario runs");
    let mut action = String::new();
    for e in &run.transcript {
        match &e.kind {
            EventKind::ActionRequest(r) => action = r.action.clone(),
            EventKind::Observation { bundle } => {
                let readings: Vec<String> = bundle.readings.iter().map(|r| format!("{}={}", r.fluent, r.value)).collect();
                let anxiety = bundle.affect.map(|a| a.anxiety.to_string()).unwrap_or_default();
                print!("turn {:>2} t={:>6}ms  {action:<42} {anxiety:<7} {}", e.turn, e.t, readings.join(" "));
            }
            EventKind::TimeoutDefault { bundle } => {
                print!("turn {:>2} t={:>6}ms  {action:<42} default {}", e.turn, e.t, bundle.label.as_deref().unwrap_or(""));
            }
            EventKind::OutcomeChosen { outcome, score, .. } => println!("  -> outcome {outcome} (score {score})"),
            EventKind::Reconcile { rules, .. } => println!("  -> reconciled by {rules:?}"),
            EventKind::Done { .. } => println!("done at turn {}", e.turn),
            EventKind::Stop { reason } => println!("stopped: {reason:?}"),
            _ => {}
        }
    }
}

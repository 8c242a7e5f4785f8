// Runs the bundled fault scenarios and counts what the executive did about
// each fault.

use std::collections::BTreeMap;

use carebot::bundled::{CHANNEL_DROP_SCENARIO, CONTRADICTION_SCENARIO, NOMINAL_SCENARIO};
use carebot::sim::{simulate, Scenario};

fn main() {
    for text in [NOMINAL_SCENARIO, CHANNEL_DROP_SCENARIO, CONTRADICTION_SCENARIO] {
        let scenario = Scenario::from_json(text).expect("bundled scenario");
        let run = simulate(&scenario, None).expect("scenario runs");
        let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &run.transcript {
            *kinds.entry(e.kind.name()).or_default() += 1;
        }
        println!(
            "{:<14} faults={} turns={} phase={}",
            scenario.name,
            scenario.faults.len(),
            run.session.turn(),
            run.session.phase()
        );
        for (k, n) in kinds {
            println!("    {k:<16} {n}");
        }
    }
}

// Serializes a policy, reloads it, and shows how the verifier grades it
// before and after removing entries.

use carebot::bundled::clinic_task;
use carebot::planner::{solve, verify_policy, PolicyDocument, Semantics};

fn main() {
    let task = clinic_task();
    let policy = solve(&task, Semantics::StrongCyclic).expect("solvable");
    let json = PolicyDocument::from_policy(&task, &policy).to_json();
    println!("policy document: {} bytes, {} entries", json.len(), policy.len());

    let reloaded = PolicyDocument::from_json(&json).and_then(|d| d.to_policy(&task)).expect("reloads");
    println!("reloaded: {}", verify_policy(&task, &reloaded));

    let mut partial = reloaded.clone();
    let keep: Vec<_> = partial.entries.keys().take(partial.len() / 2).cloned().collect();
    partial.entries.retain(|s, _| keep.contains(s));
    println!("half the entries: {}", verify_policy(&task, &partial));

    let mut only_init = reloaded;
    only_init.entries.retain(|s, _| *s == task.init);
    println!("initial state only: {}", verify_policy(&task, &only_init));

    match solve(&task, Semantics::Strong) {
        Ok(p) => println!("strong: {}", verify_policy(&task, &p)),
        Err(e) => println!("strong: {e}"),
    }
}

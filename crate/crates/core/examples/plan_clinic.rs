// Plans the bundled clinic task and prints the branched plan.

use carebot::planner::{solve, unfold, Semantics};

fn main() {
    let task = carebot::bundled::clinic_task();
    let policy = solve(&task, Semantics::StrongCyclic).expect("clinic task is solvable");
    let plan = unfold(&task, &policy, 200).expect("plan unfolds");
    println!("class: {}  entries: {}  nodes: {}", policy.class, policy.len(), plan.nodes.len());
    print!("{}", plan.render());
}

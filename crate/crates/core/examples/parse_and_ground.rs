// Parses the bundled clinic domain and problem, reprints one action and
// summarises the grounded task.

use carebot::bundled::{CLINIC_DOMAIN, CLINIC_PROBLEM};
use carebot::pddl::{ground, parse_domain, parse_problem_for, ActionGroup};

fn main() {
    let domain = parse_domain(CLINIC_DOMAIN).expect("domain parses");
    let problem = parse_problem_for(CLINIC_PROBLEM, &domain).expect("problem parses");
    println!("domain {}: {} types, {} predicates, {} actions", domain.name, domain.types.len(), domain.predicates.len(), domain.actions.len());
    println!("problem {}: {} objects, {} init atoms, {} goal literals", problem.name, problem.objects.len(), problem.init.len(), problem.goal.len());

    let task = ground(&domain, &problem).expect("grounds");
    println!("grounded: {} fluents, {} actions", task.fluents.len(), task.actions.len());
    for group in ActionGroup::ALL {
        let n = task.actions.iter().filter(|a| a.group == group).count();
        println!("  {group:<17} {n}");
    }
    let nondet = task.actions.iter().filter(|a| !a.is_deterministic()).count();
    println!("  non-deterministic {nondet}");

    let reprinted = domain.to_string();
    let start = reprinted.find("(:action do-activity").expect("action is printed");
    let end = reprinted[start..].find("\n\n").map_or(reprinted.len(), |i| start + i);
    println!("\n{}", &reprinted[start..end]);
    assert_eq!(parse_domain(&reprinted).expect("reprint parses"), domain);
}

//! Exact branch and bound, HEFT and the GA on Medium_6T, checked against
//! brute-force enumeration.
//!
//! `cargo run --release --example classical_baselines`

use wfqubo::classical::{
    solve_exact, solve_exhaustive_oracle, solve_ga_traced, solve_heft, upward_ranks, ExactParams, GaParams,
};
use wfqubo::model::{builtin_instance, BuiltinInstance, ConstraintSet};

fn main() {
    let inst = builtin_instance(BuiltinInstance::Medium6T);
    let c = ConstraintSet::all();

    let oracle = solve_exhaustive_oracle(&inst, &c).unwrap();
    println!("enumeration: {:?}", oracle.makespan);

    let exact = solve_exact(&inst, &c, &ExactParams::default());
    println!(
        "exact:       {:?} ({})",
        exact.makespan,
        exact.tag.as_deref().unwrap_or("-")
    );

    let admissible: Vec<Vec<usize>> = (0..inst.n_tasks()).map(|i| inst.allowed_nodes(i, &c)).collect();
    let ranks: Vec<String> = upward_ranks(&inst, &c, &admissible)
        .iter()
        .map(|r| format!("{r:.2}"))
        .collect();
    println!("heft ranks:  {}", ranks.join(" "));
    let heft = solve_heft(&inst, &c);
    println!("heft:        {:?}", heft.makespan);

    let (ga, trace) = solve_ga_traced(&inst, &c, &GaParams::default().with_seed(1)).unwrap();
    let first_best = trace.iter().position(|&f| f == trace[trace.len() - 1]).unwrap();
    println!("ga:          {:?} (best found by generation {first_best})", ga.makespan);

    if let Some(schedule) = &exact.schedule {
        for (task, e) in inst.tasks().iter().zip(&schedule.entries) {
            println!(
                "  {} on {} [{:.2}, {:.2})",
                task.id,
                inst.nodes()[e.node].id,
                e.start,
                e.finish
            );
        }
    }
}

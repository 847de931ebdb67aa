//! Runs the scaling plan and prints feasibility per task count for each
//! solver.
//!
//! `cargo run --release --example scaling [base_seed] [out_dir]`

use std::path::PathBuf;

use wfqubo::experiment::{run_experiment, ExperimentPlan};
use wfqubo::model::SCALING_SIZES;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("base seed"));
    let out = args.next().map_or_else(|| PathBuf::from("results/exp3"), PathBuf::from);
    let plan = ExperimentPlan::scaling(seed);
    let outcome = run_experiment(&plan, &out).expect("experiment runs");

    print!("{:<20}", "solver");
    for n in SCALING_SIZES {
        print!("{:>8}", format!("n={n}"));
    }
    println!();
    for entry in &plan.solvers {
        let name = entry.solver.name();
        print!("{name:<20}");
        for n in SCALING_SIZES {
            let prefix = format!("scale{n}_");
            let runs: Vec<_> = outcome
                .rows
                .iter()
                .filter(|r| r.solver == name && r.instance.starts_with(&prefix))
                .collect();
            let ok = runs.iter().filter(|r| r.feasible).count();
            print!("{:>8}", format!("{ok}/{}", runs.len()));
        }
        println!();
    }
}

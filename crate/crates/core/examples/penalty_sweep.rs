//! Runs the exp1 plan and writes its CSV and plot files.
//!
//! `cargo run --release --example penalty_sweep [out_dir]`

use std::path::PathBuf;

use wfqubo::experiment::{run_experiment, ExperimentPlan};

fn main() {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("results/exp1"), PathBuf::from);
    let outcome = run_experiment(&ExperimentPlan::penalty_sweep(), &out).expect("experiment runs");
    for s in &outcome.summary {
        let span = s.mean_makespan.map_or_else(|| "-".to_string(), |m| format!("{m:.3}"));
        println!(
            "{:<10} {:<14} {:<20} {}/{} {span}",
            s.instance, s.stage_or_alpha, s.solver, s.feasible_runs, s.runs
        );
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
}

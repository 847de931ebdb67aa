//! Runs the exp0 plan and writes its CSV and plot files.
//!
//! `cargo run --release --example progressive [out_dir]`

use std::path::PathBuf;

use wfqubo::experiment::{run_experiment, ExperimentPlan};

fn main() {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("results/exp0"), PathBuf::from);
    let outcome = run_experiment(&ExperimentPlan::progressive(), &out).expect("experiment runs");
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

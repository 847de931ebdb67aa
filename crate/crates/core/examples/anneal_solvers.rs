//! The three annealers on the Medium_6T reference: single-run SA across the
//! penalty multipliers, then the randomized ensemble and the layered schedule.
//!
//! `cargo run --release --example anneal_solvers [seeds]`

use wfqubo::anneal::{solve_layered, solve_multi_sa, AnnealParams, LayeredParams, MultiSaParams, QuboProblem};
use wfqubo::model::{builtin_instance, BuiltinInstance, ConstraintSet};
use wfqubo::report::SolverReport;

fn line(r: &SolverReport) -> String {
    match r.makespan {
        Some(m) => format!("feasible makespan {m:.3} energy {:.2}", r.energy.unwrap()),
        None => format!("infeasible ({} violations)", r.violations.len()),
    }
}

fn main() {
    let seeds: u64 = std::env::args().nth(1).map_or(10, |s| s.parse().expect("seed count"));
    let inst = builtin_instance(BuiltinInstance::Medium6T);
    let problem = QuboProblem::new(&inst, ConstraintSet::all());

    println!("single-run SA, {seeds} seeds per multiplier");
    for alpha in [0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let runs: Vec<SolverReport> = (0..seeds)
            .map(|s| problem.solve_sa(alpha, &AnnealParams::with_seed(s)))
            .collect();
        let ok: Vec<f64> = runs.iter().filter_map(|r| r.makespan).collect();
        let mean = if ok.is_empty() {
            "-".to_string()
        } else {
            format!("{:.3}", ok.iter().sum::<f64>() / ok.len() as f64)
        };
        println!("  alpha {alpha:<5} feasible {}/{seeds}  mean makespan {mean}", ok.len());
    }

    let multi = solve_multi_sa(&problem, &MultiSaParams::default());
    println!("multi-read ensemble: {}", line(&multi));
    let layered = solve_layered(&problem, &LayeredParams::default());
    println!("layered schedule:    {}", line(&layered));
}

//! Experiment harness: expands a plan into solver calls, runs them (in
//! parallel when asked), and writes `results.csv`, `summary.csv` and
//! plot-ready `.dat` files.
//!
//! Cells are collected in plan order regardless of execution order, so the
//! output only depends on the plan. With `Timing::Disabled` the results file
//! is byte-identical across runs.

mod output;
mod plan;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::anneal::{solve_layered, solve_multi_sa, AnnealParams, LayeredParams, MultiSaParams, QuboProblem};
use crate::classical::{solve_exact, solve_ga, solve_heft, ExactParams};
use crate::report::{elapsed_ms, SolverReport};
use crate::strategy::{run_strategy, StrategyConfig};

pub use output::{makespan_gap, summarize, write_results, GapError, SummaryRow, RESULTS_HEADER};
pub use plan::{
    Cell, ExperimentId, ExperimentPlan, PlanError, Setting, SolverEntry, SolverKind, Timing, FULL_KEY, PENALTY_SWEEP,
    REFERENCE_KEY,
};

/// One solver call, flattened for CSV output. Optional metrics are absent
/// for infeasible runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub instance: String,
    pub stage_or_alpha: String,
    pub solver: String,
    pub seed: u64,
    pub feasible: bool,
    pub makespan_s: Option<f64>,
    pub utilization: Option<f64>,
    pub runtime_ms: f64,
    pub energy: Option<f64>,
    pub tag: Option<String>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("invalid GA parameters: {0}")]
    Ga(#[from] crate::classical::GaError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

fn solve_cell(plan: &ExperimentPlan, cell: &Cell) -> SolverReport {
    let instance = &plan.instances[cell.instance];
    let setting = &plan.settings[cell.setting];
    let constraints = setting.constraints;
    let alpha = setting.alpha.unwrap_or(plan.default_alpha);
    let seed = cell.seed;
    let problem = QuboProblem::new(instance, constraints);

    let started = Instant::now();
    let mut report = match &plan.solvers[cell.solver].solver {
        SolverKind::Exact => solve_exact(
            instance,
            &constraints,
            &ExactParams {
                timeout: plan.exact_timeout,
            },
        ),
        SolverKind::Heft => solve_heft(instance, &constraints),
        SolverKind::Ga => solve_ga(instance, &constraints, &plan.ga.clone().with_seed(seed))
            .expect("GA parameters validated with the plan"),
        SolverKind::QuboSa => problem.solve_sa(alpha, &AnnealParams::with_seed(seed)),
        SolverKind::QuboMultiSa => solve_multi_sa(
            &problem,
            &MultiSaParams {
                seed,
                ..plan.multi_sa.clone()
            },
        ),
        SolverKind::QuboLayered => solve_layered(
            &problem,
            &LayeredParams {
                seed,
                ..plan.layered.clone()
            },
        ),
        SolverKind::Strategy(config) => {
            let config = match config {
                StrategyConfig::AdaptivePenalty { factor, .. } => StrategyConfig::AdaptivePenalty {
                    factor: *factor,
                    exact_timeout: plan.exact_timeout,
                },
                other => other.clone(),
            };
            run_strategy(&config, instance, &constraints, seed)
        }
    };
    report.runtime_ms = elapsed_ms(started);
    report
}

fn to_row(plan: &ExperimentPlan, cell: &Cell, report: SolverReport) -> ResultRow {
    ResultRow {
        experiment: plan.id.to_string(),
        instance: plan.instances[cell.instance].name().to_string(),
        stage_or_alpha: plan.settings[cell.setting].key.clone(),
        solver: plan.solvers[cell.solver].solver.name().to_string(),
        seed: cell.seed,
        feasible: report.feasible,
        makespan_s: report.makespan,
        utilization: report.utilization,
        runtime_ms: match plan.timing {
            Timing::Wall => report.runtime_ms,
            Timing::Disabled => 0.0,
        },
        energy: report.energy,
        tag: report.tag,
    }
}

/// Runs every cell of the plan and returns the rows in plan order.
pub fn run_cells(plan: &ExperimentPlan) -> Result<Vec<ResultRow>, ExperimentError> {
    plan.validate()?;
    plan.ga.validate()?;
    let cells = plan.cells();
    let run = |cell: &Cell| to_row(plan, cell, solve_cell(plan, cell));
    Ok(if plan.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    })
}

/// Runs the plan and writes all output files into `out_dir` (created if
/// missing).
pub fn run_experiment(plan: &ExperimentPlan, out_dir: &Path) -> Result<ExperimentOutcome, ExperimentError> {
    plan.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let rows = run_cells(plan)?;
    let summary = summarize(&rows);
    let files = output::write_all(plan, &rows, &summary, out_dir)?;
    Ok(ExperimentOutcome { rows, summary, files })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_instance, BuiltinInstance};

    fn small_plan() -> ExperimentPlan {
        let mut plan = ExperimentPlan::validation().with_timing(Timing::Disabled);
        plan.instances = vec![builtin_instance(BuiltinInstance::W1)];
        plan.solvers = vec![
            SolverEntry::new(SolverKind::Heft, 1),
            SolverEntry::new(SolverKind::QuboSa, 2),
        ];
        plan
    }

    #[test]
    fn rows_follow_plan_order() {
        let rows = run_cells(&small_plan()).unwrap();
        let order: Vec<(&str, u64)> = rows.iter().map(|r| (r.solver.as_str(), r.seed)).collect();
        assert_eq!(order, [("heft", 0), ("qubo-sa", 0), ("qubo-sa", 1)]);
        assert!(rows.iter().all(|r| r.runtime_ms == 0.0));
    }

    #[test]
    fn parallel_and_serial_agree() {
        let mut plan = small_plan();
        let a = run_cells(&plan).unwrap();
        plan.parallel = false;
        assert_eq!(a, run_cells(&plan).unwrap());
    }
}

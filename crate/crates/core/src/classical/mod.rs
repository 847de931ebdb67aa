//! Classical baselines. All of them search over task→node mappings and are
//! scored through the canonical decoder, so their makespans are directly
//! comparable with the QUBO solvers'.

mod exact;
mod ga;
mod heft;
mod oracle;

pub use exact::{solve_exact, ExactParams};
pub use ga::{solve_ga, solve_ga_traced, GaError, GaParams};
pub use heft::{heft_mapping, solve_heft, upward_ranks};
pub use oracle::{solve_exhaustive_oracle, OracleError, ORACLE_LIMIT};

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::report::SolverReport;
use crate::schedule::Violation;

/// Admissible nodes per task, or a report naming the first task without any.
#[allow(clippy::result_large_err)]
pub(crate) fn admissible_nodes(
    solver: &str,
    seed: u64,
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
) -> Result<Vec<Vec<usize>>, SolverReport> {
    let mut all = Vec::with_capacity(instance.n_tasks());
    for i in 0..instance.n_tasks() {
        let nodes = instance.allowed_nodes(i, constraints);
        if nodes.is_empty() {
            return Err(SolverReport::no_solution(
                solver,
                seed,
                instance.n_tasks(),
                Violation {
                    constraint: "placeable",
                    detail: format!("task `{}` has no admissible node", instance.tasks()[i].id),
                },
            ));
        }
        all.push(nodes);
    }
    Ok(all)
}

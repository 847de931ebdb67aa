use std::time::Instant;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::schedule::{check_mapping, decode_schedule, Decoded, Mapping, Schedule, Violation};

/// Canonical solver identifiers used in reports and CSV output.
pub mod names {
    pub const EXACT: &str = "exact";
    pub const ORACLE: &str = "oracle";
    pub const HEFT: &str = "heft";
    pub const GA: &str = "ga";
    pub const QUBO_SA: &str = "qubo-sa";
    pub const QUBO_MULTI_SA: &str = "qubo-multi-sa";
    pub const QUBO_LAYERED: &str = "qubo-layered";
}

/// Outcome of one solver call. Makespan and utilization are present exactly
/// when the result is feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solver: String,
    pub seed: u64,
    pub feasible: bool,
    pub makespan: Option<f64>,
    pub utilization: Option<f64>,
    pub runtime_ms: f64,
    pub energy: Option<f64>,
    pub outcome: Decoded,
    pub schedule: Option<Schedule>,
    pub violations: Vec<Violation>,
    pub tag: Option<String>,
}

impl SolverReport {
    /// Checks `outcome` against the active constraints and, when feasible,
    /// runs the canonical decoder to fill in the metrics.
    pub fn evaluate(
        solver: &str,
        seed: u64,
        instance: &WorkflowInstance,
        constraints: &ConstraintSet,
        outcome: Decoded,
    ) -> Self {
        let verdict = check_mapping(instance, constraints, &outcome);
        let schedule = match (&outcome, verdict.feasible()) {
            (Decoded::Mapping(m), true) => decode_schedule(instance, constraints, m).ok(),
            _ => None,
        };
        Self {
            solver: solver.to_string(),
            seed,
            feasible: schedule.is_some(),
            makespan: schedule.as_ref().map(|s| s.makespan),
            utilization: schedule.as_ref().map(|s| s.utilization),
            runtime_ms: 0.0,
            energy: None,
            outcome,
            schedule,
            violations: verdict.violations,
            tag: None,
        }
    }

    /// Report for an instance where some task has no admissible node.
    pub fn no_solution(solver: &str, seed: u64, n_tasks: usize, why: Violation) -> Self {
        Self {
            solver: solver.to_string(),
            seed,
            feasible: false,
            makespan: None,
            utilization: None,
            runtime_ms: 0.0,
            energy: None,
            outcome: Decoded::Violations(crate::schedule::AssignmentReport::from_rows(vec![Vec::new(); n_tasks])),
            schedule: None,
            violations: vec![why],
            tag: None,
        }
    }

    pub fn mapping(&self) -> Option<&Mapping> {
        self.outcome.mapping()
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn renamed(mut self, solver: &str) -> Self {
        self.solver = solver.to_string();
        self
    }
}

pub(crate) fn elapsed_ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

use std::time::Instant;

use thiserror::Error;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::report::{elapsed_ms, names, SolverReport};
use crate::schedule::{check_mapping, decode_schedule, Decoded, Mapping, Violation};

/// Largest mapping space the oracle will enumerate.
pub const ORACLE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("{n_nodes}^{n_tasks} mappings exceed the enumeration limit of {ORACLE_LIMIT}")]
    TooLarge { n_tasks: usize, n_nodes: usize },
}

/// Decodes every total mapping and keeps the smallest makespan (first found
/// on ties, in odometer order with task 0 varying slowest).
pub fn solve_exhaustive_oracle(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
) -> Result<SolverReport, OracleError> {
    let n = instance.n_tasks();
    let m = instance.n_nodes();
    let too_large = OracleError::TooLarge { n_tasks: n, n_nodes: m };
    let total = (m as u64)
        .checked_pow(u32::try_from(n).map_err(|_| too_large.clone())?)
        .ok_or_else(|| too_large.clone())?;
    if total > ORACLE_LIMIT {
        return Err(too_large);
    }

    let started = Instant::now();
    let mut digits = vec![0usize; n];
    let mut best: Option<(f64, Mapping)> = None;
    'enumerate: loop {
        let mapping = Mapping::new(digits.clone());
        let decoded = Decoded::Mapping(mapping.clone());
        if check_mapping(instance, constraints, &decoded).feasible() {
            let schedule = decode_schedule(instance, constraints, &mapping).expect("feasible mappings decode");
            if best.as_ref().is_none_or(|(b, _)| schedule.makespan < *b) {
                best = Some((schedule.makespan, mapping));
            }
        }
        // odometer increment, last task fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                break 'enumerate;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
        }
    }

    let mut report = match best {
        Some((_, mapping)) => {
            SolverReport::evaluate(names::ORACLE, 0, instance, constraints, Decoded::Mapping(mapping))
        }
        None => SolverReport::no_solution(
            names::ORACLE,
            0,
            n,
            Violation {
                constraint: "placeable",
                detail: "no mapping satisfies the active constraints".into(),
            },
        ),
    };
    report.runtime_ms = elapsed_ms(started);
    Ok(report)
}

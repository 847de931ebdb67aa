//! Heterogeneous Earliest Finish Time list scheduling.

use std::time::Instant;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::report::{elapsed_ms, names, SolverReport};
use crate::schedule::{Decoded, Mapping, Timeline};

use super::admissible_nodes;

/// `rank_i = mean_{admissible j} e_ij + max_{k ∈ succ(i)} (d_ik + rank_k)`.
/// Successor terms only count when dependencies are active, transfer delays
/// only when communication is.
pub fn upward_ranks(instance: &WorkflowInstance, constraints: &ConstraintSet, admissible: &[Vec<usize>]) -> Vec<f64> {
    let n = instance.n_tasks();
    let mut rank = vec![0.0; n];
    for &i in instance.topological_order().iter().rev() {
        let nodes = &admissible[i];
        let mean = nodes.iter().map(|&j| instance.exec_time(i, j)).sum::<f64>() / nodes.len() as f64;
        let tail = if constraints.dependency {
            instance
                .successors(i)
                .iter()
                .map(|&k| {
                    let d = if constraints.communication {
                        instance.transfer_delay(i)
                    } else {
                        0.0
                    };
                    d + rank[k]
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        rank[i] = mean + tail;
    }
    rank
}

/// HEFT placement: tasks by decreasing upward rank (index breaks ties), each
/// on the admissible node with the earliest finish time.
pub fn heft_mapping(instance: &WorkflowInstance, constraints: &ConstraintSet, admissible: &[Vec<usize>]) -> Mapping {
    let rank = upward_ranks(instance, constraints, admissible);
    let mut order: Vec<usize> = (0..instance.n_tasks()).collect();
    order.sort_by(|&a, &b| rank[b].total_cmp(&rank[a]).then(a.cmp(&b)));

    let mut timeline = Timeline::new(instance, constraints);
    for task in order {
        let mut best: Option<(f64, usize)> = None;
        for &node in &admissible[task] {
            let (_, finish) = timeline.probe(task, node);
            if best.is_none_or(|(f, _)| finish < f) {
                best = Some((finish, node));
            }
        }
        let (_, node) = best.expect("admissible set is non-empty");
        timeline.place(task, node);
    }
    Mapping::new(
        (0..instance.n_tasks())
            .map(|i| timeline.placement(i).expect("placed").node)
            .collect(),
    )
}

/// HEFT mapping, scored by the canonical decoder.
pub fn solve_heft(instance: &WorkflowInstance, constraints: &ConstraintSet) -> SolverReport {
    let started = Instant::now();
    let admissible = match admissible_nodes(names::HEFT, 0, instance, constraints) {
        Ok(a) => a,
        Err(report) => return report,
    };
    let mapping = heft_mapping(instance, constraints, &admissible);
    let mut report = SolverReport::evaluate(names::HEFT, 0, instance, constraints, Decoded::Mapping(mapping));
    report.runtime_ms = elapsed_ms(started);
    report
}

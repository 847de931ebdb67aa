//! Depth-first branch-and-bound over task→node choices.
//!
//! Tasks are branched in the canonical topological order, so every partial
//! assignment is scheduled exactly as the canonical decoder would schedule the
//! same prefix. Placing further tasks never moves earlier ones, which makes
//! the partial makespan an admissible bound. It is tightened with a critical
//! path tail of minimum admissible execution times (transfers assumed free).

use std::time::{Duration, Instant};

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::report::{elapsed_ms, names, SolverReport};
use crate::schedule::{decode_schedule, Decoded, Mapping, Timeline};

use super::{admissible_nodes, heft_mapping};

/// Slack below which a bound counts as reaching the incumbent.
const PRUNE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParams {
    pub timeout: Duration,
}

impl Default for ExactParams {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(300),
        }
    }
}

struct Search<'a> {
    order: &'a [usize],
    choices: Vec<Vec<usize>>,
    tail: Vec<f64>,
    incumbent: f64,
    best: Mapping,
    current: Vec<usize>,
    deadline: Instant,
    expanded: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn prunes(&self, bound: f64) -> bool {
        bound >= self.incumbent - PRUNE_SLACK * self.incumbent.max(1.0)
    }

    fn descend(&mut self, depth: usize, timeline: &Timeline<'_>, path_bound: f64) {
        if self.timed_out {
            return;
        }
        self.expanded += 1;
        if self.expanded.is_multiple_of(512) && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        if depth == self.order.len() {
            let makespan = timeline.makespan();
            if makespan < self.incumbent {
                self.incumbent = makespan;
                self.best = Mapping::new(self.current.clone());
            }
            return;
        }
        let task = self.order[depth];
        let choices = std::mem::take(&mut self.choices[task]);
        for &node in &choices {
            let (_, finish) = timeline.probe(task, node);
            let bound = path_bound.max(timeline.makespan()).max(finish + self.tail[task]);
            if self.prunes(bound) {
                continue;
            }
            let mut next = timeline.clone();
            next.place(task, node);
            self.current[task] = node;
            self.descend(depth + 1, &next, bound);
            if self.timed_out {
                break;
            }
        }
        self.choices[task] = choices;
    }
}

/// Mapping-optimal solution under the canonical decoder. The HEFT mapping
/// seeds the incumbent; on timeout the incumbent is returned tagged `timeout`,
/// otherwise the result is tagged `optimal`.
pub fn solve_exact(instance: &WorkflowInstance, constraints: &ConstraintSet, params: &ExactParams) -> SolverReport {
    let started = Instant::now();
    let admissible = match admissible_nodes(names::EXACT, 0, instance, constraints) {
        Ok(a) => a,
        Err(report) => return report,
    };

    let seed_mapping = heft_mapping(instance, constraints, &admissible);
    let seed_makespan = decode_schedule(instance, constraints, &seed_mapping)
        .expect("HEFT only uses admissible nodes")
        .makespan;

    // cheapest admissible exec time and the longest chain of them below each task
    let min_exec: Vec<f64> = (0..instance.n_tasks())
        .map(|i| {
            admissible[i]
                .iter()
                .map(|&j| instance.exec_time(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut tail = vec![0.0; instance.n_tasks()];
    if constraints.dependency {
        for &i in instance.topological_order().iter().rev() {
            tail[i] = instance
                .successors(i)
                .iter()
                .map(|&k| min_exec[k] + tail[k])
                .fold(0.0, f64::max);
        }
    }
    let root_bound = (0..instance.n_tasks())
        .filter(|&i| !constraints.dependency || instance.predecessors(i).is_empty())
        .map(|i| min_exec[i] + tail[i])
        .fold(0.0, f64::max);

    let choices = admissible
        .into_iter()
        .enumerate()
        .map(|(i, mut nodes)| {
            nodes.sort_by(|&a, &b| {
                instance
                    .exec_time(i, a)
                    .total_cmp(&instance.exec_time(i, b))
                    .then(a.cmp(&b))
            });
            nodes
        })
        .collect();

    let mut search = Search {
        order: instance.topological_order(),
        choices,
        tail,
        incumbent: seed_makespan,
        best: seed_mapping.clone(),
        current: seed_mapping.nodes().to_vec(),
        deadline: started + params.timeout,
        expanded: 0,
        timed_out: false,
    };
    if !search.prunes(root_bound) {
        let timeline = Timeline::new(instance, constraints);
        search.descend(0, &timeline, root_bound);
    }

    let tag = if search.timed_out { "timeout" } else { "optimal" };
    let mut report =
        SolverReport::evaluate(names::EXACT, 0, instance, constraints, Decoded::Mapping(search.best)).with_tag(tag);
    report.runtime_ms = elapsed_ms(started);
    report
}

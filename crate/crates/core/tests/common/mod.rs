//! Helpers shared by the integration tests: a small random instance
//! generator and checkers written without touching the library internals.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfqubo::model::{ConstraintSet, DependencyEdge, Node, Task, WorkflowInstance};
use wfqubo::qubo::PenaltyConfig;
use wfqubo::schedule::{Mapping, Schedule};

pub const TOL: f64 = 1e-9;

fn quarter(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    f64::from(rng.gen_range(lo..=hi)) * 0.25
}

/// Random instance with at most `max_tasks` tasks and `max_nodes` nodes.
/// Every number is a multiple of 0.25, so schedule arithmetic is exact.
/// Each task is built to fit at least one node.
pub fn small_instance(seed: u64, max_tasks: usize, max_nodes: usize) -> WorkflowInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_tasks);
    let m = rng.gen_range(1..=max_nodes);
    let nodes: Vec<Node> = (0..m)
        .map(|j| {
            let mut features = BTreeSet::from(["a".to_string()]);
            for extra in ["b", "c"] {
                if rng.gen_bool(0.5) {
                    features.insert(extra.to_string());
                }
            }
            Node {
                id: format!("n{j}"),
                capacity: rng.gen_range(1..=4),
                features,
            }
        })
        .collect();
    let tasks: Vec<Task> = (0..n)
        .map(|i| {
            let home = &nodes[rng.gen_range(0..m)];
            let features: BTreeSet<String> = home
                .features
                .iter()
                .filter(|f| *f == "a" || rng.gen_bool(0.5))
                .cloned()
                .collect();
            Task {
                id: format!("t{i}"),
                cores: rng.gen_range(1..=home.capacity),
                features,
                exec_time: (0..m).map(|_| quarter(&mut rng, 1, 12)).collect(),
                output_data: quarter(&mut rng, 0, 8),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for src in 0..n {
        for dst in src + 1..n {
            if rng.gen_bool(0.35) {
                edges.push(DependencyEdge { src, dst });
            }
        }
    }
    let bandwidth = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
    WorkflowInstance::new(format!("rand{seed}"), tasks, nodes, edges, bandwidth).expect("valid by construction")
}

/// A mapping that passes the active mapping-level checks, if one exists,
/// chosen at random among admissible nodes.
pub fn random_feasible_mapping(instance: &WorkflowInstance, constraints: &ConstraintSet, seed: u64) -> Mapping {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Mapping::new(
        (0..instance.n_tasks())
            .map(|i| {
                let allowed = instance.allowed_nodes(i, constraints);
                allowed[rng.gen_range(0..allowed.len())]
            })
            .collect(),
    )
}

/// Energy of `x` computed term by term from the instance, one penalty at a
/// time, without the matrix.
pub fn direct_energy(instance: &WorkflowInstance, constraints: &ConstraintSet, p: &PenaltyConfig, x: &[bool]) -> f64 {
    let n = instance.n_tasks();
    let m = instance.n_nodes();
    let on = |i: usize, j: usize| if x[i * m + j] { 1.0 } else { 0.0 };

    let mut energy = 0.0;
    for i in 0..n {
        for j in 0..m {
            energy += instance.exec_time(i, j) * on(i, j);
        }
    }
    if constraints.assignment {
        for i in 0..n {
            let row: f64 = (0..m).map(|j| on(i, j)).sum();
            energy += p.lambda_assign * (1.0 - row).powi(2);
        }
    }
    if constraints.capacity {
        for j in 0..m {
            let load: f64 = (0..n).map(|i| f64::from(instance.tasks()[i].cores) * on(i, j)).sum();
            energy += p.lambda_capacity * (load / f64::from(instance.nodes()[j].capacity)).powi(2);
        }
    }
    if constraints.feature {
        for i in 0..n {
            for j in 0..m {
                let task = &instance.tasks()[i].features;
                if !task.is_subset(&instance.nodes()[j].features) {
                    energy += p.lambda_compat * on(i, j);
                }
            }
        }
    }
    if constraints.dependency {
        for e in instance.edges() {
            for j in 0..m {
                energy += p.lambda_dep * instance.exec_time(e.src, j) * on(e.src, j);
            }
        }
    }
    if constraints.communication {
        for e in instance.edges() {
            let d = instance.tasks()[e.src].output_data / instance.bandwidth();
            for j in 0..m {
                for jj in 0..m {
                    if j != jj {
                        energy += p.lambda_comm * d * on(e.src, j) * on(e.dst, jj);
                    }
                }
            }
        }
    }
    energy
}

/// Checks a decoded schedule against the instance: durations, active
/// precedence and transfer gaps, and core usage at every start event.
/// Returns a description of the first problem found.
pub fn schedule_problem(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    mapping: &Mapping,
    schedule: &Schedule,
) -> Option<String> {
    let entries = &schedule.entries;
    if entries.len() != instance.n_tasks() {
        return Some("wrong number of entries".into());
    }
    for (i, e) in entries.iter().enumerate() {
        if e.node != mapping.node_of(i) {
            return Some(format!("task {i} moved off its node"));
        }
        if e.start < -TOL || (e.finish - e.start - instance.exec_time(i, e.node)).abs() > TOL {
            return Some(format!("task {i} has a bad time window"));
        }
    }
    if constraints.dependency {
        for edge in instance.edges() {
            let (a, b) = (entries[edge.src], entries[edge.dst]);
            let mut ready = a.finish;
            if constraints.communication && a.node != b.node {
                ready += instance.tasks()[edge.src].output_data / instance.bandwidth();
            }
            if b.start < ready - TOL {
                return Some(format!("edge {}->{} starts early", edge.src, edge.dst));
            }
        }
    }
    if constraints.capacity {
        for probe in entries {
            let used: u32 = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.node == probe.node && e.start <= probe.start + TOL && probe.start < e.finish - TOL)
                .map(|(i, _)| instance.tasks()[i].cores)
                .sum();
            if used > instance.nodes()[probe.node].capacity {
                return Some(format!("node {} overloaded at t={}", probe.node, probe.start));
            }
        }
    }
    let span = entries.iter().map(|e| e.finish).fold(0.0, f64::max);
    if (span - schedule.makespan).abs() > TOL {
        return Some("makespan is not the last finish time".into());
    }
    None
}

/// All binary vectors of length `len`, as an iterator of bit patterns.
pub fn all_vectors(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << len).map(move |bits| (0..len).map(|v| bits >> v & 1 == 1).collect())
}

//! Workflow problem description: tasks, heterogeneous nodes, the dependency
//! DAG and the shared inter-node bandwidth.
//!
//! A [`WorkflowInstance`] is validated once at construction and is immutable
//! afterwards. Task and node references inside the crate are positional
//! indices into `tasks` / `nodes`; string ids are kept for I/O and reporting.

mod builtin;
mod generator;
mod io;

use std::collections::BTreeSet;

use thiserror::Error;

pub use builtin::{builtin_instance, BuiltinInstance};
pub use generator::{generate_scaling_instance, generate_with, max_layered_edges, GeneratorParams, SCALING_SIZES};
pub use io::{load_instance, parse_instance, save_instance, to_json, InstanceFile};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {rule}: {detail}")]
    Invalid { rule: &'static str, detail: String },
    #[error("unknown built-in instance `{0}` (expected W1, W2 or Medium_6T)")]
    UnknownBuiltin(String),
    #[error("unsupported scaling size {0} (expected one of 5, 10, 15, 20)")]
    UnsupportedSize(usize),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl ModelError {
    fn invalid(rule: &'static str, detail: impl Into<String>) -> Self {
        ModelError::Invalid {
            rule,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: String,
    /// Cores the task occupies while it runs.
    pub cores: u32,
    pub features: BTreeSet<String>,
    /// Execution time on every node, indexed like `WorkflowInstance::nodes`.
    pub exec_time: Vec<f64>,
    /// Payload shipped to each successor placed on a different node.
    pub output_data: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub capacity: u32,
    pub features: BTreeSet<String>,
}

/// `dst` depends on `src`; both are task indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyEdge {
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowInstance {
    name: String,
    tasks: Vec<Task>,
    nodes: Vec<Node>,
    edges: Vec<DependencyEdge>,
    bandwidth: f64,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl WorkflowInstance {
    /// Validates and freezes an instance.
    pub fn new(
        name: impl Into<String>,
        tasks: Vec<Task>,
        nodes: Vec<Node>,
        edges: Vec<DependencyEdge>,
        bandwidth: f64,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if tasks.is_empty() {
            return Err(ModelError::invalid("non-empty", "instance has no tasks"));
        }
        if nodes.is_empty() {
            return Err(ModelError::invalid("non-empty", "instance has no nodes"));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(ModelError::invalid(
                "bandwidth > 0",
                format!("bandwidth is {bandwidth}"),
            ));
        }
        check_unique(tasks.iter().map(|t| t.id.as_str()), "task")?;
        check_unique(nodes.iter().map(|n| n.id.as_str()), "node")?;
        for node in &nodes {
            if node.capacity == 0 {
                return Err(ModelError::invalid(
                    "capacity >= 1",
                    format!("node `{}` has zero capacity", node.id),
                ));
            }
        }
        for task in &tasks {
            if task.cores == 0 {
                return Err(ModelError::invalid(
                    "cores >= 1",
                    format!("task `{}` requires zero cores", task.id),
                ));
            }
            if task.exec_time.len() != nodes.len() {
                return Err(ModelError::invalid(
                    "exec_time covers every node",
                    format!(
                        "task `{}` has {} exec times for {} nodes",
                        task.id,
                        task.exec_time.len(),
                        nodes.len()
                    ),
                ));
            }
            if let Some(bad) = task.exec_time.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
                return Err(ModelError::invalid(
                    "exec_time > 0",
                    format!("task `{}` has exec time {bad}", task.id),
                ));
            }
            if !(task.output_data.is_finite() && task.output_data >= 0.0) {
                return Err(ModelError::invalid(
                    "output_data >= 0",
                    format!("task `{}` has output_data {}", task.id, task.output_data),
                ));
            }
            let placeable = nodes
                .iter()
                .any(|n| task.features.is_subset(&n.features) && task.cores <= n.capacity);
            if !placeable {
                return Err(ModelError::invalid(
                    "placeable",
                    format!("task `{}` has no feature-compatible node with enough cores", task.id),
                ));
            }
        }

        let n = tasks.len();
        let mut seen = BTreeSet::new();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for edge in &edges {
            if edge.src >= n || edge.dst >= n {
                return Err(ModelError::invalid(
                    "edge endpoints exist",
                    format!("edge ({}, {}) references a missing task", edge.src, edge.dst),
                ));
            }
            if edge.src == edge.dst {
                return Err(ModelError::invalid(
                    "not a DAG",
                    format!("self-loop on task `{}`", tasks[edge.src].id),
                ));
            }
            if !seen.insert(*edge) {
                return Err(ModelError::invalid(
                    "unique edges",
                    format!("duplicate edge ({}, {})", tasks[edge.src].id, tasks[edge.dst].id),
                ));
            }
            preds[edge.dst].push(edge.src);
            succs[edge.src].push(edge.dst);
        }
        let topo = topological_order(&preds, &succs)
            .ok_or_else(|| ModelError::invalid("not a DAG", "dependency edges contain a directed cycle"))?;

        Ok(Self {
            name,
            tasks,
            nodes,
            edges,
            bandwidth,
            preds,
            succs,
            topo,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn predecessors(&self, task: usize) -> &[usize] {
        &self.preds[task]
    }

    pub fn successors(&self, task: usize) -> &[usize] {
        &self.succs[task]
    }

    /// Canonical topological order: Kahn peeling, ready tasks taken by
    /// ascending task index.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn exec_time(&self, task: usize, node: usize) -> f64 {
        self.tasks[task].exec_time[node]
    }

    /// Largest execution time over all (task, node) pairs.
    pub fn max_exec_time(&self) -> f64 {
        self.tasks
            .iter()
            .flat_map(|t| t.exec_time.iter().copied())
            .fold(0.0, f64::max)
    }

    /// `F_i ⊆ G_j`.
    pub fn features_compatible(&self, task: usize, node: usize) -> bool {
        self.tasks[task].features.is_subset(&self.nodes[node].features)
    }

    pub fn fits(&self, task: usize, node: usize) -> bool {
        self.tasks[task].cores <= self.nodes[node].capacity
    }

    /// Whether `task` may run on `node` under the active mapping-level checks.
    pub fn allowed(&self, task: usize, node: usize, constraints: &ConstraintSet) -> bool {
        (!constraints.feature || self.features_compatible(task, node))
            && (!constraints.capacity || self.fits(task, node))
    }

    pub fn allowed_nodes(&self, task: usize, constraints: &ConstraintSet) -> Vec<usize> {
        (0..self.n_nodes())
            .filter(|&j| self.allowed(task, j, constraints))
            .collect()
    }

    pub fn task_index(&self, id: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Transfer delay charged on `edge` when its endpoints sit on different
    /// nodes: payload of the producer over the shared bandwidth.
    pub fn comm_delay(&self, edge: DependencyEdge) -> f64 {
        self.tasks[edge.src].output_data / self.bandwidth
    }

    /// Delay on any outgoing edge of `src` (the payload does not depend on
    /// the consumer).
    pub fn transfer_delay(&self, src: usize) -> f64 {
        self.tasks[src].output_data / self.bandwidth
    }
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>, what: &str) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ModelError::invalid("unique ids", format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

fn topological_order(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> Option<Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, d)| **d == 0)
        .map(|(i, _)| Reverse(i))
        .collect();
    let mut order = Vec::with_capacity(preds.len());
    while let Some(Reverse(task)) = ready.pop() {
        order.push(task);
        for &next in &succs[task] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                ready.push(Reverse(next));
            }
        }
    }
    (order.len() == preds.len()).then_some(order)
}

/// Which hard constraints are active. `communication` only has meaning
/// together with `dependency`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ConstraintSet {
    pub assignment: bool,
    pub capacity: bool,
    pub feature: bool,
    pub dependency: bool,
    pub communication: bool,
}

impl ConstraintSet {
    pub const fn all() -> Self {
        Self {
            assignment: true,
            capacity: true,
            feature: true,
            dependency: true,
            communication: true,
        }
    }

    pub const fn none() -> Self {
        Self {
            assignment: false,
            capacity: false,
            feature: false,
            dependency: false,
            communication: false,
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.communication || self.dependency
    }

    /// The cumulative six-stage ladder: objective only, then assignment,
    /// capacity, feature, dependency and communication added in turn.
    pub fn progressive_stages() -> [(&'static str, ConstraintSet); 6] {
        let mut c = ConstraintSet::none();
        let s0 = c;
        c.assignment = true;
        let s1 = c;
        c.capacity = true;
        let s2 = c;
        c.feature = true;
        let s3 = c;
        c.dependency = true;
        let s4 = c;
        c.communication = true;
        let s5 = c;
        [
            ("objective", s0),
            ("assignment", s1),
            ("capacity", s2),
            ("feature", s3),
            ("dependency", s4),
            ("communication", s5),
        ]
    }

    /// Every valid combination of the five flags (24 of the 32).
    pub fn all_valid() -> Vec<ConstraintSet> {
        (0u8..32)
            .map(|bits| ConstraintSet {
                assignment: bits & 1 != 0,
                capacity: bits & 2 != 0,
                feature: bits & 4 != 0,
                dependency: bits & 8 != 0,
                communication: bits & 16 != 0,
            })
            .filter(ConstraintSet::is_valid)
            .collect()
    }
}

#[cfg(test)]
pub(crate) fn features(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

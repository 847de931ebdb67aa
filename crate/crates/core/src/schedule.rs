//! Canonical schedule decoder.
//!
//! Turns a task→node mapping into start/finish times: tasks are taken in the
//! instance's canonical topological order and each is slotted at the earliest
//! time after its ready time at which its node has enough free cores for the
//! whole execution, never ahead of the task placed on that node before it.
//! Free cores are tracked as a step profile per node, so starts land on
//! arbitrary event times rather than a grid.

use std::io::Write;

use thiserror::Error;

use crate::model::{ConstraintSet, WorkflowInstance};

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("mapping covers {got} tasks, instance has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("task {task} mapped to node {node}, instance has {n_nodes} nodes")]
    NodeOutOfRange { task: usize, node: usize, n_nodes: usize },
    #[error("mapping violates active constraints: {0}")]
    Infeasible(String),
    #[error("utilization is undefined for a zero makespan")]
    ZeroMakespan,
}

/// Total task→node assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping(Vec<usize>);

impl Mapping {
    pub fn new(nodes: Vec<usize>) -> Self {
        Self(nodes)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn node_of(&self, task: usize) -> usize {
        self.0[task]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-task set bits of a binary vector whose rows are not all one-hot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentReport {
    rows: Vec<Vec<usize>>,
}

impl AssignmentReport {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn unassigned(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].is_empty()).collect()
    }

    pub fn multiply_assigned(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].len() >= 2).collect()
    }
}

/// What a QUBO vector decodes to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Mapping(Mapping),
    Violations(AssignmentReport),
}

impl Decoded {
    pub fn mapping(&self) -> Option<&Mapping> {
        match self {
            Decoded::Mapping(m) => Some(m),
            Decoded::Violations(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityVerdict {
    pub violations: Vec<Violation>,
}

impl FeasibilityVerdict {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{}: {}", v.constraint, v.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Mapping-level feasibility: one-hot rows (assignment), `F_i ⊆ G_j`
/// (feature) and `r_i ≤ c_j` (capacity), each only when active. Temporal
/// constraints are always satisfiable by the decoder and are not checked here.
pub fn check_mapping(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    decoded: &Decoded,
) -> FeasibilityVerdict {
    let mut violations = Vec::new();
    let placements: Vec<(usize, usize)> = match decoded {
        Decoded::Mapping(m) => m.nodes().iter().copied().enumerate().collect(),
        Decoded::Violations(report) => {
            if constraints.assignment {
                for (i, row) in report.rows().iter().enumerate() {
                    if row.len() != 1 {
                        violations.push(Violation {
                            constraint: "assignment",
                            detail: format!("task `{}` assigned to {} nodes", instance.tasks()[i].id, row.len()),
                        });
                    }
                }
            }
            report
                .rows()
                .iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().map(move |&j| (i, j)))
                .collect()
        }
    };
    for (i, j) in placements {
        let task = &instance.tasks()[i];
        let node = &instance.nodes()[j];
        if constraints.feature && !instance.features_compatible(i, j) {
            violations.push(Violation {
                constraint: "feature",
                detail: format!("task `{}` needs features missing on node `{}`", task.id, node.id),
            });
        }
        if constraints.capacity && !instance.fits(i, j) {
            violations.push(Violation {
                constraint: "capacity",
                detail: format!(
                    "task `{}` needs {} cores, node `{}` has {}",
                    task.id, task.cores, node.id, node.capacity
                ),
            });
        }
    }
    FeasibilityVerdict { violations }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledTask {
    pub node: usize,
    pub start: f64,
    pub finish: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub entries: Vec<ScheduledTask>,
    pub makespan: f64,
    pub utilization: f64,
}

impl Schedule {
    pub fn mapping(&self) -> Mapping {
        Mapping::new(self.entries.iter().map(|e| e.node).collect())
    }

    /// `task,node,start,finish` rows for external Gantt plotting.
    pub fn write_csv<W: Write>(&self, instance: &WorkflowInstance, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["task", "node", "start", "finish"])?;
        for (i, e) in self.entries.iter().enumerate() {
            wtr.write_record([
                instance.tasks()[i].id.as_str(),
                instance.nodes()[e.node].id.as_str(),
                &e.start.to_string(),
                &e.finish.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Cores in use as a step function: `steps[k] = (t_k, used on [t_k, t_{k+1}))`,
/// the last step extending to infinity.
#[derive(Debug, Clone)]
struct CoreProfile {
    steps: Vec<(f64, u32)>,
}

impl CoreProfile {
    fn new() -> Self {
        Self { steps: vec![(0.0, 0)] }
    }

    fn earliest_start(&self, ready: f64, duration: f64, cores: u32, capacity: u32) -> f64 {
        let candidates = std::iter::once(ready).chain(self.steps.iter().map(|&(t, _)| t).filter(|&t| t > ready));
        for start in candidates {
            if self.fits(start, start + duration, cores, capacity) {
                return start;
            }
        }
        unreachable!("the profile is empty after its last step")
    }

    fn fits(&self, start: f64, end: f64, cores: u32, capacity: u32) -> bool {
        for (k, &(t, used)) in self.steps.iter().enumerate() {
            let next = self.steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
            if t < end && next > start && used + cores > capacity {
                return false;
            }
        }
        true
    }

    fn split_at(&mut self, time: f64) -> usize {
        match self
            .steps
            .binary_search_by(|s| s.0.partial_cmp(&time).expect("finite times"))
        {
            Ok(k) => k,
            Err(k) => {
                let used = self.steps[k - 1].1;
                self.steps.insert(k, (time, used));
                k
            }
        }
    }

    fn reserve(&mut self, start: f64, end: f64, cores: u32) {
        let a = self.split_at(start);
        let b = self.split_at(end);
        for step in &mut self.steps[a..b] {
            step.1 += cores;
        }
    }

    #[cfg(test)]
    fn peak_in(&self, start: f64, end: f64) -> u32 {
        let mut peak = 0;
        for (k, &(t, used)) in self.steps.iter().enumerate() {
            let next = self.steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
            if t < end && next > start {
                peak = peak.max(used);
            }
        }
        peak
    }
}

/// Incremental list-scheduling state shared by the decoder, HEFT and the
/// exact search. Tasks may be placed in any order that respects active
/// dependencies; placing a task never moves one already placed.
///
/// Under the capacity constraint each node dispatches in placement order: a
/// task never starts before the task placed on its node just before it. Without
/// that rule a task could backfill into an earlier gap, and then shortening one
/// task's ready time can push a later task back (the classic list-scheduling
/// anomaly). With it, earlier ready times never delay anything.
#[derive(Debug, Clone)]
pub(crate) struct Timeline<'a> {
    instance: &'a WorkflowInstance,
    constraints: ConstraintSet,
    profiles: Vec<CoreProfile>,
    // start of the most recent placement per node
    last_start: Vec<f64>,
    placed: Vec<Option<ScheduledTask>>,
    makespan: f64,
}

impl<'a> Timeline<'a> {
    pub(crate) fn new(instance: &'a WorkflowInstance, constraints: &ConstraintSet) -> Self {
        Self {
            instance,
            constraints: *constraints,
            profiles: vec![CoreProfile::new(); instance.n_nodes()],
            last_start: vec![0.0; instance.n_nodes()],
            placed: vec![None; instance.n_tasks()],
            makespan: 0.0,
        }
    }

    pub(crate) fn placement(&self, task: usize) -> Option<ScheduledTask> {
        self.placed[task]
    }

    pub(crate) fn makespan(&self) -> f64 {
        self.makespan
    }

    fn ready_time(&self, task: usize, node: usize) -> f64 {
        if !self.constraints.dependency {
            return 0.0;
        }
        let mut ready: f64 = 0.0;
        for &p in self.instance.predecessors(task) {
            let pred = self.placed[p].expect("predecessors are placed first");
            let mut t = pred.finish;
            if self.constraints.communication && pred.node != node {
                t += self.instance.transfer_delay(p);
            }
            ready = ready.max(t);
        }
        ready
    }

    /// Start and finish `task` would get on `node` right now.
    pub(crate) fn probe(&self, task: usize, node: usize) -> (f64, f64) {
        let duration = self.instance.exec_time(task, node);
        let ready = self.ready_time(task, node);
        let start = if self.constraints.capacity {
            self.profiles[node].earliest_start(
                ready.max(self.last_start[node]),
                duration,
                self.instance.tasks()[task].cores,
                self.instance.nodes()[node].capacity,
            )
        } else {
            ready
        };
        (start, start + duration)
    }

    pub(crate) fn place(&mut self, task: usize, node: usize) -> ScheduledTask {
        debug_assert!(self.placed[task].is_none());
        let (start, finish) = self.probe(task, node);
        if self.constraints.capacity {
            self.profiles[node].reserve(start, finish, self.instance.tasks()[task].cores);
            self.last_start[node] = start;
        }
        let entry = ScheduledTask { node, start, finish };
        self.placed[task] = Some(entry);
        self.makespan = self.makespan.max(finish);
        entry
    }

    pub(crate) fn into_schedule(self) -> Schedule {
        let entries: Vec<ScheduledTask> = self.placed.into_iter().map(|e| e.expect("every task placed")).collect();
        let makespan = self.makespan;
        let mut schedule = Schedule {
            entries,
            makespan,
            utilization: 0.0,
        };
        schedule.utilization = utilization(self.instance, &schedule).unwrap_or(0.0);
        schedule
    }
}

fn check_shape(instance: &WorkflowInstance, mapping: &Mapping) -> Result<(), ScheduleError> {
    if mapping.len() != instance.n_tasks() {
        return Err(ScheduleError::WrongLength {
            expected: instance.n_tasks(),
            got: mapping.len(),
        });
    }
    if let Some((task, &node)) = mapping
        .nodes()
        .iter()
        .enumerate()
        .find(|(_, &j)| j >= instance.n_nodes())
    {
        return Err(ScheduleError::NodeOutOfRange {
            task,
            node,
            n_nodes: instance.n_nodes(),
        });
    }
    Ok(())
}

/// Canonical decode of a feasible mapping.
pub fn decode_schedule(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    mapping: &Mapping,
) -> Result<Schedule, ScheduleError> {
    check_shape(instance, mapping)?;
    let verdict = check_mapping(instance, constraints, &Decoded::Mapping(mapping.clone()));
    if !verdict.feasible() {
        return Err(ScheduleError::Infeasible(verdict.summary()));
    }
    let mut timeline = Timeline::new(instance, constraints);
    for &task in instance.topological_order() {
        timeline.place(task, mapping.node_of(task));
    }
    Ok(timeline.into_schedule())
}

/// Busy core-seconds over available core-seconds, clamped to `[0, 1]`.
pub fn utilization(instance: &WorkflowInstance, schedule: &Schedule) -> Result<f64, ScheduleError> {
    if schedule.makespan <= 0.0 {
        return Err(ScheduleError::ZeroMakespan);
    }
    let busy: f64 = schedule
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| f64::from(instance.tasks()[i].cores) * (e.finish - e.start))
        .sum();
    let total_cores: f64 = instance.nodes().iter().map(|n| f64::from(n.capacity)).sum();
    Ok((busy / (total_cores * schedule.makespan)).clamp(0.0, 1.0))
}

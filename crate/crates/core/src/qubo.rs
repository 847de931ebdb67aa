//! Penalty-based QUBO for the task→node mapping.
//!
//! Variable `v = i * m + j` is one iff task `i` runs on node `j`. The total
//! energy is
//!
//! ```text
//! E(x) = Σ e_ij x_ij                                  objective
//!      + λ_a    Σ_i (1 - Σ_j x_ij)²                   assignment
//!      + λ_c    Σ_j (Σ_i r_i x_ij / c_j)²             capacity (load)
//!      + λ_comp Σ_{i, j: F_i ⊄ G_j} x_ij              feature
//!      + λ_d    Σ_{(i,k)} Σ_j e_ij x_ij               dependency
//!      + λ_comm Σ_{(i,k)} Σ_{j≠j'} d_ik x_ij x_kj'    communication
//! ```
//!
//! and is stored as `xᵀQx + offset` with `Q` dense and symmetric (each
//! off-diagonal coefficient split evenly between `Q[u][v]` and `Q[v][u]`).

use std::io::{self, Write};

use thiserror::Error;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::schedule::{AssignmentReport, Decoded, Mapping};

#[derive(Debug, Error, PartialEq)]
pub enum QuboError {
    #[error("vector has {got} entries, model has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
}

/// Penalty weights. `alpha` records the multiplier the weights were derived
/// from; `build_qubo` only reads the lambdas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub alpha: f64,
    pub lambda_assign: f64,
    pub lambda_capacity: f64,
    pub lambda_compat: f64,
    /// Set to zero to ablate the dependency term.
    pub lambda_dep: f64,
    pub lambda_comm: f64,
}

impl PenaltyConfig {
    pub fn is_valid(&self) -> bool {
        self.alpha > 0.0
            && [
                self.lambda_assign,
                self.lambda_capacity,
                self.lambda_compat,
                self.lambda_dep,
                self.lambda_comm,
            ]
            .iter()
            .all(|l| l.is_finite() && *l >= 0.0)
    }
}

/// Weights scaled from the largest execution time:
/// `λ_a = λ_c = 3·e_max·α`, `λ_comp = 100·e_max`, `λ_comm = λ_d = e_max·α`.
pub fn default_penalties(instance: &WorkflowInstance, alpha: f64) -> PenaltyConfig {
    assert!(alpha > 0.0, "penalty multiplier must be positive");
    let e_max = instance.max_exec_time();
    PenaltyConfig {
        alpha,
        lambda_assign: 3.0 * e_max * alpha,
        lambda_capacity: 3.0 * e_max * alpha,
        lambda_compat: 100.0 * e_max,
        lambda_dep: e_max * alpha,
        lambda_comm: e_max * alpha,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n_tasks: usize,
    n_nodes: usize,
    matrix: Vec<f64>,
    offset: f64,
}

impl QuboModel {
    fn zeros(n_tasks: usize, n_nodes: usize) -> Self {
        let size = n_tasks * n_nodes;
        Self {
            n_tasks,
            n_nodes,
            matrix: vec![0.0; size * size],
            offset: 0.0,
        }
    }

    pub fn size(&self) -> usize {
        self.n_tasks * self.n_nodes
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var(&self, task: usize, node: usize) -> usize {
        task * self.n_nodes + node
    }

    pub fn task_node(&self, var: usize) -> (usize, usize) {
        (var / self.n_nodes, var % self.n_nodes)
    }

    pub fn q(&self, u: usize, v: usize) -> f64 {
        self.matrix[u * self.size() + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        let n = self.size();
        &self.matrix[u * n..(u + 1) * n]
    }

    fn add_linear(&mut self, v: usize, coeff: f64) {
        let n = self.size();
        self.matrix[v * n + v] += coeff;
    }

    /// Adds `coeff · x_u · x_v`.
    fn add_pair(&mut self, u: usize, v: usize, coeff: f64) {
        if u == v {
            self.add_linear(u, coeff);
        } else {
            let n = self.size();
            self.matrix[u * n + v] += 0.5 * coeff;
            self.matrix[v * n + u] += 0.5 * coeff;
        }
    }

    fn check_len(&self, x: &[bool]) -> Result<(), QuboError> {
        if x.len() == self.size() {
            Ok(())
        } else {
            Err(QuboError::LengthMismatch {
                expected: self.size(),
                got: x.len(),
            })
        }
    }

    /// `xᵀQx + offset`.
    pub fn energy(&self, x: &[bool]) -> Result<f64, QuboError> {
        self.check_len(x)?;
        let ones: Vec<usize> = (0..x.len()).filter(|&v| x[v]).collect();
        let mut total = 0.0;
        for &u in &ones {
            let row = self.row(u);
            for &v in &ones {
                total += row[v];
            }
        }
        Ok(total + self.offset)
    }

    /// `Σ_u Q[v][u]·x_u`, the quantity the annealer keeps up to date.
    pub fn local_field(&self, x: &[bool], v: usize) -> f64 {
        self.row(v).iter().zip(x).filter(|(_, on)| **on).map(|(q, _)| *q).sum()
    }

    /// Energy change from flipping bit `v` given the local field `h = Σ_u Q_vu x_u`:
    /// `ΔE = Q_vv(1-2x_v) + 2(1-2x_v)(h - Q_vv x_v)`.
    pub fn flip_delta_with_field(&self, x_v: bool, v: usize, field: f64) -> f64 {
        let q_vv = self.q(v, v);
        let s = if x_v { -1.0 } else { 1.0 };
        let others = if x_v { field - q_vv } else { field };
        q_vv * s + 2.0 * s * others
    }

    pub fn flip_delta(&self, x: &[bool], v: usize) -> f64 {
        self.flip_delta_with_field(x[v], v, self.local_field(x, v))
    }

    /// Reads the task→node assignment off a binary vector. Rows that are not
    /// one-hot are reported instead of guessed.
    pub fn decode(&self, x: &[bool]) -> Result<Decoded, QuboError> {
        self.check_len(x)?;
        let mut assignment = Vec::with_capacity(self.n_tasks);
        let mut rows = Vec::with_capacity(self.n_tasks);
        let mut one_hot = true;
        for i in 0..self.n_tasks {
            let set: Vec<usize> = (0..self.n_nodes).filter(|&j| x[self.var(i, j)]).collect();
            one_hot &= set.len() == 1;
            assignment.push(set.first().copied().unwrap_or(0));
            rows.push(set);
        }
        Ok(if one_hot {
            Decoded::Mapping(Mapping::new(assignment))
        } else {
            Decoded::Violations(AssignmentReport::from_rows(rows))
        })
    }

    /// One-hot encoding of a mapping.
    pub fn encode(&self, mapping: &Mapping) -> Vec<bool> {
        let mut x = vec![false; self.size()];
        for (i, &j) in mapping.nodes().iter().enumerate() {
            x[self.var(i, j)] = true;
        }
        x
    }

    /// Plain-text dump: one `row col value` line per nonzero upper-triangle
    /// entry, then `offset <value>`.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.size();
        writeln!(out, "# size {n}")?;
        for u in 0..n {
            for v in u..n {
                let q = self.q(u, v);
                if q != 0.0 {
                    writeln!(out, "{u} {v} {q}")?;
                }
            }
        }
        writeln!(out, "offset {}", self.offset)
    }
}

/// Assembles `Q` and the constant offset for the active constraint classes.
pub fn build_qubo(instance: &WorkflowInstance, constraints: &ConstraintSet, penalties: &PenaltyConfig) -> QuboModel {
    let n = instance.n_tasks();
    let m = instance.n_nodes();
    let mut model = QuboModel::zeros(n, m);

    for i in 0..n {
        for j in 0..m {
            model.add_linear(model.var(i, j), instance.exec_time(i, j));
        }
    }

    if constraints.assignment {
        // (1 - Σx)² = 1 - 2Σx + Σ_j Σ_j' x_j x_j'
        let la = penalties.lambda_assign;
        model.offset += la * n as f64;
        for i in 0..n {
            for j in 0..m {
                let v = model.var(i, j);
                model.add_linear(v, -2.0 * la);
                for jj in 0..m {
                    model.add_pair(v, model.var(i, jj), la);
                }
            }
        }
    }

    if constraints.capacity {
        let lc = penalties.lambda_capacity;
        for j in 0..m {
            let c = f64::from(instance.nodes()[j].capacity);
            for i in 0..n {
                let ri = f64::from(instance.tasks()[i].cores);
                for k in 0..n {
                    let rk = f64::from(instance.tasks()[k].cores);
                    model.add_pair(model.var(i, j), model.var(k, j), lc * ri * rk / (c * c));
                }
            }
        }
    }

    if constraints.feature {
        for i in 0..n {
            for j in 0..m {
                if !instance.features_compatible(i, j) {
                    model.add_linear(model.var(i, j), penalties.lambda_compat);
                }
            }
        }
    }

    if constraints.dependency {
        for edge in instance.edges() {
            for j in 0..m {
                let v = model.var(edge.src, j);
                model.add_linear(v, penalties.lambda_dep * instance.exec_time(edge.src, j));
            }
        }
    }

    if constraints.communication {
        for edge in instance.edges() {
            let d = instance.comm_delay(*edge);
            if d == 0.0 {
                continue;
            }
            for j in 0..m {
                for jj in (0..m).filter(|&jj| jj != j) {
                    model.add_pair(
                        model.var(edge.src, j),
                        model.var(edge.dst, jj),
                        penalties.lambda_comm * d,
                    );
                }
            }
        }
    }

    model
}

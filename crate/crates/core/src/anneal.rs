//! Quantum-inspired solvers over the mapping QUBO: single-run simulated
//! annealing, a multi-read ensemble with randomized temperature and penalty
//! multiplier, and a layered sweep over a fixed multiplier schedule.
//!
//! All three are deterministic per seed. Single-flip moves use the
//! incremental energy delta; local fields are updated in `O(size)` per
//! accepted flip.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::qubo::{build_qubo, default_penalties, PenaltyConfig, QuboModel};
use crate::report::{elapsed_ms, names, SolverReport};
use crate::schedule::{Decoded, Mapping};

/// Temperature floor; geometric cooling underflows long before the default
/// iteration budget runs out.
pub const MIN_TEMPERATURE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub max_iter: usize,
    pub t_init: f64,
    pub cooling: f64,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            t_init: 100.0,
            cooling: 0.95,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealRun {
    pub best: Vec<bool>,
    pub best_energy: f64,
    pub final_energy: f64,
}

/// Metropolis single-flip annealing with geometric cooling applied every
/// iteration. `observe(iteration, current_energy, best_energy)` is called
/// after each iteration.
pub fn anneal_observed<F>(model: &QuboModel, params: &AnnealParams, mut observe: F) -> AnnealRun
where
    F: FnMut(usize, f64, f64),
{
    let n = model.size();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut energy = model.energy(&x).expect("sized to the model");
    let mut field: Vec<f64> = (0..n).map(|v| model.local_field(&x, v)).collect();
    let mut best = x.clone();
    let mut best_energy = energy;
    let mut temperature = params.t_init;

    for iter in 0..params.max_iter {
        if n == 0 {
            break;
        }
        let v = rng.gen_range(0..n);
        let delta = model.flip_delta_with_field(x[v], v, field[v]);
        let accept = delta < 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
        if accept {
            let step = if x[v] { -1.0 } else { 1.0 };
            x[v] = !x[v];
            energy += delta;
            for (f, q) in field.iter_mut().zip(model.row(v)) {
                *f += step * q;
            }
            if energy < best_energy {
                best_energy = energy;
                best.clone_from(&x);
            }
        }
        temperature = (temperature * params.cooling).max(MIN_TEMPERATURE);

        #[cfg(debug_assertions)]
        if (iter + 1) % 1000 == 0 {
            let full = model.energy(&x).expect("sized to the model");
            debug_assert!(
                (full - energy).abs() <= 1e-6 * full.abs().max(1.0),
                "incremental energy drifted: {energy} vs {full}"
            );
        }
        observe(iter, energy, best_energy);
    }

    AnnealRun {
        best,
        best_energy,
        final_energy: energy,
    }
}

pub fn anneal(model: &QuboModel, params: &AnnealParams) -> AnnealRun {
    anneal_observed(model, params, |_, _, _| {})
}

/// Assigns every empty row to its fastest admissible node and collapses
/// multi-set rows to their fastest set node. Used only when the assignment
/// constraint is inactive, where a raw vector is not a total mapping.
pub fn complete_assignment(instance: &WorkflowInstance, constraints: &ConstraintSet, decoded: &Decoded) -> Mapping {
    match decoded {
        Decoded::Mapping(m) => m.clone(),
        Decoded::Violations(report) => {
            let fastest = |i: usize, candidates: &mut dyn Iterator<Item = usize>| {
                candidates
                    .min_by(|&a, &b| {
                        instance
                            .exec_time(i, a)
                            .total_cmp(&instance.exec_time(i, b))
                            .then(a.cmp(&b))
                    })
                    .expect("at least one candidate")
            };
            let nodes = report
                .rows()
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    if row.is_empty() {
                        let mut allowed = instance.allowed_nodes(i, constraints).into_iter();
                        fastest(i, &mut allowed)
                    } else {
                        fastest(i, &mut row.iter().copied())
                    }
                })
                .collect();
            Mapping::new(nodes)
        }
    }
}

fn report_from_vector(
    solver: &str,
    model: &QuboModel,
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    seed: u64,
    x: &[bool],
    energy: f64,
) -> SolverReport {
    let decoded = model.decode(x).expect("sized to the model");
    let completed = !constraints.assignment && matches!(decoded, Decoded::Violations(_));
    let outcome = if completed {
        Decoded::Mapping(complete_assignment(instance, constraints, &decoded))
    } else {
        decoded
    };
    let mut report = SolverReport::evaluate(solver, seed, instance, constraints, outcome);
    report.energy = Some(energy);
    if completed {
        report.tag = Some("completed".into());
    }
    report
}

/// Single annealing run on a prebuilt model, decoded through the canonical
/// scheduler.
pub fn solve_sa(
    model: &QuboModel,
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    params: &AnnealParams,
) -> SolverReport {
    let started = Instant::now();
    let run = anneal(model, params);
    let mut report = report_from_vector(
        names::QUBO_SA,
        model,
        instance,
        constraints,
        params.seed,
        &run.best,
        run.best_energy,
    );
    report.runtime_ms = elapsed_ms(started);
    report
}

/// An instance plus active constraints; produces the QUBO for any penalty
/// multiplier.
#[derive(Debug, Clone, Copy)]
pub struct QuboProblem<'a> {
    pub instance: &'a WorkflowInstance,
    pub constraints: ConstraintSet,
}

impl<'a> QuboProblem<'a> {
    pub fn new(instance: &'a WorkflowInstance, constraints: ConstraintSet) -> Self {
        Self { instance, constraints }
    }

    pub fn penalties(&self, alpha: f64) -> PenaltyConfig {
        default_penalties(self.instance, alpha)
    }

    pub fn model(&self, alpha: f64) -> QuboModel {
        build_qubo(self.instance, &self.constraints, &self.penalties(alpha))
    }

    pub fn solve_sa(&self, alpha: f64, params: &AnnealParams) -> SolverReport {
        let started = Instant::now();
        let model = self.model(alpha);
        let mut report = solve_sa(&model, self.instance, &self.constraints, params);
        report.runtime_ms = elapsed_ms(started);
        report
    }
}

/// SplitMix64 over `base + counter·φ`: independent, reproducible per-read
/// and per-layer seeds.
pub fn derive_seed(base: u64, counter: u64) -> u64 {
    let mut z = base.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiSaParams {
    pub n_reads: usize,
    pub t_init_range: (f64, f64),
    pub alpha_range: (f64, f64),
    pub max_iter: usize,
    pub cooling: f64,
    pub seed: u64,
}

impl Default for MultiSaParams {
    fn default() -> Self {
        Self {
            n_reads: 20,
            t_init_range: (80.0, 120.0),
            alpha_range: (0.5, 1.5),
            max_iter: 10_000,
            cooling: 0.95,
            seed: 0,
        }
    }
}

/// Drawn parameters of one ensemble read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadPlan {
    pub t_init: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl MultiSaParams {
    /// The per-read temperatures, multipliers and seeds, all derived from the
    /// base seed.
    pub fn read_plans(&self) -> Vec<ReadPlan> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.n_reads)
            .map(|read| {
                let t_init = rng.gen_range(self.t_init_range.0..=self.t_init_range.1);
                let alpha = rng.gen_range(self.alpha_range.0..=self.alpha_range.1);
                ReadPlan {
                    t_init,
                    alpha,
                    seed: derive_seed(self.seed, read as u64),
                }
            })
            .collect()
    }
}

fn lower_energy(a: &SolverReport, b: &SolverReport) -> bool {
    a.energy.unwrap_or(f64::INFINITY) < b.energy.unwrap_or(f64::INFINITY)
}

/// Multi-read annealing: every read draws its own initial temperature and
/// penalty multiplier. The lowest-energy feasible read wins; without one, the
/// lowest-energy read overall.
pub fn solve_multi_sa(problem: &QuboProblem<'_>, params: &MultiSaParams) -> SolverReport {
    assert!(params.n_reads >= 1, "ensemble needs at least one read");
    let started = Instant::now();
    let mut best: Option<SolverReport> = None;
    for plan in params.read_plans() {
        let anneal = AnnealParams {
            max_iter: params.max_iter,
            t_init: plan.t_init,
            cooling: params.cooling,
            seed: plan.seed,
        };
        let report = problem.solve_sa(plan.alpha, &anneal);
        let better = match &best {
            None => true,
            Some(cur) => match (report.feasible, cur.feasible) {
                (true, false) => true,
                (false, true) => false,
                _ => lower_energy(&report, cur),
            },
        };
        if better {
            best = Some(report);
        }
    }
    let mut report = best.expect("n_reads >= 1").renamed(names::QUBO_MULTI_SA);
    report.seed = params.seed;
    report.runtime_ms = elapsed_ms(started);
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredParams {
    pub layers: Vec<f64>,
    pub max_iter: usize,
    pub cooling: f64,
    pub seed: u64,
}

impl Default for LayeredParams {
    fn default() -> Self {
        Self {
            layers: vec![0.4, 0.7, 1.0, 1.3],
            max_iter: 10_000,
            cooling: 0.95,
            seed: 0,
        }
    }
}

impl LayeredParams {
    /// Initial temperature used for a layer with multiplier `alpha`.
    pub fn layer_temperature(alpha: f64) -> f64 {
        60.0 + alpha * 30.0
    }

    pub fn layer_seed(&self, layer: usize) -> u64 {
        derive_seed(self.seed, layer as u64)
    }
}

/// Layered annealing: one run per multiplier in the schedule, with the
/// initial temperature tied to the multiplier. Returns the feasible layer with
/// the lowest makespan (energy breaks ties), else the lowest-energy layer.
pub fn solve_layered(problem: &QuboProblem<'_>, params: &LayeredParams) -> SolverReport {
    assert!(!params.layers.is_empty(), "layer schedule is empty");
    let started = Instant::now();
    let mut best: Option<SolverReport> = None;
    for (layer, &alpha) in params.layers.iter().enumerate() {
        let anneal = AnnealParams {
            max_iter: params.max_iter,
            t_init: LayeredParams::layer_temperature(alpha),
            cooling: params.cooling,
            seed: params.layer_seed(layer),
        };
        let report = problem.solve_sa(alpha, &anneal);
        let better = match &best {
            None => true,
            Some(cur) => match (report.feasible, cur.feasible) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => {
                    let (a, b) = (report.makespan.unwrap(), cur.makespan.unwrap());
                    a < b || (a == b && lower_energy(&report, cur))
                }
                (false, false) => lower_energy(&report, cur),
            },
        };
        if better {
            best = Some(report);
        }
    }
    let mut report = best.expect("non-empty schedule").renamed(names::QUBO_LAYERED);
    report.seed = params.seed;
    report.runtime_ms = elapsed_ms(started);
    report
}

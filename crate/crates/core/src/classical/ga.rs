//! Genetic algorithm over task→node mappings.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{ConstraintSet, WorkflowInstance};
use crate::report::{elapsed_ms, names, SolverReport};
use crate::schedule::{check_mapping, decode_schedule, Decoded, Mapping};

use super::admissible_nodes;

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    /// Per-gene mutation probability; `None` means `1 / n_tasks`.
    pub mutation_rate: Option<f64>,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 500,
            tournament: 3,
            mutation_rate: None,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GaError> {
        if self.population < 2 {
            return Err(GaError::Population(self.population));
        }
        if self.tournament == 0 || self.tournament > self.population {
            return Err(GaError::Tournament(self.tournament));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(GaError::MutationRate(r));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("population must be at least 2, got {0}")]
    Population(usize),
    #[error("tournament size must be in 1..=population, got {0}")]
    Tournament(usize),
    #[error("mutation rate must lie in [0, 1], got {0}")]
    MutationRate(f64),
}

struct Fitness<'a> {
    instance: &'a WorkflowInstance,
    constraints: &'a ConstraintSet,
    // makespan upper bound and per-violation penalty for infeasible genomes
    ceiling: f64,
    penalty: f64,
    cache: HashMap<Vec<usize>, f64>,
}

impl Fitness<'_> {
    fn of(&mut self, genes: &[usize]) -> f64 {
        if let Some(&f) = self.cache.get(genes) {
            return f;
        }
        let mapping = Mapping::new(genes.to_vec());
        let verdict = check_mapping(self.instance, self.constraints, &Decoded::Mapping(mapping.clone()));
        let f = if verdict.feasible() {
            -decode_schedule(self.instance, self.constraints, &mapping)
                .expect("feasible mapping decodes")
                .makespan
        } else {
            -(self.ceiling + self.penalty * verdict.violations.len() as f64)
        };
        self.cache.insert(genes.to_vec(), f);
        f
    }
}

/// Runs the GA and also returns the best fitness after each generation
/// (index 0 is the initial population).
pub fn solve_ga_traced(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    params: &GaParams,
) -> Result<(SolverReport, Vec<f64>), GaError> {
    params.validate()?;
    let started = Instant::now();
    let admissible = match admissible_nodes(names::GA, params.seed, instance, constraints) {
        Ok(a) => a,
        Err(report) => return Ok((report, Vec::new())),
    };
    let n = instance.n_tasks();
    let mutation = params.mutation_rate.unwrap_or(1.0 / n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let ceiling: f64 = (0..n)
        .map(|i| {
            (0..instance.n_nodes())
                .map(|j| instance.exec_time(i, j))
                .fold(0.0, f64::max)
        })
        .sum();
    let mut fitness = Fitness {
        instance,
        constraints,
        ceiling,
        penalty: instance.max_exec_time() * n as f64,
        cache: HashMap::new(),
    };

    let random_gene = |rng: &mut ChaCha8Rng, i: usize| admissible[i][rng.gen_range(0..admissible[i].len())];
    let mut population: Vec<Vec<usize>> = (0..params.population)
        .map(|_| (0..n).map(|i| random_gene(&mut rng, i)).collect())
        .collect();
    let mut scores: Vec<f64> = population.iter().map(|g| fitness.of(g)).collect();

    let best_index = |scores: &[f64]| {
        scores
            .iter()
            .enumerate()
            .fold(0, |b, (k, &s)| if s > scores[b] { k } else { b })
    };
    let mut trace = vec![scores[best_index(&scores)]];

    for _ in 0..params.generations {
        let elite = population[best_index(&scores)].clone();
        let mut next = Vec::with_capacity(params.population);
        next.push(elite);
        while next.len() < params.population {
            let a = tournament(&mut rng, &scores, params.tournament);
            let b = tournament(&mut rng, &scores, params.tournament);
            let mut child = if n > 1 {
                let cut = rng.gen_range(1..n);
                let mut c = population[a][..cut].to_vec();
                c.extend_from_slice(&population[b][cut..]);
                c
            } else {
                population[a].clone()
            };
            for (i, gene) in child.iter_mut().enumerate() {
                if rng.gen::<f64>() < mutation {
                    *gene = random_gene(&mut rng, i);
                }
            }
            next.push(child);
        }
        population = next;
        scores = population.iter().map(|g| fitness.of(g)).collect();
        trace.push(scores[best_index(&scores)]);
    }

    let best = population.swap_remove(best_index(&scores));
    let mut report = SolverReport::evaluate(
        names::GA,
        params.seed,
        instance,
        constraints,
        Decoded::Mapping(Mapping::new(best)),
    );
    report.runtime_ms = elapsed_ms(started);
    Ok((report, trace))
}

pub fn solve_ga(
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    params: &GaParams,
) -> Result<SolverReport, GaError> {
    solve_ga_traced(instance, constraints, params).map(|(r, _)| r)
}

fn tournament(rng: &mut ChaCha8Rng, scores: &[f64], size: usize) -> usize {
    let mut winner = rng.gen_range(0..scores.len());
    for _ in 1..size {
        let k = rng.gen_range(0..scores.len());
        if scores[k] > scores[winner] {
            winner = k;
        }
    }
    winner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_instance, BuiltinInstance};

    fn quick(seed: u64) -> GaParams {
        GaParams {
            population: 30,
            generations: 60,
            ..GaParams::default()
        }
        .with_seed(seed)
    }

    #[test]
    fn elitism_keeps_best_fitness_monotone() {
        let inst = builtin_instance(BuiltinInstance::Medium6T);
        let (_, trace) = solve_ga_traced(&inst, &ConstraintSet::all(), &quick(3)).unwrap();
        assert_eq!(trace.len(), 61);
        assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn same_seed_same_result() {
        let inst = builtin_instance(BuiltinInstance::Medium6T);
        let a = solve_ga(&inst, &ConstraintSet::all(), &quick(9)).unwrap();
        let b = solve_ga(&inst, &ConstraintSet::all(), &quick(9)).unwrap();
        assert_eq!(a.mapping(), b.mapping());
    }

    #[test]
    fn reference_workflows_reach_ten_seconds() {
        for which in [BuiltinInstance::W1, BuiltinInstance::W2] {
            let r = solve_ga(&builtin_instance(which), &ConstraintSet::all(), &quick(1)).unwrap();
            assert!(r.feasible);
            assert!((r.makespan.unwrap() - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let inst = builtin_instance(BuiltinInstance::W1);
        let c = ConstraintSet::all();
        let bad = |p: GaParams| solve_ga(&inst, &c, &p).unwrap_err();
        assert_eq!(
            bad(GaParams {
                population: 1,
                ..GaParams::default()
            }),
            GaError::Population(1)
        );
        assert_eq!(
            bad(GaParams {
                tournament: 0,
                ..GaParams::default()
            }),
            GaError::Tournament(0)
        );
        assert_eq!(
            bad(GaParams {
                mutation_rate: Some(1.5),
                ..GaParams::default()
            }),
            GaError::MutationRate(1.5)
        );
    }
}

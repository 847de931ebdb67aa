//! Enhancement strategies layered on the annealers and the classical
//! baselines. Reports that owe their feasibility to a classical fallback are
//! tagged so results can be attributed.

use std::time::{Duration, Instant};

use crate::anneal::{derive_seed, solve_multi_sa, solve_sa, AnnealParams, MultiSaParams, QuboProblem};
use crate::classical::{solve_exact, solve_heft, ExactParams};
use crate::model::{ConstraintSet, WorkflowInstance};
use crate::qubo::{build_qubo, PenaltyConfig};
use crate::report::{elapsed_ms, SolverReport};

pub mod names {
    pub const ADAPTIVE_PENALTY: &str = "adaptive-penalty";
    pub const HYBRID_REPAIR: &str = "hybrid-repair";
    pub const MULTI_ATTEMPT: &str = "multi-attempt";
    pub const PROGRESSIVE_PENALTY: &str = "progressive-penalty";
    pub const TWO_STAGE: &str = "two-stage";
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyConfig {
    /// Penalties set to `factor` times the exact makespan.
    AdaptivePenalty {
        factor: f64,
        exact_timeout: Duration,
    },
    /// Anneal at a weak multiplier, repair with HEFT when infeasible.
    HybridRepair {
        alpha: f64,
    },
    MultiAttempt(MultiSaParams),
    /// Start at `alpha`, grow by `growth` until feasible or out of attempts.
    ProgressivePenalty {
        alpha: f64,
        growth: f64,
        max_attempts: usize,
    },
    /// Anneal at a strong multiplier, fall back to HEFT when infeasible.
    TwoStage {
        alpha: f64,
    },
}

impl StrategyConfig {
    pub fn adaptive_penalty() -> Self {
        Self::AdaptivePenalty {
            factor: 2.5,
            exact_timeout: ExactParams::default().timeout,
        }
    }

    pub fn hybrid_repair() -> Self {
        Self::HybridRepair { alpha: 0.5 }
    }

    pub fn multi_attempt() -> Self {
        Self::MultiAttempt(MultiSaParams {
            alpha_range: (1.5, 3.0),
            ..MultiSaParams::default()
        })
    }

    pub fn progressive_penalty() -> Self {
        Self::ProgressivePenalty {
            alpha: 1.0,
            growth: 1.5,
            max_attempts: 5,
        }
    }

    pub fn two_stage() -> Self {
        Self::TwoStage { alpha: 3.0 }
    }

    /// All five with their default parameters.
    pub fn all() -> [Self; 5] {
        [
            Self::adaptive_penalty(),
            Self::hybrid_repair(),
            Self::multi_attempt(),
            Self::progressive_penalty(),
            Self::two_stage(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::AdaptivePenalty { .. } => names::ADAPTIVE_PENALTY,
            Self::HybridRepair { .. } => names::HYBRID_REPAIR,
            Self::MultiAttempt(_) => names::MULTI_ATTEMPT,
            Self::ProgressivePenalty { .. } => names::PROGRESSIVE_PENALTY,
            Self::TwoStage { .. } => names::TWO_STAGE,
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Self::AdaptivePenalty { factor, .. } => *factor > 0.0,
            Self::HybridRepair { alpha } | Self::TwoStage { alpha } => *alpha > 0.0,
            Self::MultiAttempt(p) => p.n_reads >= 1 && p.alpha_range.0 > 0.0 && p.alpha_range.0 <= p.alpha_range.1,
            Self::ProgressivePenalty {
                alpha,
                growth,
                max_attempts,
            } => *alpha > 0.0 && *growth > 1.0 && *max_attempts >= 1,
        }
    }
}

/// Penalty weights where every multiplier-scaled weight equals
/// `factor · makespan`; the feature weight keeps its default.
pub fn adaptive_penalties(instance: &WorkflowInstance, factor: f64, makespan: f64) -> PenaltyConfig {
    let lambda = factor * makespan;
    PenaltyConfig {
        alpha: 1.0,
        lambda_assign: lambda,
        lambda_capacity: lambda,
        lambda_compat: 100.0 * instance.max_exec_time(),
        lambda_dep: lambda,
        lambda_comm: lambda,
    }
}

/// The multiplier sequence progressive penalty walks through.
pub fn progressive_alphas(alpha: f64, growth: f64, max_attempts: usize) -> Vec<f64> {
    std::iter::successors(Some(alpha), |a| Some(a * growth))
        .take(max_attempts)
        .collect()
}

fn heft_stand_in(instance: &WorkflowInstance, constraints: &ConstraintSet, tag: &str) -> SolverReport {
    solve_heft(instance, constraints).with_tag(tag)
}

pub fn run_strategy(
    config: &StrategyConfig,
    instance: &WorkflowInstance,
    constraints: &ConstraintSet,
    seed: u64,
) -> SolverReport {
    assert!(config.is_valid(), "invalid strategy parameters: {config:?}");
    let started = Instant::now();
    let problem = QuboProblem::new(instance, *constraints);
    let anneal = AnnealParams::with_seed(seed);

    let mut report = match config {
        StrategyConfig::AdaptivePenalty { factor, exact_timeout } => {
            let exact = solve_exact(
                instance,
                constraints,
                &ExactParams {
                    timeout: *exact_timeout,
                },
            );
            match exact.makespan {
                Some(m) => {
                    let model = build_qubo(instance, constraints, &adaptive_penalties(instance, *factor, m));
                    solve_sa(&model, instance, constraints, &anneal)
                }
                None => exact,
            }
        }
        StrategyConfig::HybridRepair { alpha } => {
            let sa = problem.solve_sa(*alpha, &anneal);
            if sa.feasible {
                sa
            } else {
                heft_stand_in(instance, constraints, "repaired")
            }
        }
        StrategyConfig::MultiAttempt(params) => solve_multi_sa(&problem, &MultiSaParams { seed, ..params.clone() }),
        StrategyConfig::ProgressivePenalty {
            alpha,
            growth,
            max_attempts,
        } => {
            let alphas = progressive_alphas(*alpha, *growth, *max_attempts);
            let mut last = None;
            for (attempt, &a) in alphas.iter().enumerate() {
                let r = problem.solve_sa(a, &AnnealParams::with_seed(derive_seed(seed, attempt as u64)));
                let done = r.feasible;
                last = Some(r.with_tag(format!("attempts={} alpha={a}", attempt + 1)));
                if done {
                    break;
                }
            }
            last.expect("at least one attempt")
        }
        StrategyConfig::TwoStage { alpha } => {
            let sa = problem.solve_sa(*alpha, &anneal);
            if sa.feasible {
                sa
            } else {
                heft_stand_in(instance, constraints, "fallback")
            }
        }
    };
    report.solver = config.name().to_string();
    report.seed = seed;
    report.runtime_ms = elapsed_ms(started);
    report
}

mod common;

use proptest::prelude::*;

use common::{small_instance, TOL};
use wfqubo::classical::{solve_exhaustive_oracle, solve_heft};
use wfqubo::model::{builtin_instance, generate_scaling_instance, BuiltinInstance, ConstraintSet, SCALING_SIZES};
use wfqubo::strategy::{progressive_alphas, run_strategy, StrategyConfig};

#[test]
fn repair_strategies_are_feasible_wherever_heft_is() {
    let c = ConstraintSet::all();
    for &n in &SCALING_SIZES {
        for seed in 100..110 {
            let inst = generate_scaling_instance(n, seed).unwrap();
            if !solve_heft(&inst, &c).feasible {
                continue;
            }
            for config in [StrategyConfig::hybrid_repair(), StrategyConfig::two_stage()] {
                let r = run_strategy(&config, &inst, &c, seed);
                assert!(r.feasible, "{} on {}", config.name(), inst.name());
            }
        }
    }
}

#[test]
fn progressive_tag_records_the_attempt_that_stopped() {
    let inst = builtin_instance(BuiltinInstance::Medium6T);
    let config = StrategyConfig::progressive_penalty();
    let alphas = match config {
        StrategyConfig::ProgressivePenalty {
            alpha,
            growth,
            max_attempts,
        } => progressive_alphas(alpha, growth, max_attempts),
        _ => unreachable!(),
    };
    for seed in 0..5 {
        let r = run_strategy(&config, &inst, &ConstraintSet::all(), seed);
        let tag = r.tag.expect("progressive runs are tagged");
        let attempts: usize = tag
            .strip_prefix("attempts=")
            .and_then(|rest| rest.split(' ').next())
            .and_then(|k| k.parse().ok())
            .expect("tag starts with the attempt count");
        assert!((1..=alphas.len()).contains(&attempts));
        assert!(tag.ends_with(&format!("alpha={}", alphas[attempts - 1])));
        // stopping early means the attempt succeeded
        assert!(r.feasible || attempts == alphas.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feasible_strategy_results_never_beat_the_optimum(seed in any::<u64>()) {
        let inst = small_instance(seed, 5, 3);
        let c = ConstraintSet::all();
        let best = solve_exhaustive_oracle(&inst, &c).unwrap().makespan.unwrap();
        for config in StrategyConfig::all() {
            let r = run_strategy(&config, &inst, &c, seed);
            prop_assert_eq!(r.solver.as_str(), config.name());
            prop_assert_eq!(r.feasible, r.makespan.is_some());
            if let Some(m) = r.makespan {
                prop_assert!(m >= best - TOL);
            }
        }
    }
}

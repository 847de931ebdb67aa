//! The five enhancement strategies on Medium_6T over a few seeds. Tags show
//! when a strategy fell back to HEFT or how many penalty rounds it needed.
//!
//! `cargo run --release --example strategies`

use wfqubo::model::{builtin_instance, BuiltinInstance, ConstraintSet};
use wfqubo::strategy::{run_strategy, StrategyConfig};

fn main() {
    let inst = builtin_instance(BuiltinInstance::Medium6T);
    let c = ConstraintSet::all();
    for config in StrategyConfig::all() {
        println!("{}", config.name());
        for seed in 0..4 {
            let r = run_strategy(&config, &inst, &c, seed);
            let span = r.makespan.map_or_else(|| "-".to_string(), |m| format!("{m:.3}"));
            println!("  seed {seed}: makespan {span:>7}  {}", r.tag.as_deref().unwrap_or(""));
        }
    }
}

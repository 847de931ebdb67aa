//! Builds the QUBO for W1 and shows how the penalties separate a valid
//! one-hot mapping from broken assignments.
//!
//! `cargo run --example build_qubo [alpha]`

use wfqubo::classical::solve_exhaustive_oracle;
use wfqubo::model::{builtin_instance, BuiltinInstance, ConstraintSet};
use wfqubo::qubo::{build_qubo, default_penalties};

fn main() {
    let alpha: f64 = std::env::args()
        .nth(1)
        .map_or(1.0, |a| a.parse().expect("alpha must be a number"));
    let inst = builtin_instance(BuiltinInstance::W1);
    let c = ConstraintSet::all();
    let p = default_penalties(&inst, alpha);
    let model = build_qubo(&inst, &c, &p);

    println!("{}: {} variables, offset {}", inst.name(), model.size(), model.offset());
    println!(
        "weights: assign {} capacity {} feature {} dependency {} transfer {}",
        p.lambda_assign, p.lambda_capacity, p.lambda_compat, p.lambda_dep, p.lambda_comm
    );

    let best = solve_exhaustive_oracle(&inst, &c).unwrap();
    let x = model.encode(best.mapping().unwrap());
    println!(
        "certified optimum (makespan {:?}) energy {}",
        best.makespan,
        model.energy(&x).unwrap()
    );

    let empty = vec![false; model.size()];
    println!("nothing assigned:   energy {}", model.energy(&empty).unwrap());

    let mut doubled = x.clone();
    doubled[model.var(0, 0)] = true;
    println!("t1 on both nodes:   energy {}", model.energy(&doubled).unwrap());
    println!("decodes to {:?}", model.decode(&doubled).unwrap());

    println!("\nnon-zero upper triangle (u, v, q):");
    model.write_triplets(std::io::stdout().lock()).unwrap();
}

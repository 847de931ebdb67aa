//! Generates a scaling instance, writes it as JSON and reads it back.
//!
//! `cargo run --example generate_instance [tasks] [seed]`

use wfqubo::classical::solve_heft;
use wfqubo::model::{generate_scaling_instance, load_instance, save_instance, ConstraintSet};

fn main() {
    let mut args = std::env::args().skip(1);
    let tasks: usize = args.next().map_or(10, |a| a.parse().expect("task count"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));

    let inst = generate_scaling_instance(tasks, seed).expect("sizes are 5, 10, 15 or 20");
    println!(
        "{}: {} tasks, {} nodes, {} edges",
        inst.name(),
        inst.n_tasks(),
        inst.n_nodes(),
        inst.edges().len()
    );
    for node in inst.nodes() {
        println!("  {} cores={} features={:?}", node.id, node.capacity, node.features);
    }

    let path = std::env::temp_dir().join(format!("{}.json", inst.name()));
    save_instance(&inst, &path).unwrap();
    let back = load_instance(&path).unwrap();
    assert_eq!(back, inst);
    println!("round-tripped through {}", path.display());

    let heft = solve_heft(&inst, &ConstraintSet::all());
    println!("heft makespan {:?}", heft.makespan);
}

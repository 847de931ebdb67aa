//! Decodes the W2 diamond on its fast node and prints the schedule as CSV,
//! first with transfers charged and then with the branches split across
//! nodes.
//!
//! `cargo run --example gantt_schedule`

use wfqubo::model::{builtin_instance, BuiltinInstance, ConstraintSet};
use wfqubo::schedule::{decode_schedule, Mapping};

fn main() {
    let inst = builtin_instance(BuiltinInstance::W2);
    let c = ConstraintSet::all();
    for nodes in [vec![1, 1, 1, 1], vec![1, 0, 2, 1]] {
        let schedule = decode_schedule(&inst, &c, &Mapping::new(nodes)).unwrap();
        println!("makespan {} utilization {:.3}", schedule.makespan, schedule.utilization);
        schedule.write_csv(&inst, std::io::stdout().lock()).unwrap();
        println!();
    }
}

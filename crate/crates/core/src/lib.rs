//! Workflow scheduling on heterogeneous nodes, formulated as a QUBO and solved
//! with simulated annealing, alongside classical baselines and a small
//! experiment harness.

pub mod anneal;
pub mod classical;
pub mod experiment;
pub mod model;
pub mod qubo;
pub mod report;
pub mod schedule;
pub mod strategy;

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DependencyEdge, ModelError, Node, Task, WorkflowInstance};

pub const SCALING_SIZES: [usize; 4] = [5, 10, 15, 20];

/// Knobs of the layered random workflow generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub min_nodes: usize,
    pub tasks_per_node: usize,
    pub capacities: Vec<u32>,
    pub exec_range: (f64, f64),
    /// Exec times and payloads are rounded to this step.
    pub resolution: f64,
    pub cores_range: (u32, u32),
    /// Probability that a task needs the restrictive label.
    pub restrictive_prob: f64,
    /// How many nodes carry the restrictive label.
    pub restrictive_nodes: usize,
    /// Probability that a task also needs the secondary (universal) label.
    pub secondary_prob: f64,
    pub tasks_per_layer: usize,
    pub edge_prob: f64,
    pub output_range: (f64, f64),
    pub bandwidth: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            min_nodes: 3,
            tasks_per_node: 5,
            capacities: vec![2, 4, 8],
            exec_range: (0.1, 1.0),
            resolution: 0.1,
            cores_range: (1, 2),
            restrictive_prob: 0.3,
            restrictive_nodes: 2,
            secondary_prob: 0.5,
            tasks_per_layer: 4,
            edge_prob: 0.4,
            output_range: (0.0, 1.0),
            bandwidth: 2.0,
        }
    }
}

const BASE_LABEL: &str = "cpu";
const SECONDARY_LABEL: &str = "mem";
const RESTRICTIVE_LABEL: &str = "gpu";

/// Layered random workflow for the scaling study; a pure function of
/// `(n_tasks, seed)`.
pub fn generate_scaling_instance(n_tasks: usize, seed: u64) -> Result<WorkflowInstance, ModelError> {
    if !SCALING_SIZES.contains(&n_tasks) {
        return Err(ModelError::UnsupportedSize(n_tasks));
    }
    Ok(generate_with(n_tasks, seed, &GeneratorParams::default()))
}

/// Same generator with arbitrary size and parameters.
pub fn generate_with(n_tasks: usize, seed: u64, params: &GeneratorParams) -> WorkflowInstance {
    assert!(n_tasks > 0, "generator needs at least one task");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n_tasks as u64) << 48));
    let n_nodes = params.min_nodes.max(n_tasks.div_ceil(params.tasks_per_node));
    let quantize = |x: f64| (x / params.resolution).round() * params.resolution;
    let width = (n_tasks.max(n_nodes) + 1).to_string().len();

    let restrictive: BTreeSet<usize> = sample(&mut rng, n_nodes, params.restrictive_nodes.min(n_nodes))
        .into_iter()
        .collect();
    let nodes: Vec<Node> = (0..n_nodes)
        .map(|j| {
            let mut features: BTreeSet<String> = [BASE_LABEL, SECONDARY_LABEL].iter().map(|s| s.to_string()).collect();
            if restrictive.contains(&j) {
                features.insert(RESTRICTIVE_LABEL.to_string());
            }
            Node {
                id: format!("n{:0width$}", j + 1),
                capacity: params.capacities[rng.gen_range(0..params.capacities.len())],
                features,
            }
        })
        .collect();

    let tasks: Vec<Task> = (0..n_tasks)
        .map(|i| {
            let mut features = BTreeSet::from([BASE_LABEL.to_string()]);
            if rng.gen_bool(params.secondary_prob) {
                features.insert(SECONDARY_LABEL.to_string());
            }
            if rng.gen_bool(params.restrictive_prob) {
                features.insert(RESTRICTIVE_LABEL.to_string());
            }
            let exec_time = (0..n_nodes)
                .map(|_| {
                    let e = quantize(rng.gen_range(params.exec_range.0..=params.exec_range.1));
                    e.max(params.resolution)
                })
                .collect();
            let max_fit = nodes
                .iter()
                .filter(|n| features.is_subset(&n.features))
                .map(|n| n.capacity)
                .max()
                .expect("base label is universal and restrictive label is held by some node");
            let cores = rng
                .gen_range(params.cores_range.0..=params.cores_range.1)
                .min(max_fit)
                .max(1);
            let output_data = quantize(rng.gen_range(params.output_range.0..=params.output_range.1));
            Task {
                id: format!("t{:0width$}", i + 1),
                cores,
                features,
                exec_time,
                output_data,
            }
        })
        .collect();

    let n_layers = n_tasks.div_ceil(params.tasks_per_layer).max(1);
    let layer_of = |i: usize| i * n_layers / n_tasks;
    let mut edges = Vec::new();
    for src in 0..n_tasks {
        for dst in (src + 1)..n_tasks {
            if layer_of(dst) == layer_of(src) + 1 && rng.gen_bool(params.edge_prob) {
                edges.push(DependencyEdge { src, dst });
            }
        }
    }

    WorkflowInstance::new(format!("scale{n_tasks}_s{seed}"), tasks, nodes, edges, params.bandwidth)
        .expect("generator output satisfies instance invariants")
}

/// Upper bound on the edge count of a generated instance: all pairs between
/// adjacent layers.
pub fn max_layered_edges(n_tasks: usize, params: &GeneratorParams) -> usize {
    let n_layers = n_tasks.div_ceil(params.tasks_per_layer).max(1);
    let mut sizes = vec![0usize; n_layers];
    for i in 0..n_tasks {
        sizes[i * n_layers / n_tasks] += 1;
    }
    sizes.windows(2).map(|w| w[0] * w[1]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_scaling_instance(5, 1).unwrap();
        let b = generate_scaling_instance(5, 1).unwrap();
        assert_eq!(a, b);
        let c = generate_scaling_instance(5, 2).unwrap();
        let differs = a.tasks().iter().zip(c.tasks()).any(|(x, y)| x.exec_time != y.exec_time);
        assert!(differs);
    }

    #[test]
    fn twenty_tasks_use_four_nodes() {
        let params = GeneratorParams::default();
        let inst = generate_scaling_instance(20, 1).unwrap();
        assert_eq!(inst.n_tasks(), 20);
        assert_eq!(inst.n_nodes(), 4);
        assert!(inst.edges().len() <= max_layered_edges(20, &params));
        for e in inst.edges() {
            assert!(e.src < e.dst);
        }
    }

    #[test]
    fn generated_values_respect_ranges() {
        let params = GeneratorParams::default();
        for &n in &SCALING_SIZES {
            for seed in 0..20 {
                let inst = generate_scaling_instance(n, seed).unwrap();
                assert_eq!(inst.n_nodes(), 3usize.max(n.div_ceil(5)));
                assert_eq!(inst.bandwidth(), 2.0);
                for node in inst.nodes() {
                    assert!(params.capacities.contains(&node.capacity));
                }
                let gpu_nodes = inst
                    .nodes()
                    .iter()
                    .filter(|n| n.features.contains(RESTRICTIVE_LABEL))
                    .count();
                assert_eq!(gpu_nodes, 2);
                for t in inst.tasks() {
                    assert!(t.exec_time.iter().all(|e| (0.1..=1.0).contains(e)));
                    assert!((0.0..=1.0).contains(&t.output_data));
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_size() {
        assert_eq!(
            generate_scaling_instance(7, 0).unwrap_err(),
            ModelError::UnsupportedSize(7)
        );
    }
}

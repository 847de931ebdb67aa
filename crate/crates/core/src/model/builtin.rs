//! Fixed reference instances.
//!
//! `W1` and `W2` are the ground-truth workflows with a 10.0 s optimum (the
//! optimum is re-certified by the exhaustive oracle in the test suite).
//! `Medium_6T` exercises all five constraint classes at once.

use std::fmt;
use std::str::FromStr;

use super::{DependencyEdge, ModelError, Node, Task, WorkflowInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinInstance {
    W1,
    W2,
    Medium6T,
}

impl BuiltinInstance {
    pub const ALL: [BuiltinInstance; 3] = [Self::W1, Self::W2, Self::Medium6T];

    pub fn name(self) -> &'static str {
        match self {
            Self::W1 => "W1",
            Self::W2 => "W2",
            Self::Medium6T => "Medium_6T",
        }
    }
}

impl fmt::Display for BuiltinInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinInstance {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "W1" | "w1" => Ok(Self::W1),
            "W2" | "w2" => Ok(Self::W2),
            "Medium_6T" | "medium_6t" | "Medium6T" => Ok(Self::Medium6T),
            other => Err(ModelError::UnknownBuiltin(other.to_string())),
        }
    }
}

pub fn builtin_instance(which: BuiltinInstance) -> WorkflowInstance {
    let blueprint = match which {
        BuiltinInstance::W1 => w1(),
        BuiltinInstance::W2 => w2(),
        BuiltinInstance::Medium6T => medium_6t(),
    };
    blueprint.build(which.name())
}

// id, cores, features
type NodeRow = (&'static str, u32, &'static [&'static str]);
// id, cores, features, exec per node, output_data
type TaskRow = (&'static str, u32, &'static [&'static str], &'static [f64], f64);

struct Blueprint {
    nodes: &'static [NodeRow],
    tasks: &'static [TaskRow],
    edges: &'static [(usize, usize)],
    bandwidth: f64,
}

impl Blueprint {
    fn build(&self, name: &str) -> WorkflowInstance {
        let set = |labels: &[&str]| labels.iter().map(|s| s.to_string()).collect();
        let nodes = self
            .nodes
            .iter()
            .map(|(id, capacity, features)| Node {
                id: id.to_string(),
                capacity: *capacity,
                features: set(features),
            })
            .collect();
        let tasks = self
            .tasks
            .iter()
            .map(|(id, cores, features, exec, output)| Task {
                id: id.to_string(),
                cores: *cores,
                features: set(features),
                exec_time: exec.to_vec(),
                output_data: *output,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(src, dst)| DependencyEdge { src, dst })
            .collect();
        WorkflowInstance::new(name, tasks, nodes, edges, self.bandwidth).expect("built-in instance is valid")
    }
}

// 3-task chain. Optimal: everything on n2, 0.25 + 0.5 + 9.25 = 10.0 with no
// transfers. Producers are kept short because the dependency penalty grows
// with producer exec time times out-degree.
fn w1() -> Blueprint {
    Blueprint {
        nodes: &[("n1", 4, &["cpu"]), ("n2", 4, &["cpu", "gpu"])],
        tasks: &[
            ("t1", 1, &["cpu", "gpu"], &[0.5, 0.25], 2.0),
            ("t2", 1, &["cpu"], &[1.0, 0.5], 0.5),
            ("t3", 1, &["cpu", "gpu"], &[9.5, 9.25], 0.0),
        ],
        edges: &[(0, 1), (1, 2)],
        bandwidth: 1.0,
    }
}

// 4-task diamond over 3 nodes. Optimal: everything on n2 with t2 and t3
// running side by side, 0.25 + 0.5 + 9.25 = 10.0.
fn w2() -> Blueprint {
    Blueprint {
        nodes: &[("n1", 4, &["cpu"]), ("n2", 8, &["cpu", "gpu"]), ("n3", 2, &["cpu"])],
        tasks: &[
            ("t1", 1, &["cpu", "gpu"], &[0.5, 0.25, 0.5], 0.5),
            ("t2", 1, &["cpu"], &[3.0, 0.5, 3.0], 0.5),
            ("t3", 1, &["cpu"], &[3.0, 0.5, 3.0], 0.5),
            ("t4", 1, &["cpu", "gpu"], &[9.5, 9.25, 9.5], 0.0),
        ],
        edges: &[(0, 1), (0, 2), (1, 3), (2, 3)],
        bandwidth: 1.0,
    }
}

// Two branches joining into a long gpu task. t4 needs 2 cores and mem, so on
// n3 it fills the node. Producers stay short and the sink long: with weak
// penalties the sink's own exec time outweighs the assignment reward, with
// unit or stronger penalties every row is cheaper filled than empty.
fn medium_6t() -> Blueprint {
    Blueprint {
        nodes: &[
            ("n1", 4, &["cpu", "mem"]),
            ("n2", 4, &["cpu", "gpu"]),
            ("n3", 2, &["cpu", "gpu", "mem"]),
        ],
        tasks: &[
            ("t1", 1, &["cpu", "gpu"], &[0.75, 0.25, 1.25], 1.0),
            ("t2", 1, &["cpu", "gpu"], &[1.0, 1.0, 0.5], 0.0),
            ("t3", 1, &["cpu", "gpu"], &[0.75, 0.5, 1.25], 0.25),
            ("t4", 2, &["cpu", "mem"], &[1.0, 1.25, 1.0], 0.25),
            ("t5", 1, &["cpu", "gpu"], &[1.5, 1.25, 1.25], 0.0),
            ("t6", 1, &["cpu", "gpu"], &[9.75, 9.0, 11.0], 0.0),
        ],
        edges: &[(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5)],
        bandwidth: 1.0,
    }
}

//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "W1",
//!   "bandwidth": 1.0,
//!   "tasks": [{"id": "t1", "cores": 1, "features": ["cpu"],
//!              "exec_time": {"n1": 1.0, "n2": 0.5}, "output_data": 1.5}],
//!   "nodes": [{"id": "n1", "capacity": 4, "features": ["cpu"]}],
//!   "edges": [["t1", "t2"]]
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DependencyEdge, ModelError, Node, Task, WorkflowInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub bandwidth: f64,
    pub tasks: Vec<TaskRecord>,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRecord {
    pub id: String,
    pub cores: u32,
    pub features: BTreeSet<String>,
    pub exec_time: BTreeMap<String, f64>,
    pub output_data: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: String,
    pub capacity: u32,
    pub features: BTreeSet<String>,
}

impl From<&WorkflowInstance> for InstanceFile {
    fn from(inst: &WorkflowInstance) -> Self {
        let nodes = inst.nodes();
        InstanceFile {
            name: inst.name().to_string(),
            bandwidth: inst.bandwidth(),
            tasks: inst
                .tasks()
                .iter()
                .map(|t| TaskRecord {
                    id: t.id.clone(),
                    cores: t.cores,
                    features: t.features.clone(),
                    exec_time: nodes
                        .iter()
                        .zip(&t.exec_time)
                        .map(|(n, e)| (n.id.clone(), *e))
                        .collect(),
                    output_data: t.output_data,
                })
                .collect(),
            nodes: nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.clone(),
                    capacity: n.capacity,
                    features: n.features.clone(),
                })
                .collect(),
            edges: inst
                .edges()
                .iter()
                .map(|e| (inst.tasks()[e.src].id.clone(), inst.tasks()[e.dst].id.clone()))
                .collect(),
        }
    }
}

impl TryFrom<InstanceFile> for WorkflowInstance {
    type Error = ModelError;

    fn try_from(file: InstanceFile) -> Result<Self, Self::Error> {
        let nodes: Vec<Node> = file
            .nodes
            .into_iter()
            .map(|n| Node {
                id: n.id,
                capacity: n.capacity,
                features: n.features,
            })
            .collect();
        let mut tasks = Vec::with_capacity(file.tasks.len());
        for rec in file.tasks {
            if let Some(unknown) = rec.exec_time.keys().find(|k| !nodes.iter().any(|n| &n.id == *k)) {
                return Err(ModelError::invalid(
                    "exec_time covers every node",
                    format!("task `{}` lists unknown node `{unknown}`", rec.id),
                ));
            }
            let mut exec_time = Vec::with_capacity(nodes.len());
            for node in &nodes {
                match rec.exec_time.get(&node.id) {
                    Some(e) => exec_time.push(*e),
                    None => {
                        return Err(ModelError::invalid(
                            "exec_time covers every node",
                            format!("task `{}` has no exec time for node `{}`", rec.id, node.id),
                        ))
                    }
                }
            }
            tasks.push(Task {
                id: rec.id,
                cores: rec.cores,
                features: rec.features,
                exec_time,
                output_data: rec.output_data,
            });
        }
        let lookup = |id: &str| {
            tasks
                .iter()
                .position(|t| t.id == id)
                .ok_or_else(|| ModelError::invalid("edge endpoints exist", format!("unknown task `{id}` in edges")))
        };
        let edges = file
            .edges
            .iter()
            .map(|(s, d)| {
                Ok(DependencyEdge {
                    src: lookup(s)?,
                    dst: lookup(d)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        WorkflowInstance::new(file.name, tasks, nodes, edges, file.bandwidth)
    }
}

pub fn parse_instance(text: &str) -> Result<WorkflowInstance, ModelError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    WorkflowInstance::try_from(file)
}

pub fn to_json(instance: &WorkflowInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("instance serializes")
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<WorkflowInstance, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_instance(&text)
}

pub fn save_instance(instance: &WorkflowInstance, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let mut text = to_json(instance);
    text.push('\n');
    fs::write(path, text).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_instance, BuiltinInstance};

    const W1_LIKE: &str = r#"{
        "name": "tiny",
        "bandwidth": 1.0,
        "tasks": [
            {"id": "a", "cores": 1, "features": ["cpu"], "exec_time": {"n1": 1.0}, "output_data": 0.0},
            {"id": "b", "cores": 1, "features": ["cpu"], "exec_time": {"n1": 2.0}, "output_data": 0.0}
        ],
        "nodes": [{"id": "n1", "capacity": 2, "features": ["cpu"]}],
        "edges": [["a", "b"]]
    }"#;

    #[test]
    fn round_trips_builtin() {
        let w1 = builtin_instance(BuiltinInstance::W1);
        assert_eq!(parse_instance(&to_json(&w1)).unwrap(), w1);
    }

    #[test]
    fn parses_minimal_file() {
        let inst = parse_instance(W1_LIKE).unwrap();
        assert_eq!(inst.n_tasks(), 2);
        assert_eq!(inst.edges(), &[DependencyEdge { src: 0, dst: 1 }]);
    }

    #[test]
    fn missing_bandwidth_names_the_field() {
        let text = W1_LIKE.replace("\"bandwidth\": 1.0,", "");
        let err = parse_instance(&text).unwrap_err();
        match err {
            ModelError::Parse { message, line, .. } => {
                assert!(message.contains("bandwidth"), "{message}");
                assert!(line > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = W1_LIKE.replace("\"bandwidth\": 1.0,", "\"bandwidth\": 1.0, \"colour\": 3,");
        let err = parse_instance(&text).unwrap_err();
        assert!(matches!(err, ModelError::Parse { ref message, .. } if message.contains("colour")));
    }

    #[test]
    fn cyclic_file_is_not_a_dag() {
        let text = W1_LIKE.replace(r#"[["a", "b"]]"#, r#"[["a", "b"], ["b", "a"]]"#);
        let err = parse_instance(&text).unwrap_err();
        assert!(err.to_string().contains("not a DAG"), "{err}");
    }

    #[test]
    fn missing_exec_entry_rejected() {
        let text = W1_LIKE.replace(r#"{"n1": 2.0}"#, "{}");
        let err = parse_instance(&text).unwrap_err();
        assert!(matches!(
            err,
            ModelError::Invalid {
                rule: "exec_time covers every node",
                ..
            }
        ));
    }
}

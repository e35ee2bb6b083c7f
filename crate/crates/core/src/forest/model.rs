//! JSON model files.

use super::{DecisionTree, Forest, Node};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::stats::{FEATURE_NAMES, NUM_FEATURES};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ModelFile {
    format_version: u64,
    feature_order: Vec<String>,
    classes: Vec<Configuration>,
    seed: u64,
    trees: Vec<TreeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    nodes: Vec<NodeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeFile {
    Split { f: usize, t: f64, l: usize, r: usize },
    Leaf { leaf: Vec<u32> },
}

pub fn serialize_forest(forest: &Forest) -> Result<String> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        feature_order: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        classes: forest.classes.clone(),
        seed: forest.seed,
        trees: forest
            .trees
            .iter()
            .map(|t| TreeFile {
                nodes: t
                    .nodes
                    .iter()
                    .map(|n| match n {
                        Node::Split { feature, threshold, left, right } => {
                            NodeFile::Split { f: *feature, t: *threshold, l: *left, r: *right }
                        }
                        Node::Leaf { counts } => NodeFile::Leaf { leaf: counts.clone() },
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

fn model_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Model { path: path.into(), message: message.into() }
}

pub fn deserialize_forest(text: &str) -> Result<Forest> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| model_error("(document)", e.to_string()))?;
    match value.get("formatVersion").map(|v| v.as_u64()) {
        None => return Err(model_error("formatVersion", "missing field")),
        Some(None) => return Err(model_error("formatVersion", "expected an unsigned integer")),
        Some(Some(v)) if v != FORMAT_VERSION => return Err(Error::ModelVersion { found: v, expected: FORMAT_VERSION }),
        _ => {}
    }
    let file: ModelFile = serde_path_to_error::deserialize(value).map_err(|e| model_error(e.path().to_string(), e.inner().to_string()))?;
    if file.feature_order != FEATURE_NAMES {
        return Err(model_error("featureOrder", format!("expected {FEATURE_NAMES:?}")));
    }
    let n_classes = file.classes.len();
    let mut trees = Vec::with_capacity(file.trees.len());
    for (ti, t) in file.trees.into_iter().enumerate() {
        if t.nodes.is_empty() {
            return Err(model_error(format!("trees[{ti}].nodes"), "tree has no nodes"));
        }
        let len = t.nodes.len();
        let mut nodes = Vec::with_capacity(len);
        for (ni, n) in t.nodes.into_iter().enumerate() {
            let at = format!("trees[{ti}].nodes[{ni}]");
            nodes.push(match n {
                NodeFile::Split { f, t, l, r } => {
                    if f >= NUM_FEATURES {
                        return Err(model_error(format!("{at}.f"), format!("feature index {f} out of range")));
                    }
                    // children always follow their parent, which also rules out cycles
                    if l <= ni || r <= ni || l >= len || r >= len {
                        return Err(model_error(at, "child index out of range"));
                    }
                    Node::Split { feature: f, threshold: t, left: l, right: r }
                }
                NodeFile::Leaf { leaf } => {
                    if leaf.len() != n_classes || leaf.iter().all(|&c| c == 0) {
                        return Err(model_error(format!("{at}.leaf"), format!("expected {n_classes} counts, not all zero")));
                    }
                    Node::Leaf { counts: leaf }
                }
            });
        }
        trees.push(DecisionTree { nodes });
    }
    Ok(Forest { classes: file.classes, trees, seed: file.seed })
}

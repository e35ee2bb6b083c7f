//! CART decision trees with Gini splits, bagged into a random forest that
//! votes for configurations given live statistics.

mod dataset;
mod model;

pub use dataset::{cross_validate, read_dataset, write_dataset, CrossValidation, Dataset, TrainingRow};
pub use model::{deserialize_forest, serialize_forest, FORMAT_VERSION};

use crate::config::{index_of, Configuration};
use crate::error::{Error, Result};
use crate::stats::{LiveStatistics, NUM_FEATURES};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Features = [f64; NUM_FEATURES];

/// Features examined per node before falling back to the rest.
pub const FEATURES_PER_SPLIT: usize = 3;

/// Gini impurity `1 - sum p_i^2` of a label multiset.
pub fn gini(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let max = labels.iter().copied().max().unwrap();
    let mut counts = vec![0u32; max + 1];
    for &l in labels {
        counts[l] += 1;
    }
    Ok(gini_counts(&counts, labels.len()))
}

fn gini_counts(counts: &[u32], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Size-weighted Gini impurity of the two children.
    pub impurity: f64,
}

/// Best threshold split of `rows` over the features in `subset`, scanning
/// midpoints between consecutive distinct values. `None` unless some split
/// lowers the impurity. Rows with `x[feature] <= threshold` go left.
pub fn best_split(x: &[Features], y: &[usize], rows: &[usize], subset: &[usize], n_classes: usize) -> Option<Split> {
    if rows.len() < 2 {
        return None;
    }
    let mut total = vec![0u32; n_classes];
    for &r in rows {
        total[y[r]] += 1;
    }
    let parent = gini_counts(&total, rows.len());
    if parent == 0.0 {
        return None;
    }
    let mut best: Option<Split> = None;
    let mut order = rows.to_vec();
    for &f in subset {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = vec![0u32; n_classes];
        let mut right = total.clone();
        for k in 0..order.len() - 1 {
            let r = order[k];
            left[y[r]] += 1;
            right[y[r]] -= 1;
            let (lo, hi) = (x[r][f], x[order[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let nl = k + 1;
            let nr = order.len() - nl;
            let impurity = (nl as f64 * gini_counts(&left, nl) + nr as f64 * gini_counts(&right, nr)) / order.len() as f64;
            if impurity < parent - 1e-12 && best.is_none_or(|b| impurity < b.impurity) {
                let mut threshold = 0.5 * (lo + hi);
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(Split { feature: f, threshold, impurity });
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { counts: Vec<u32> },
}

/// Index of the largest count, smallest index on ties.
fn argmax(counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    /// Class index voted for by the leaf `x` reaches.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { counts } => return argmax(counts),
            }
        }
    }

    /// Grows a tree on `rows` until leaves are pure or cannot be split.
    pub fn grow(x: &[Features], y: &[usize], rows: Vec<usize>, n_classes: usize, rng: &mut impl Rng) -> Self {
        let mut nodes = vec![Node::Leaf { counts: Vec::new() }];
        let mut stack = vec![(0usize, rows)];
        while let Some((id, rows)) = stack.pop() {
            let mut counts = vec![0u32; n_classes];
            for &r in &rows {
                counts[y[r]] += 1;
            }
            let mut features: Vec<usize> = (0..NUM_FEATURES).collect();
            features.shuffle(rng);
            let mut split = best_split(x, y, &rows, &features[..FEATURES_PER_SPLIT], n_classes);
            for f in FEATURES_PER_SPLIT..NUM_FEATURES {
                if split.is_some() {
                    break;
                }
                split = best_split(x, y, &rows, &features[f..f + 1], n_classes);
            }
            let Some(s) = split else {
                nodes[id] = Node::Leaf { counts };
                continue;
            };
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][s.feature] <= s.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf { counts: Vec::new() });
            nodes.push(Node::Leaf { counts: Vec::new() });
            nodes[id] = Node::Split { feature: s.feature, threshold: s.threshold, left, right: left + 1 };
            stack.push((left + 1, r));
            stack.push((left, l));
        }
        DecisionTree { nodes }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    /// Class `i` of every tree is `classes[i]`.
    pub classes: Vec<Configuration>,
    pub trees: Vec<DecisionTree>,
    pub seed: u64,
}

impl Forest {
    pub fn n_estimators(&self) -> usize {
        self.trees.len()
    }
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Bagged CART forest: tree `t` trains on a bootstrap sample of the rows
/// drawn from its own seeded stream.
pub fn train_forest(data: &Dataset, n_estimators: usize, seed: u64) -> Result<Forest> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let space = crate::config::enumerate_configurations();
    let mut classes: Vec<Configuration> = data.labels.clone();
    classes.sort_by_key(|c| (index_of(&space, c), *c));
    classes.dedup();
    let y: Vec<usize> = data.labels.iter().map(|l| classes.iter().position(|c| c == l).unwrap()).collect();
    let n = data.len();
    let trees = (0..n_estimators)
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            DecisionTree::grow(&data.features, &y, rows, classes.len(), &mut rng)
        })
        .collect();
    Ok(Forest { classes, trees, seed })
}

/// Fraction of trees voting for each class, in class order, omitting classes
/// without votes.
pub fn predict_votes(forest: &Forest, features: &[f64]) -> Result<Vec<(Configuration, f64)>> {
    if features.len() != NUM_FEATURES {
        return Err(Error::FeatureLength { expected: NUM_FEATURES, got: features.len() });
    }
    let mut votes = vec![0usize; forest.classes.len()];
    for t in &forest.trees {
        votes[t.predict(features)] += 1;
    }
    let n = forest.trees.len().max(1) as f64;
    Ok(forest
        .classes
        .iter()
        .zip(votes)
        .filter(|(_, v)| *v > 0)
        .map(|(c, v)| (*c, v as f64 / n))
        .collect())
}

/// The `k` highest-voted configurations present in `space` (ties by class
/// order), falling through to lower-ranked classes and finally to the whole
/// space so that the result is never empty.
pub fn rf_candidates(stats: &LiveStatistics, forest: &Forest, space: &[Configuration], k: usize) -> Result<Vec<Configuration>> {
    let votes = predict_votes(forest, &stats.features())?;
    let mut ranked: Vec<(usize, f64)> = forest
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (i, votes.iter().find(|(v, _)| v == c).map_or(0.0, |v| v.1)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let out: Vec<Configuration> = ranked
        .into_iter()
        .map(|(i, _)| forest.classes[i])
        .filter(|c| space.contains(c))
        .take(k.max(1))
        .collect();
    if out.is_empty() {
        return crate::tuning::full_search_candidates(space);
    }
    Ok(out)
}

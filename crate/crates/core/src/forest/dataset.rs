use super::{predict_votes, train_forest, Features};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::stats::{FEATURE_NAMES, NUM_FEATURES};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// One labelled example: live statistics, the winning configuration and the
/// measured cost of every configuration tried.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRow {
    pub features: Features,
    pub label: Configuration,
    pub costs: Vec<(Configuration, f64)>,
}

impl TrainingRow {
    /// Cheapest configuration among `costs`, earliest on ties.
    pub fn argmin(costs: &[(Configuration, f64)]) -> Option<Configuration> {
        let mut best: Option<(Configuration, f64)> = None;
        for &(c, v) in costs {
            if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
                best = Some((c, v));
            }
        }
        best.map(|b| b.0)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub features: Vec<Features>,
    pub labels: Vec<Configuration>,
}

impl Dataset {
    pub fn from_rows(rows: &[TrainingRow]) -> Self {
        Dataset { features: rows.iter().map(|r| r.features).collect(), labels: rows.iter().map(|r| r.label).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset { features: idx.iter().map(|&i| self.features[i]).collect(), labels: idx.iter().map(|&i| self.labels[i]).collect() }
    }
}

/// Writes the feature columns, `label`, and one `cost:<configuration>` column
/// per entry of `columns`.
pub fn write_dataset(path: &Path, rows: &[TrainingRow], columns: &[Configuration]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    header.push("label".into());
    header.extend(columns.iter().map(|c| format!("cost:{c}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.features.iter().map(|v| v.to_string()).collect();
        rec.push(r.label.to_string());
        for c in columns {
            rec.push(r.costs.iter().find(|(k, _)| k == c).map_or(String::new(), |(_, v)| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset CSV. The first eight columns must be the live-statistics
/// features in their fixed order; the label is the `label` column, or the
/// last column if there is none.
pub fn read_dataset(path: &Path) -> Result<Vec<TrainingRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        if header.get(i) != Some(name) {
            return Err(Error::Dataset(format!("column {} must be `{name}`, found `{}`", i + 1, header.get(i).unwrap_or(""))));
        }
    }
    let label_col = header.iter().position(|h| h == "label").unwrap_or(header.len() - 1);
    if label_col < NUM_FEATURES {
        return Err(Error::Dataset("missing label column".into()));
    }
    let cost_cols: Vec<(usize, Configuration)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix("cost:").map(|c| (i, c)))
        .map(|(i, c)| c.parse().map(|c| (i, c)).map_err(|_| Error::Dataset(format!("bad cost column `cost:{c}`"))))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |m: String| Error::Dataset(format!("row {}: {m}", n + 2));
        let mut features = [0.0; NUM_FEATURES];
        for (i, f) in features.iter_mut().enumerate() {
            *f = rec[i].trim().parse().map_err(|_| bad(format!("`{}` is not a number", &rec[i])))?;
        }
        let label: Configuration = rec
            .get(label_col)
            .unwrap_or("")
            .parse()
            .map_err(|_| bad(format!("unknown configuration `{}`", rec.get(label_col).unwrap_or(""))))?;
        let mut costs = Vec::new();
        for &(i, c) in &cost_cols {
            let v = rec.get(i).unwrap_or("").trim();
            if !v.is_empty() {
                costs.push((c, v.parse().map_err(|_| bad(format!("bad cost `{v}`")))?));
            }
        }
        rows.push(TrainingRow { features, label, costs });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossValidation {
    /// Fraction of held-out rows whose majority vote is the label.
    pub top1: f64,
    /// Fraction of held-out rows whose label is among the three most-voted classes.
    pub top3: f64,
}

/// `folds`-fold cross-validation with a seeded shuffle.
pub fn cross_validate(data: &Dataset, folds: usize, n_estimators: usize, seed: u64) -> Result<CrossValidation> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (mut hit1, mut hit3) = (0, 0);
    for k in 0..folds {
        let test: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| p % folds == k).map(|(_, &i)| i).collect();
        let train: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| p % folds != k).map(|(_, &i)| i).collect();
        if test.is_empty() || train.is_empty() {
            continue;
        }
        let forest = train_forest(&data.subset(&train), n_estimators, seed)?;
        for &i in &test {
            let mut votes = predict_votes(&forest, &data.features[i])?;
            votes.sort_by(|a, b| b.1.total_cmp(&a.1));
            if votes.first().is_some_and(|v| v.0 == data.labels[i]) {
                hit1 += 1;
            }
            if votes.iter().take(3).any(|v| v.0 == data.labels[i]) {
                hit3 += 1;
            }
        }
    }
    let n = data.len() as f64;
    Ok(CrossValidation { top1: hit1 as f64 / n, top3: hit3 as f64 / n })
}

use mdtune::forest::{deserialize_forest, predict_votes, serialize_forest, train_forest, Dataset};
use mdtune::stats::NUM_FEATURES;
use mdtune::{enumerate_configurations, Configuration};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Features = [f64; NUM_FEATURES];

/// Three classes separated by the first feature, with noise elsewhere.
fn separable(n: usize, seed: u64) -> Dataset {
    let space = enumerate_configurations();
    let classes = [space[0], space[7], space[29]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let c = i % 3;
        let mut f: Features = std::array::from_fn(|_| rng.random_range(0.0..10.0));
        f[0] = c as f64 * 10.0 + rng.random_range(1.0..9.0);
        features.push(f);
        labels.push(classes[c]);
    }
    Dataset { features, labels }
}

fn noisy(n: usize, seed: u64) -> Dataset {
    let space = enumerate_configurations();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features: Vec<Features> = (0..n).map(|_| std::array::from_fn(|_| rng.random_range(0.0..100.0))).collect();
    let labels = (0..n).map(|_| space[rng.random_range(0..space.len())]).collect();
    Dataset { features, labels }
}

fn random_inputs(n: usize, seed: u64) -> Vec<Features> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::array::from_fn(|_| rng.random_range(-10.0..110.0))).collect()
}

fn top(votes: &[(Configuration, f64)]) -> Configuration {
    let mut best = votes[0];
    for v in &votes[1..] {
        if v.1 > best.1 {
            best = *v;
        }
    }
    best.0
}

#[test]
fn separable_data_is_classified_perfectly() {
    let train = separable(200, 1);
    let forest = train_forest(&train, 50, 3).unwrap();
    let test = separable(200, 2);
    for (f, l) in test.features.iter().zip(&test.labels) {
        assert_eq!(top(&predict_votes(&forest, f).unwrap()), *l);
    }
}

#[test]
fn training_is_deterministic() {
    let data = noisy(150, 5);
    let a = serialize_forest(&train_forest(&data, 20, 9).unwrap()).unwrap();
    let b = serialize_forest(&train_forest(&data, 20, 9).unwrap()).unwrap();
    assert_eq!(a, b);
    let c = serialize_forest(&train_forest(&data, 20, 10).unwrap()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn votes_are_fractions_that_sum_to_one() {
    let forest = train_forest(&noisy(120, 6), 25, 1).unwrap();
    for x in random_inputs(200, 7) {
        let votes = predict_votes(&forest, &x).unwrap();
        let sum: f64 = votes.iter().map(|v| v.1).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(votes.iter().all(|v| v.1 > 0.0 && (v.1 * 25.0 - (v.1 * 25.0).round()).abs() < 1e-9));
    }
}

#[test]
fn model_file_round_trip_preserves_predictions() {
    let forest = train_forest(&noisy(150, 8), 30, 2).unwrap();
    let text = serialize_forest(&forest).unwrap();
    let back = deserialize_forest(&text).unwrap();
    assert_eq!(back, forest);
    for x in random_inputs(100, 9) {
        assert_eq!(predict_votes(&back, &x).unwrap(), predict_votes(&forest, &x).unwrap());
    }
}

#[test]
fn wrong_feature_count_is_rejected() {
    let forest = train_forest(&separable(30, 1), 5, 0).unwrap();
    assert!(predict_votes(&forest, &[1.0, 2.0]).is_err());
}

/// Walks the trees of a model file as plain JSON.
fn oracle_votes(model: &Value, x: &Features) -> Vec<usize> {
    let n_classes = model["classes"].as_array().unwrap().len();
    let mut votes = vec![0; n_classes];
    for tree in model["trees"].as_array().unwrap() {
        let nodes = tree["nodes"].as_array().unwrap();
        let mut i = 0;
        let leaf = loop {
            let node = &nodes[i];
            if let Some(counts) = node.get("leaf") {
                break counts.as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect::<Vec<_>>();
            }
            let f = node["f"].as_u64().unwrap() as usize;
            let t = node["t"].as_f64().unwrap();
            i = if x[f] <= t { node["l"].as_u64().unwrap() } else { node["r"].as_u64().unwrap() } as usize;
        };
        let mut best = 0;
        for (k, &c) in leaf.iter().enumerate() {
            if c > leaf[best] {
                best = k;
            }
        }
        votes[best] += 1;
    }
    votes
}

#[test]
fn predictions_follow_the_tree_paths() {
    let forest = train_forest(&noisy(200, 11), 40, 4).unwrap();
    let model: Value = serde_json::from_str(&serialize_forest(&forest).unwrap()).unwrap();
    for x in random_inputs(1000, 12) {
        let want = oracle_votes(&model, &x);
        let got = predict_votes(&forest, &x).unwrap();
        for (k, c) in forest.classes.iter().enumerate() {
            let v = got.iter().find(|g| g.0 == *c).map_or(0.0, |g| g.1);
            assert_eq!((v * 40.0).round() as usize, want[k]);
        }
    }
}

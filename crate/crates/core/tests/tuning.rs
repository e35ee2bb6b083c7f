mod common;

use common::schedules::{check_full_search, check_predictive, stats, Affine};
use mdtune::tuning::{run_tuning_phase, Predictive, TuningController, TuningSettings};
use mdtune::{enumerate_configurations, Configuration};

#[test]
fn full_search_selects_the_argmin_every_phase() {
    for seed in 0..10 {
        check_full_search(seed).unwrap();
    }
}

#[test]
fn predictive_rules_over_random_schedules() {
    for seed in 0..50 {
        check_predictive(1000 + seed).unwrap();
    }
}

#[test]
fn excluded_candidate_returns_after_the_retrial_interval() {
    let space: Vec<Configuration> = enumerate_configurations().into_iter().take(2).collect();
    // config 1 costs 3x config 0: excluded from phase 2 on until due
    let mut host = Affine { space: space.clone(), a: vec![100.0, 300.0], b: vec![0.0, 0.0], phase: 0, trials: Vec::new() };
    let settings = TuningSettings { tuning_interval: 10, samples_per_config: 1 };
    let mut c = TuningController::new(Box::new(Predictive::new(2, 3)), space.clone(), settings, 10);
    let mut counts = Vec::new();
    for p in 0..8 {
        host.phase = p;
        host.trials.clear();
        run_tuning_phase(&mut c, &mut host, p * 10, stats()).unwrap();
        counts.push(host.trials.len());
    }
    // phases 0,1 both; 2,3 only the cheap one (single candidate, no trial); 4 retrial; ...
    assert_eq!(counts, vec![2, 2, 0, 0, 2, 0, 0, 2]);
}

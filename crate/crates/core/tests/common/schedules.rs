//! Synthetic cost schedules for the tuning strategies.

use mdtune::config::index_of;
use mdtune::force::Timings;
use mdtune::stats::LiveStatistics;
use mdtune::tuning::{predict_cost, run_tuning_phase, FullSearch, Predictive, TrialHost, TuningController, TuningSettings};
use mdtune::{enumerate_configurations, Configuration, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stats() -> LiveStatistics {
    LiveStatistics {
        mean_particles_per_bin: 1.0,
        rel_std_dev_particles_per_bin: 0.0,
        median_particles_per_bin: 1.0,
        max_particles_per_bin: 1.0,
        num_bins: 1,
        num_empty_bins: 0,
        thread_count: 1,
        skin: 0.3,
    }
}

/// Cost of configuration `i` in phase `p` is `a[i] + b[i] * p`, reported as
/// force time with no build.
pub struct Affine {
    pub space: Vec<Configuration>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub phase: usize,
    pub trials: Vec<Configuration>,
}

impl Affine {
    pub fn cost(&self, i: usize, p: usize) -> f64 {
        self.a[i] + self.b[i] * p as f64
    }
}

impl TrialHost for Affine {
    fn iterate(&mut self, config: Configuration, _rebuild: bool) -> Result<Timings> {
        let i = index_of(&self.space, &config).unwrap();
        self.trials.push(config);
        Ok(Timings { force_nanos: self.cost(i, self.phase).round() as u64, build_nanos: 0, rebuilt: false })
    }
}

/// A random schedule: the host, its number of phases and a retrial interval.
pub fn schedule(seed: u64) -> (Affine, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = enumerate_configurations();
    let n = space.len();
    let phases = rng.random_range(6..14);
    // integer costs that stay positive over the run, so rounding is exact
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let slope = rng.random_range(-40i64..=40) as f64;
        let base = rng.random_range(1_000i64..20_000) as f64;
        let lowest = (0..phases).map(|p| base + slope * p as f64).fold(f64::INFINITY, f64::min);
        a.push(if lowest < 100.0 { base + 100.0 - lowest } else { base });
        b.push(slope);
    }
    // a few hopeless configurations to exercise the blacklist
    for _ in 0..rng.random_range(0..4) {
        let i = rng.random_range(0..n);
        a[i] *= 30.0;
    }
    let retrial = rng.random_range(1..5);
    (Affine { space, a, b, phase: 0, trials: Vec::new() }, phases, retrial)
}

/// Full search over a schedule must select a cheapest configuration in every phase.
pub fn check_full_search(seed: u64) -> std::result::Result<(), String> {
    let (mut host, phases, _) = schedule(seed);
    let space = host.space.clone();
    let settings = TuningSettings { tuning_interval: 100, samples_per_config: 2 };
    let mut c = TuningController::new(Box::new(FullSearch), space.clone(), settings, 10);
    for p in 0..phases {
        host.phase = p;
        let chosen = run_tuning_phase(&mut c, &mut host, p * 100, stats()).map_err(|e| e.to_string())?;
        let best = (0..space.len()).map(|i| host.cost(i, p)).fold(f64::INFINITY, f64::min);
        let got = host.cost(index_of(&space, &chosen).unwrap(), p);
        if got != best {
            return Err(format!("seed {seed} phase {p}: selected cost {got}, best {best}"));
        }
    }
    Ok(())
}

/// Replays the predictive rules on a schedule and compares every phase's
/// trialled set against an independent model of them: exact extrapolation,
/// the 2x keep window, retrials and the 10x blacklist.
pub fn check_predictive(seed: u64) -> std::result::Result<(), String> {
    let (mut host, phases, retrial) = schedule(seed);
    let space = host.space.clone();
    let n = space.len();
    let settings = TuningSettings { tuning_interval: 100, samples_per_config: 1 };
    let mut c = TuningController::new(Box::new(Predictive::new(n, retrial)), space.clone(), settings, 10);

    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut last_trial: Vec<Option<usize>> = vec![None; n];
    let mut blacklisted = vec![false; n];
    for p in 0..phases {
        host.phase = p;
        host.trials.clear();
        run_tuning_phase(&mut c, &mut host, p * 100, stats()).map_err(|e| e.to_string())?;
        let trialled: Vec<usize> = host.trials.iter().map(|t| index_of(&space, t).unwrap()).collect();

        if let Some(&i) = trialled.iter().find(|&&i| blacklisted[i]) {
            return Err(format!("seed {seed} phase {p}: blacklisted {} trialled", space[i]));
        }
        let expected: Vec<usize> = if p < 2 {
            (0..n).filter(|&i| !blacklisted[i]).collect()
        } else {
            let mut predicted = vec![None; n];
            for i in 0..n {
                predicted[i] = match seen[i][..] {
                    [.., p0, p1] => {
                        let pr = predict_cost(&[(p0, host.cost(i, p0)), (p1, host.cost(i, p1))], p).map_err(|e| e.to_string())?;
                        let truth = host.cost(i, p);
                        if (pr - truth).abs() > 1e-9 * truth {
                            return Err(format!("seed {seed} phase {p}: {} predicted {pr}, costs {truth}", space[i]));
                        }
                        Some(pr)
                    }
                    [p0] => Some(host.cost(i, p0)),
                    [] => None,
                };
            }
            let best = (0..n).filter(|&i| !blacklisted[i]).filter_map(|i| predicted[i]).fold(f64::INFINITY, f64::min);
            (0..n)
                .filter(|&i| !blacklisted[i])
                .filter(|&i| match (predicted[i], last_trial[i]) {
                    (Some(pr), Some(t)) => pr <= 2.0 * best || p - t >= retrial,
                    _ => true,
                })
                .collect()
        };
        // a lone candidate is selected without trials
        let ok = if expected.len() == 1 { trialled.is_empty() } else { trialled == expected };
        if !ok {
            return Err(format!("seed {seed} phase {p}: trialled {trialled:?}, expected {expected:?}"));
        }
        let phase_best = trialled.iter().map(|&i| host.cost(i, p)).fold(f64::INFINITY, f64::min);
        for &i in &trialled {
            seen[i].push(p);
            last_trial[i] = Some(p);
            if host.cost(i, p) > 10.0 * phase_best {
                blacklisted[i] = true;
            }
        }
    }
    Ok(())
}

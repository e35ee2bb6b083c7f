use super::strategy::{PhaseContext, Strategy};
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Linear extrapolation through the last two `(phase, cost)` points, or the
/// single point's cost, clamped below at 1 ns.
pub fn predict_cost(history: &[(usize, f64)], target_phase: usize) -> Result<f64> {
    let cost = match history {
        [] => return Err(Error::NoHistory),
        [(_, c)] => *c,
        [.., (p0, c0), (p1, c1)] => {
            if p1 == p0 {
                *c1
            } else {
                let slope = (c1 - c0) / (*p1 as f64 - *p0 as f64);
                c1 + slope * (target_phase as f64 - *p1 as f64)
            }
        }
    };
    Ok(cost.max(1.0))
}

/// What the predictive strategy remembers about one configuration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredictorEntry {
    /// Up to the last two measured `(phase, cost)` points.
    pub history: Vec<(usize, f64)>,
    pub last_trial_phase: Option<usize>,
    pub blacklisted: bool,
}

impl PredictorEntry {
    pub fn phases_since_trial(&self, phase: usize) -> Option<usize> {
        self.last_trial_phase.map(|p| phase.saturating_sub(p))
    }
}

/// Trials everything in the first two phases, then only configurations
/// predicted within `keep_factor` of the best prediction, plus those not
/// trialled for `retrial_interval` phases. Configurations measuring worse than
/// `blacklist_factor` times a phase's best are never trialled again.
#[derive(Clone, Debug)]
pub struct Predictive {
    pub entries: Vec<PredictorEntry>,
    pub retrial_interval: usize,
    pub keep_factor: f64,
    pub blacklist_factor: f64,
}

impl Predictive {
    pub fn new(space_len: usize, retrial_interval: usize) -> Self {
        Predictive {
            entries: vec![PredictorEntry::default(); space_len],
            retrial_interval: retrial_interval.max(1),
            keep_factor: 2.0,
            blacklist_factor: 10.0,
        }
    }

    /// A quarter of the run's phases when known, otherwise 10.
    pub fn default_retrial_interval(total_phases: Option<usize>) -> usize {
        match total_phases {
            Some(n) => (n / 4).max(1),
            None => 10,
        }
    }

    /// Predicted cost of every configuration with history at `phase`.
    pub fn predictions(&self, phase: usize) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| predict_cost(&e.history, phase).ok()).collect()
    }
}

impl Strategy for Predictive {
    fn name(&self) -> &str {
        "predictive"
    }

    fn candidates(&mut self, ctx: &PhaseContext) -> Result<Vec<Configuration>> {
        if self.entries.len() != ctx.space.len() {
            self.entries.resize(ctx.space.len(), PredictorEntry::default());
        }
        if ctx.space.is_empty() {
            return Err(Error::NoCandidates);
        }
        if self.entries.iter().all(|e| e.blacklisted) {
            return Err(Error::AllBlacklisted);
        }
        let live = |i: &usize| !self.entries[*i].blacklisted;
        if ctx.phase < 2 {
            return Ok((0..ctx.space.len()).filter(live).map(|i| ctx.space[i]).collect());
        }
        let predictions = self.predictions(ctx.phase);
        let best = (0..ctx.space.len())
            .filter(live)
            .filter_map(|i| predictions[i])
            .fold(f64::INFINITY, f64::min);
        let threshold = self.keep_factor * best;
        Ok((0..ctx.space.len())
            .filter(live)
            .filter(|&i| {
                let e = &self.entries[i];
                match (predictions[i], e.phases_since_trial(ctx.phase)) {
                    (None, _) | (_, None) => true,
                    (Some(p), Some(since)) => p <= threshold || since >= self.retrial_interval,
                }
            })
            .map(|i| ctx.space[i])
            .collect())
    }

    fn observe(&mut self, ctx: &PhaseContext, costs: &[(Configuration, f64)]) {
        let best = costs.iter().map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
        for (config, cost) in costs {
            let Some(i) = ctx.space.iter().position(|c| c == config) else { continue };
            let e = &mut self.entries[i];
            e.last_trial_phase = Some(ctx.phase);
            if cost.is_finite() {
                e.history.push((ctx.phase, *cost));
                if e.history.len() > 2 {
                    e.history.remove(0);
                }
            }
            if best.is_finite() && *cost > self.blacklist_factor * best {
                e.blacklisted = true;
            }
        }
    }

    fn is_blacklisted(&self, space: &[Configuration], config: &Configuration) -> bool {
        space.iter().position(|c| c == config).is_some_and(|i| self.entries.get(i).is_some_and(|e| e.blacklisted))
    }
}

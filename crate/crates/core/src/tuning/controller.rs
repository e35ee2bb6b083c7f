use super::evidence::PerformanceEvidence;
use super::strategy::{PhaseContext, Strategy};
use crate::config::{index_of, Configuration};
use crate::error::{Error, Result};
use crate::force::Timings;
use crate::stats::LiveStatistics;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TuningSettings {
    /// Iterations between the starts of consecutive tuning phases.
    pub tuning_interval: usize,
    /// Consecutive trial iterations per candidate.
    pub samples_per_config: usize,
}

impl Default for TuningSettings {
    fn default() -> Self {
        TuningSettings { tuning_interval: 1000, samples_per_config: 3 }
    }
}

/// What the simulation should do in its next iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Directive {
    /// Trial iteration number `sample` of `config`; sample 0 must rebuild.
    Trial { config: Configuration, sample: usize },
    /// Regular iteration with the selected configuration.
    Run(Configuration),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseRecord {
    pub phase: usize,
    pub start_iteration: usize,
    pub stats: LiveStatistics,
    pub candidates: Vec<Configuration>,
    /// Aggregated cost per trialled candidate; infinite (`null` in JSON) for failed trials.
    pub costs: Vec<(Configuration, f64)>,
    pub selected: Configuration,
    pub trial_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TuningLogRow {
    pub phase_index: usize,
    pub configuration_id: String,
    pub sample_index: usize,
    pub force_time_nanos: u64,
    pub build_time_nanos: u64,
    pub aggregated_cost_nanos: f64,
    pub selected: bool,
    pub blacklisted: bool,
}

pub fn write_tuning_log(path: &Path, rows: &[TuningLogRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct ActivePhase {
    index: usize,
    start_iteration: usize,
    stats: LiveStatistics,
    candidates: Vec<Configuration>,
    cursor: usize,
    evidence: Vec<PerformanceEvidence>,
    trial_iterations: usize,
    last_error: Option<String>,
}

/// Drives tuning phases iteration by iteration: the simulation asks for a
/// [`Directive`], runs one iteration, and reports the outcome back.
pub struct TuningController {
    strategy: Box<dyn Strategy>,
    space: Vec<Configuration>,
    settings: TuningSettings,
    rebuild_interval: usize,
    active: Option<ActivePhase>,
    current: Option<Configuration>,
    next_phase_start: usize,
    phases: Vec<PhaseRecord>,
    log: Vec<TuningLogRow>,
}

impl TuningController {
    pub fn new(strategy: Box<dyn Strategy>, space: Vec<Configuration>, settings: TuningSettings, rebuild_interval: usize) -> Self {
        TuningController {
            strategy,
            space,
            settings,
            rebuild_interval: rebuild_interval.max(1),
            active: None,
            current: None,
            next_phase_start: 0,
            phases: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn strategy_name(&self) -> &str {
        self.strategy.name()
    }

    pub fn space(&self) -> &[Configuration] {
        &self.space
    }

    pub fn phase_due(&self, iteration: usize) -> bool {
        self.active.is_none() && iteration >= self.next_phase_start
    }

    pub fn is_tuning(&self) -> bool {
        self.active.is_some()
    }

    pub fn current(&self) -> Option<Configuration> {
        self.current
    }

    pub fn phases(&self) -> &[PhaseRecord] {
        &self.phases
    }

    pub fn log(&self) -> &[TuningLogRow] {
        &self.log
    }

    /// Index of the phase in progress, or of the last finished one.
    pub fn phase_index(&self) -> Option<usize> {
        match &self.active {
            Some(a) => Some(a.index),
            None => self.phases.len().checked_sub(1),
        }
    }

    /// Starts a phase: asks the strategy for candidates, which are then
    /// trialled in enumeration order. A single candidate is selected directly.
    pub fn begin_phase(&mut self, iteration: usize, stats: LiveStatistics) -> Result<()> {
        let index = self.phases.len();
        let ctx = PhaseContext { phase: index, space: &self.space, stats: &stats };
        let mut candidates: Vec<Configuration> = self
            .strategy
            .candidates(&ctx)?
            .into_iter()
            .filter(|c| index_of(&self.space, c).is_some())
            .collect();
        candidates.sort_by_key(|c| index_of(&self.space, c));
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::NoCandidates);
        }
        self.next_phase_start = iteration + self.settings.tuning_interval.max(1);
        let evidence = candidates.iter().map(|c| PerformanceEvidence::new(*c, index)).collect();
        self.active = Some(ActivePhase {
            index,
            start_iteration: iteration,
            stats,
            cursor: 0,
            candidates,
            evidence,
            trial_iterations: 0,
            last_error: None,
        });
        if self.active.as_ref().unwrap().candidates.len() == 1 {
            self.finish_phase()?;
        }
        Ok(())
    }

    pub fn directive(&self) -> Result<Directive> {
        match (&self.active, self.current) {
            (Some(a), _) => Ok(Directive::Trial { config: a.candidates[a.cursor], sample: a.evidence[a.cursor].samples.len() }),
            (None, Some(c)) => Ok(Directive::Run(c)),
            (None, None) => Err(Error::NoCandidates),
        }
    }

    /// Reports the outcome of the iteration run for the last directive.
    /// Outside a phase this is a no-op.
    pub fn record(&mut self, outcome: Result<Timings>) -> Result<()> {
        let samples = self.settings.samples_per_config.max(1);
        let Some(a) = self.active.as_mut() else { return Ok(()) };
        a.trial_iterations += 1;
        let e = &mut a.evidence[a.cursor];
        match outcome {
            Ok(t) => {
                e.samples.push(t);
                if e.samples.len() >= samples {
                    a.cursor += 1;
                }
            }
            Err(err) => {
                log::warn!("trial of {} failed: {err}", e.config);
                e.failed = true;
                a.last_error = Some(format!("{}: {err}", e.config));
                a.cursor += 1;
            }
        }
        if a.cursor == a.candidates.len() {
            self.finish_phase()?;
        }
        Ok(())
    }

    fn finish_phase(&mut self) -> Result<()> {
        let a = self.active.take().expect("no phase in progress");
        let single = a.candidates.len() == 1;
        let costs: Vec<(Configuration, f64)> = a.evidence.iter().map(|e| (e.config, e.cost(self.rebuild_interval))).collect();
        let selected = if single {
            a.candidates[0]
        } else {
            // strict comparison keeps the earliest candidate on ties
            let mut best: Option<(Configuration, f64)> = None;
            for &(c, cost) in &costs {
                if cost.is_finite() && best.is_none_or(|(_, b)| cost < b) {
                    best = Some((c, cost));
                }
            }
            match best {
                Some((c, _)) => c,
                None => return Err(Error::TrialsFailed(a.last_error.unwrap_or_default())),
            }
        };
        let trialled: Vec<(Configuration, f64)> = if single { Vec::new() } else { costs.clone() };
        let ctx = PhaseContext { phase: a.index, space: &self.space, stats: &a.stats };
        self.strategy.observe(&ctx, &trialled);
        for (e, (_, cost)) in a.evidence.iter().zip(&costs) {
            let blacklisted = self.strategy.is_blacklisted(&self.space, &e.config);
            let row = |sample_index, t: Timings| TuningLogRow {
                phase_index: a.index,
                configuration_id: e.config.to_string(),
                sample_index,
                force_time_nanos: t.force_nanos,
                build_time_nanos: t.build_nanos,
                aggregated_cost_nanos: *cost,
                selected: e.config == selected,
                blacklisted,
            };
            for (k, t) in e.samples.iter().enumerate() {
                self.log.push(row(k, *t));
            }
            if e.failed || e.samples.is_empty() {
                self.log.push(row(e.samples.len(), Timings::default()));
            }
        }
        self.phases.push(PhaseRecord {
            phase: a.index,
            start_iteration: a.start_iteration,
            stats: a.stats,
            candidates: a.candidates,
            costs: trialled,
            selected,
            trial_iterations: a.trial_iterations,
        });
        self.current = Some(selected);
        Ok(())
    }
}

/// Runs one iteration of the simulation for a tuning controller.
pub trait TrialHost {
    /// Advances the simulation by one iteration using `config`, rebuilding
    /// the container first if `rebuild` is set.
    fn iterate(&mut self, config: Configuration, rebuild: bool) -> Result<Timings>;
}

/// Runs a complete tuning phase on `host` and returns the selection.
pub fn run_tuning_phase(
    controller: &mut TuningController,
    host: &mut dyn TrialHost,
    iteration: usize,
    stats: LiveStatistics,
) -> Result<Configuration> {
    controller.begin_phase(iteration, stats)?;
    while controller.is_tuning() {
        let Directive::Trial { config, sample } = controller.directive()? else { unreachable!() };
        let outcome = host.iterate(config, sample == 0);
        controller.record(outcome)?;
    }
    Ok(controller.current().expect("phase selects a configuration"))
}

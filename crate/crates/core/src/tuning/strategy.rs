use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::forest::{rf_candidates, Forest};
use crate::fuzzy::{expert_candidates, RuleBase};
use crate::stats::LiveStatistics;

/// What a strategy knows when choosing a phase's candidates.
#[derive(Clone, Copy, Debug)]
pub struct PhaseContext<'a> {
    pub phase: usize,
    pub space: &'a [Configuration],
    pub stats: &'a LiveStatistics,
}

/// Chooses which configurations a tuning phase trials.
pub trait Strategy: Send {
    fn name(&self) -> &str;

    fn candidates(&mut self, ctx: &PhaseContext) -> Result<Vec<Configuration>>;

    /// Called once per phase with the aggregated cost of every trialled
    /// candidate (infinite for failed trials).
    fn observe(&mut self, _ctx: &PhaseContext, _costs: &[(Configuration, f64)]) {}

    fn is_blacklisted(&self, _space: &[Configuration], _config: &Configuration) -> bool {
        false
    }
}

/// The candidate set of a full search: the whole space.
pub fn full_search_candidates(space: &[Configuration]) -> Result<Vec<Configuration>> {
    if space.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(space.to_vec())
}

#[derive(Clone, Debug, Default)]
pub struct FullSearch;

impl Strategy for FullSearch {
    fn name(&self) -> &str {
        "full"
    }

    fn candidates(&mut self, ctx: &PhaseContext) -> Result<Vec<Configuration>> {
        full_search_candidates(ctx.space)
    }
}

/// Always the same configuration, without trials.
#[derive(Clone, Debug)]
pub struct Fixed(pub Configuration);

impl Strategy for Fixed {
    fn name(&self) -> &str {
        "fixed"
    }

    fn candidates(&mut self, _ctx: &PhaseContext) -> Result<Vec<Configuration>> {
        Ok(vec![self.0])
    }
}

/// Trials the configurations a fuzzy rule base rates as suitable.
#[derive(Clone, Debug)]
pub struct Expert {
    pub rules: RuleBase,
    pub threshold: f64,
}

impl Expert {
    pub fn new(rules: RuleBase) -> Self {
        Expert { rules, threshold: 0.5 }
    }
}

impl Strategy for Expert {
    fn name(&self) -> &str {
        "expert"
    }

    fn candidates(&mut self, ctx: &PhaseContext) -> Result<Vec<Configuration>> {
        expert_candidates(ctx.stats, &self.rules, ctx.space, self.threshold)
    }
}

/// Trials the `k` configurations a random forest votes for most.
#[derive(Clone, Debug)]
pub struct RandomForest {
    pub forest: Forest,
    pub k: usize,
}

impl Strategy for RandomForest {
    fn name(&self) -> &str {
        "random-forest"
    }

    fn candidates(&mut self, ctx: &PhaseContext) -> Result<Vec<Configuration>> {
        rf_candidates(ctx.stats, &self.forest, ctx.space, self.k)
    }
}

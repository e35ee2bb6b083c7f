use crate::config::Configuration;
use crate::force::Timings;

/// Per-iteration cost of a configuration: force time plus the build time
/// amortised over the rebuild interval.
pub fn evidence_cost(force_nanos: f64, build_nanos: f64, rebuild_interval: usize) -> f64 {
    assert!(rebuild_interval >= 1, "rebuild interval must be at least 1");
    force_nanos + build_nanos / rebuild_interval as f64
}

/// Lower-middle median; `None` for no samples.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

/// Measured samples of one configuration in one tuning phase.
#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceEvidence {
    pub config: Configuration,
    pub phase: usize,
    pub samples: Vec<Timings>,
    /// Set when a trial iteration failed; the configuration then costs infinity.
    pub failed: bool,
}

impl PerformanceEvidence {
    pub fn new(config: Configuration, phase: usize) -> Self {
        PerformanceEvidence { config, phase, samples: Vec::new(), failed: false }
    }

    /// Median force time plus every build in the trial amortised over
    /// `rebuild_interval`. Infinite for failed or unsampled trials.
    pub fn cost(&self, rebuild_interval: usize) -> f64 {
        if self.failed {
            return f64::INFINITY;
        }
        let force: Vec<f64> = self.samples.iter().map(|t| t.force_nanos as f64).collect();
        let Some(force) = median(&force) else { return f64::INFINITY };
        let build: f64 = self.samples.iter().map(|t| t.build_nanos as f64).sum();
        evidence_cost(force, build, rebuild_interval)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amortised_cost() {
        assert_eq!(evidence_cost(5.0, 0.0, 10), 5.0);
        assert!((evidence_cost(1e7, 3e7, 10) - 1.3e7).abs() < 1e-6);
        assert_eq!(evidence_cost(2.0, 3.0, 1), 5.0);
    }

    #[test]
    fn median_is_lower_middle() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn evidence_cost_uses_median_force_and_total_build() {
        let c = crate::config::enumerate_configurations()[0];
        let mut e = PerformanceEvidence::new(c, 0);
        for (f, b) in [(100, 50), (90, 0), (500, 0)] {
            e.samples.push(Timings { force_nanos: f, build_nanos: b, rebuilt: b > 0 });
        }
        assert_eq!(e.cost(10), 105.0);
        e.failed = true;
        assert_eq!(e.cost(10), f64::INFINITY);
    }
}

//! Configuration-independent summary of how particles fill the domain.

use crate::container::GridGeometry;
use crate::params::SimulationParams;
use crate::particles::ParticleSet;
use serde::{Deserialize, Serialize};

/// Names of the feature vector entries, in [`LiveStatistics::features`] order.
pub const FEATURE_NAMES: [&str; 8] = [
    "meanParticlesPerBin",
    "relStdDevParticlesPerBin",
    "medianParticlesPerBin",
    "maxParticlesPerBin",
    "numBins",
    "numEmptyBins",
    "threadCount",
    "skin",
];

pub const NUM_FEATURES: usize = FEATURE_NAMES.len();

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LiveStatistics {
    pub mean_particles_per_bin: f64,
    pub rel_std_dev_particles_per_bin: f64,
    pub median_particles_per_bin: f64,
    pub max_particles_per_bin: f64,
    pub num_bins: usize,
    pub num_empty_bins: usize,
    pub thread_count: usize,
    pub skin: f64,
}

impl LiveStatistics {
    pub fn features(&self) -> [f64; NUM_FEATURES] {
        [
            self.mean_particles_per_bin,
            self.rel_std_dev_particles_per_bin,
            self.median_particles_per_bin,
            self.max_particles_per_bin,
            self.num_bins as f64,
            self.num_empty_bins as f64,
            self.thread_count as f64,
            self.skin,
        ]
    }

    /// Value of the feature called `name`, if any.
    pub fn feature(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.features()[i])
    }
}

/// Bins particles into cells shaped like a cell-size-factor-1 linked-cells
/// grid (without halo) and summarises the per-bin counts.
pub fn compute_live_stats(particles: &ParticleSet, params: &SimulationParams) -> LiveStatistics {
    let geom = GridGeometry::new(params, 1.0);
    let num_bins = geom.num_owned_cells();
    let n = geom.cells_per_dim;
    let mut counts = vec![0u64; num_bins];
    for i in 0..particles.len() {
        let c = geom.owned_coords(particles.position(i));
        counts[c[0] as usize + n[0] * (c[1] as usize + n[1] * c[2] as usize)] += 1;
    }
    summarise(&mut counts, params)
}

fn summarise(counts: &mut [u64], params: &SimulationParams) -> LiveStatistics {
    let bins = counts.len();
    let total: u64 = counts.iter().sum();
    let mean = total as f64 / bins as f64;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / bins as f64;
    let rel = if mean == 0.0 { 0.0 } else { var.sqrt() / mean };
    let empty = counts.iter().filter(|&&c| c == 0).count();
    let max = counts.iter().copied().max().unwrap_or(0);
    counts.sort_unstable();
    // lower middle element for even counts
    let median = counts[(bins - 1) / 2];
    LiveStatistics {
        mean_particles_per_bin: mean,
        rel_std_dev_particles_per_bin: rel,
        median_particles_per_bin: median as f64,
        max_particles_per_bin: max as f64,
        num_bins: bins,
        num_empty_bins: empty,
        thread_count: params.thread_count,
        skin: params.skin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Boundary;
    use crate::particles::{Layout, Particle, ParticleTypeInfo};
    use crate::vec3::Vec3;

    fn params() -> SimulationParams {
        let mut p = SimulationParams::cube(6.0, Boundary::Reflective);
        p.skin = 0.0;
        p
    }

    fn set(points: impl IntoIterator<Item = [f64; 3]>) -> ParticleSet {
        ParticleSet::from_particles(
            vec![ParticleTypeInfo::unit(0)],
            points.into_iter().map(|p| Particle::new(Vec3(p), Vec3::ZERO, 0)),
            Layout::Aos,
        )
        .unwrap()
    }

    #[test]
    fn one_particle_per_bin() {
        let mut pts = Vec::new();
        for x in [1.0, 4.0] {
            for y in [1.0, 4.0] {
                for z in [1.0, 4.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        let s = compute_live_stats(&set(pts), &params());
        assert_eq!(s.num_bins, 8);
        assert_eq!(s.mean_particles_per_bin, 1.0);
        assert_eq!(s.rel_std_dev_particles_per_bin, 0.0);
        assert_eq!(s.median_particles_per_bin, 1.0);
        assert_eq!(s.max_particles_per_bin, 1.0);
        assert_eq!(s.num_empty_bins, 0);
    }

    #[test]
    fn all_particles_in_one_bin() {
        let s = compute_live_stats(&set((0..16).map(|i| [0.1 * i as f64, 1.0, 1.0])), &params());
        assert_eq!(s.mean_particles_per_bin, 2.0);
        // population: sqrt((14^2 + 7 * 2^2) / 8) / 2 = sqrt(28) / 2
        assert!((s.rel_std_dev_particles_per_bin - 28f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(s.median_particles_per_bin, 0.0);
        assert_eq!(s.max_particles_per_bin, 16.0);
        assert_eq!(s.num_empty_bins, 7);
    }

    #[test]
    fn empty_domain_is_defined() {
        let s = compute_live_stats(&set([]), &params());
        assert_eq!(s.mean_particles_per_bin, 0.0);
        assert_eq!(s.rel_std_dev_particles_per_bin, 0.0);
        assert_eq!(s.median_particles_per_bin, 0.0);
        assert_eq!(s.num_empty_bins, s.num_bins);
    }

    #[test]
    fn lower_middle_median() {
        let mut counts = vec![4, 1, 3, 2];
        assert_eq!(summarise(&mut counts, &params()).median_particles_per_bin, 2.0);
    }

    #[test]
    fn feature_lookup_by_name() {
        let s = compute_live_stats(&set([[1.0, 1.0, 1.0]]), &params());
        assert_eq!(s.feature("numBins"), Some(8.0));
        assert_eq!(s.feature("skin"), Some(0.0));
        assert_eq!(s.feature("bogus"), None);
    }
}

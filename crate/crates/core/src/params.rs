use crate::error::{Error, Result};
use crate::vec3::Vec3;
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Reflective,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThermostatParams {
    pub target_temperature: f64,
    pub max_delta_t: f64,
    pub interval_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationParams {
    pub domain_size: Vec3,
    pub cutoff: f64,
    pub skin: f64,
    pub rebuild_interval: usize,
    pub delta_t: f64,
    pub total_iterations: usize,
    /// One entry per axis; a single value in scenario files applies to all three.
    #[serde(deserialize_with = "boundary_per_axis")]
    pub boundary: [Boundary; 3],
    #[serde(default)]
    pub gravity: Option<Vec3>,
    #[serde(default)]
    pub thermostat: Option<ThermostatParams>,
    #[serde(default = "default_threads")]
    pub thread_count: usize,
}

fn default_threads() -> usize {
    1
}

fn boundary_per_axis<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<[Boundary; 3], D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Spec {
        All(Boundary),
        PerAxis([Boundary; 3]),
    }
    Ok(match Spec::deserialize(d)? {
        Spec::All(b) => [b; 3],
        Spec::PerAxis(a) => a,
    })
}

impl SimulationParams {
    /// Cubic reflective box with the cutoff and skin used throughout the experiments.
    pub fn cube(edge: f64, boundary: Boundary) -> Self {
        SimulationParams {
            domain_size: Vec3::splat(edge),
            cutoff: 3.0,
            skin: 0.5,
            rebuild_interval: 10,
            delta_t: 1e-4,
            total_iterations: 0,
            boundary: [boundary; 3],
            gravity: None,
            thermostat: None,
            thread_count: 1,
        }
    }

    /// Radius within which neighbour structures look for partners.
    #[inline]
    pub fn interaction_length(&self) -> f64 {
        self.cutoff + self.skin
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.boundary[axis] == Boundary::Periodic
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.cutoff > 0.0) {
            return bad(format!("cutoff must be positive, got {}", self.cutoff));
        }
        if !(self.skin >= 0.0) {
            return bad(format!("skin must be non-negative, got {}", self.skin));
        }
        if self.rebuild_interval < 1 {
            return bad("rebuild interval must be at least 1".into());
        }
        if !(self.delta_t > 0.0) {
            return bad(format!("time step must be positive, got {}", self.delta_t));
        }
        if self.thread_count < 1 {
            return bad("thread count must be at least 1".into());
        }
        let reach = self.interaction_length();
        for d in 0..3 {
            let l = self.domain_size[d];
            if !(l >= reach) {
                return bad(format!("domain edge {l} on axis {d} is shorter than cutoff + skin = {reach}"));
            }
            // a partner must have a unique nearest periodic image
            if self.is_periodic(d) && l < 2.0 * reach {
                return bad(format!(
                    "periodic axis {d} needs an edge of at least 2 * (cutoff + skin) = {}, got {l}",
                    2.0 * reach
                ));
            }
        }
        if let Some(t) = &self.thermostat {
            if t.interval_iterations < 1 || !(t.max_delta_t >= 0.0) || !(t.target_temperature >= 0.0) {
                return bad("thermostat needs interval >= 1 and non-negative temperatures".into());
            }
        }
        Ok(())
    }

    /// Displacement `a - b` using the nearest periodic image on periodic axes.
    #[inline]
    pub fn min_image(&self, a: Vec3, b: Vec3) -> Vec3 {
        let mut d = a - b;
        for k in 0..3 {
            if self.boundary[k] == Boundary::Periodic {
                let l = self.domain_size[k];
                d[k] -= l * (d[k] / l).round();
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_bad_values() {
        let ok = SimulationParams::cube(10.0, Boundary::Reflective);
        assert!(ok.validate().is_ok());
        let mut p = ok.clone();
        p.cutoff = 0.0;
        assert!(p.validate().is_err());
        let mut p = ok.clone();
        p.rebuild_interval = 0;
        assert!(p.validate().is_err());
        let mut p = ok.clone();
        p.domain_size = Vec3::new(10.0, 3.4, 10.0);
        assert!(p.validate().is_err());
        let mut p = ok.clone();
        p.boundary = [Boundary::Periodic; 3];
        p.domain_size = Vec3::splat(6.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn boundary_accepts_scalar_or_triple() {
        let y = "domainSize: [10, 10, 10]\ncutoff: 3\nskin: 0.5\nrebuildInterval: 10\ndeltaT: 0.001\ntotalIterations: 5\nboundary: periodic\n";
        let p: SimulationParams = serde_yaml::from_str(y).unwrap();
        assert_eq!(p.boundary, [Boundary::Periodic; 3]);
        let y = y.replace("boundary: periodic", "boundary: [periodic, reflective, periodic]");
        let p: SimulationParams = serde_yaml::from_str(&y).unwrap();
        assert_eq!(p.boundary[1], Boundary::Reflective);
        assert_eq!(p.thread_count, 1);
    }

    #[test]
    fn min_image_wraps_only_periodic_axes() {
        let mut p = SimulationParams::cube(10.0, Boundary::Periodic);
        p.boundary[2] = Boundary::Reflective;
        let d = p.min_image(Vec3::new(9.5, 0.2, 9.5), Vec3::new(0.5, 9.8, 0.5));
        assert!((d.x() + 1.0).abs() < 1e-12);
        assert!((d.y() - 0.4).abs() < 1e-12);
        assert!((d.z() - 9.0).abs() < 1e-12);
    }
}

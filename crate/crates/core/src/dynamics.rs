//! Velocity-Verlet integration, velocity-scaling thermostat and boundary handling.

use crate::error::{Error, Result};
use crate::params::{Boundary, SimulationParams};
use crate::particles::ParticleSet;
use crate::vec3::Vec3;

/// First half of a velocity-Verlet step: drift positions and remember the
/// forces they were computed with.
pub fn update_positions(particles: &mut ParticleSet, dt: f64) {
    for i in 0..particles.len() {
        let m = particles.mass(i);
        let x = particles.position(i) + particles.velocity(i) * dt + particles.force(i) * (dt * dt / (2.0 * m));
        particles.set_position(i, x);
    }
    particles.shift_forces();
}

/// Second half: kick velocities with the mean of old and new forces.
pub fn update_velocities(particles: &mut ParticleSet, dt: f64) {
    for i in 0..particles.len() {
        let m = particles.mass(i);
        let v = particles.velocity(i) + (particles.old_force(i) + particles.force(i)) * (dt / (2.0 * m));
        particles.set_velocity(i, v);
    }
}

/// Adds the constant body force `m * g` to every particle.
pub fn add_gravity(particles: &mut ParticleSet, gravity: Vec3) {
    for i in 0..particles.len() {
        let f = particles.force(i) + gravity * particles.mass(i);
        particles.set_force(i, f);
    }
}

/// One full step. `compute_forces` must overwrite every particle's force for
/// the new positions; gravity is added afterwards.
pub fn integrate_step<F>(particles: &mut ParticleSet, params: &SimulationParams, mut compute_forces: F) -> Result<()>
where
    F: FnMut(&mut ParticleSet) -> Result<()>,
{
    update_positions(particles, params.delta_t);
    apply_boundaries(particles, params)?;
    compute_forces(particles)?;
    if let Some(g) = params.gravity {
        add_gravity(particles, g);
    }
    update_velocities(particles, params.delta_t);
    Ok(())
}

/// Instantaneous temperature `sum m v^2 / (3N)` with `k_B = 1`.
pub fn current_temperature(particles: &ParticleSet) -> Result<f64> {
    if particles.is_empty() {
        return Err(Error::EmptyParticleSet);
    }
    let twice_kinetic: f64 = (0..particles.len()).map(|i| particles.mass(i) * particles.velocity(i).norm2()).sum();
    Ok(twice_kinetic / (3.0 * particles.len() as f64))
}

/// Rescales all velocities so the temperature moves towards `target` by at most
/// `max_delta_t`. Returns the applied velocity scale factor.
pub fn apply_thermostat(particles: &mut ParticleSet, target: f64, max_delta_t: f64) -> Result<f64> {
    let current = current_temperature(particles)?;
    if current == 0.0 {
        if target > 0.0 {
            return Err(Error::ZeroTemperature { target });
        }
        return Ok(1.0);
    }
    let next = current + (target - current).clamp(-max_delta_t, max_delta_t);
    let scale = (next / current).sqrt();
    for i in 0..particles.len() {
        let v = particles.velocity(i) * scale;
        particles.set_velocity(i, v);
    }
    Ok(scale)
}

/// Folds positions back into `[0, L)` per axis: mirrored with a flipped normal
/// velocity on reflective axes, wrapped on periodic axes.
pub fn apply_boundaries(particles: &mut ParticleSet, params: &SimulationParams) -> Result<()> {
    let size = params.domain_size;
    for i in 0..particles.len() {
        let mut x = particles.position(i);
        let mut v = particles.velocity(i);
        let mut touched = false;
        for d in 0..3 {
            let l = size[d];
            let c = x[d];
            if c >= 0.0 && c < l {
                continue;
            }
            if !c.is_finite() || c < -l || c > 2.0 * l {
                return Err(Error::BlowUp { index: i, position: x.0 });
            }
            touched = true;
            match params.boundary[d] {
                Boundary::Reflective => {
                    if c < 0.0 {
                        x[d] = -c;
                        v[d] = -v[d];
                    } else if c > l {
                        x[d] = 2.0 * l - c;
                        v[d] = -v[d];
                    }
                    // exactly on the upper wall stays there; binning clamps it
                }
                Boundary::Periodic => {
                    let w = c.rem_euclid(l);
                    x[d] = if w >= l { 0.0 } else { w };
                }
            }
        }
        if touched {
            particles.set_position(i, x);
            particles.set_velocity(i, v);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::{Layout, Particle, ParticleTypeInfo};
    use approx::assert_relative_eq;

    fn one(pos: Vec3, vel: Vec3) -> ParticleSet {
        ParticleSet::from_particles(vec![ParticleTypeInfo::unit(0)], [Particle::new(pos, vel, 0)], Layout::Aos).unwrap()
    }

    fn params(dt: f64) -> SimulationParams {
        let mut p = SimulationParams::cube(10.0, Boundary::Reflective);
        p.delta_t = dt;
        p
    }

    #[test]
    fn uniform_motion() {
        let mut ps = one(Vec3::new(5.0, 5.0, 5.0), Vec3::new(1.0, 0.0, 0.0));
        integrate_step(&mut ps, &params(0.1), |p| {
            p.store_forces(&[Vec3::ZERO]);
            Ok(())
        })
        .unwrap();
        assert_relative_eq!(ps.position(0).x(), 5.1, max_relative = 1e-14);
        assert_eq!(ps.velocity(0), Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn constant_force_kinematics() {
        let mut ps = one(Vec3::ZERO, Vec3::ZERO);
        let g = Vec3::new(0.0, 0.0, -12.44);
        ps.store_forces(&[g]);
        update_positions(&mut ps, 0.1);
        assert_relative_eq!(ps.position(0).z(), -0.0622, max_relative = 1e-12);
        ps.store_forces(&[g]);
        update_velocities(&mut ps, 0.1);
        assert_relative_eq!(ps.velocity(0).z(), -1.244, max_relative = 1e-12);
    }

    #[test]
    fn gravity_is_added_per_mass() {
        let types = vec![ParticleTypeInfo::unit(0), ParticleTypeInfo::new(1, 1.0, 0.5, 2.0).unwrap()];
        let mut ps = ParticleSet::from_particles(
            types,
            [Particle::new(Vec3::splat(1.0), Vec3::ZERO, 0), Particle::new(Vec3::splat(2.0), Vec3::ZERO, 1)],
            Layout::Soa,
        )
        .unwrap();
        add_gravity(&mut ps, Vec3::new(0.0, 0.0, -12.44));
        assert_relative_eq!(ps.force(0).z(), -12.44);
        assert_relative_eq!(ps.force(1).z(), -24.88);
    }

    #[test]
    fn mirror_symmetric_pair_stays_symmetric() {
        let mut p = params(0.001);
        p.domain_size = Vec3::splat(10.0);
        let a = Particle::new(Vec3::new(4.4, 5.0, 5.0), Vec3::new(0.3, 0.1, 0.0), 0);
        let b = Particle::new(Vec3::new(5.6, 5.0, 5.0), Vec3::new(-0.3, 0.1, 0.0), 0);
        let mut ps = ParticleSet::from_particles(vec![ParticleTypeInfo::unit(0)], [a, b], Layout::Aos).unwrap();
        let t = ps.types()[0];
        for _ in 0..200 {
            integrate_step(&mut ps, &p, |ps| {
                let d = ps.position(0) - ps.position(1);
                let f = crate::lj::lj_force_pair(d, &t, &t, 3.0)?;
                ps.store_forces(&[f, -f]);
                Ok(())
            })
            .unwrap();
            let (x0, x1) = (ps.position(0), ps.position(1));
            assert_relative_eq!(x0.x() - 5.0, -(x1.x() - 5.0), epsilon = 1e-12);
            assert_relative_eq!(x0.y(), x1.y(), epsilon = 1e-12);
        }
    }

    #[test]
    fn temperature_by_hand() {
        assert_eq!(current_temperature(&one(Vec3::ZERO, Vec3::ZERO)).unwrap(), 0.0);
        let ps = one(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
        assert_relative_eq!(current_temperature(&ps).unwrap(), 1.0);
        let fast = one(Vec3::ZERO, Vec3::new(2.0, 2.0, 2.0));
        assert_relative_eq!(current_temperature(&fast).unwrap(), 4.0);
        let empty = ParticleSet::new(vec![ParticleTypeInfo::unit(0)], Layout::Aos).unwrap();
        assert!(matches!(current_temperature(&empty), Err(Error::EmptyParticleSet)));
    }

    #[test]
    fn thermostat_scale_factors() {
        let v = Vec3::new(1.0, 1.0, 1.0);
        let mut ps = one(Vec3::ZERO, v);
        assert_relative_eq!(apply_thermostat(&mut ps, 1.0, 0.1).unwrap(), 1.0);
        let mut ps = one(Vec3::ZERO, v);
        assert_relative_eq!(apply_thermostat(&mut ps, 100.0, 0.1).unwrap(), 1.1f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(current_temperature(&ps).unwrap(), 1.1, max_relative = 1e-14);
        let mut ps = one(Vec3::ZERO, v);
        assert_relative_eq!(apply_thermostat(&mut ps, 0.95, 0.1).unwrap(), 0.95f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn thermostat_refuses_zero_velocities() {
        let mut ps = one(Vec3::ZERO, Vec3::ZERO);
        assert!(matches!(apply_thermostat(&mut ps, 1.0, 0.1), Err(Error::ZeroTemperature { .. })));
        assert_eq!(apply_thermostat(&mut ps, 0.0, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn thermostat_moves_monotonically() {
        let mut ps = one(Vec3::ZERO, Vec3::new(0.3, -0.2, 0.1));
        let mut t = current_temperature(&ps).unwrap();
        for _ in 0..50 {
            apply_thermostat(&mut ps, 2.0, 0.1).unwrap();
            let next = current_temperature(&ps).unwrap();
            assert!(next >= t && next - t <= 0.1 + 1e-12);
            t = next;
        }
        assert_relative_eq!(t, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn boundary_cases() {
        let p = params(0.1);
        let mut ps = one(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 1.0, 1.0));
        apply_boundaries(&mut ps, &p).unwrap();
        assert_eq!(ps.position(0), Vec3::new(1.0, 2.0, 3.0));

        let mut ps = one(Vec3::new(-0.2, 2.0, 3.0), Vec3::new(-1.0, 0.0, 0.0));
        apply_boundaries(&mut ps, &p).unwrap();
        assert_relative_eq!(ps.position(0).x(), 0.2);
        assert_eq!(ps.velocity(0).x(), 1.0);

        let mut per = p.clone();
        per.boundary = [Boundary::Periodic; 3];
        let mut ps = one(Vec3::new(10.3, 2.0, 3.0), Vec3::new(1.0, 0.0, 0.0));
        apply_boundaries(&mut ps, &per).unwrap();
        assert_relative_eq!(ps.position(0).x(), 0.3, max_relative = 1e-12);
        assert_eq!(ps.velocity(0).x(), 1.0);
    }

    #[test]
    fn blow_up_detected() {
        let p = params(0.1);
        let mut ps = one(Vec3::new(25.0, 2.0, 3.0), Vec3::ZERO);
        assert!(matches!(apply_boundaries(&mut ps, &p), Err(Error::BlowUp { index: 0, .. })));
        let mut ps = one(Vec3::new(f64::NAN, 2.0, 3.0), Vec3::ZERO);
        assert!(apply_boundaries(&mut ps, &p).is_err());
    }
}

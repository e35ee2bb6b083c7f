#![allow(dead_code)]

pub mod schedules;

use mdtune::params::{Boundary, SimulationParams};
use mdtune::{Layout, Particle, ParticleSet, ParticleTypeInfo, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All-pairs cutoff Lennard-Jones forces with nearest periodic images,
/// written independently of the library's kernels.
pub fn oracle_forces(ps: &ParticleSet, params: &SimulationParams) -> Vec<Vec3> {
    let n = ps.len();
    let types = ps.types();
    let mut out = vec![Vec3::ZERO; n];
    for i in 0..n {
        let ti = &types[ps.type_id(i) as usize];
        let xi = ps.position(i);
        let mut f = [0.0f64; 3];
        for j in 0..n {
            if i == j {
                continue;
            }
            let tj = &types[ps.type_id(j) as usize];
            let xj = ps.position(j);
            let mut d = [0.0; 3];
            for k in 0..3 {
                d[k] = xi[k] - xj[k];
                if params.boundary[k] == Boundary::Periodic {
                    let l = params.domain_size[k];
                    if d[k] > l / 2.0 {
                        d[k] -= l;
                    } else if d[k] < -l / 2.0 {
                        d[k] += l;
                    }
                }
            }
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r >= params.cutoff {
                continue;
            }
            let sigma = 0.5 * (ti.sigma + tj.sigma);
            let eps = (ti.epsilon * tj.epsilon).sqrt();
            // -dU/dr for U = 4 eps ((s/r)^12 - (s/r)^6)
            let sr6 = (sigma / r).powi(6);
            let mag = 4.0 * eps * (12.0 * sr6 * sr6 - 6.0 * sr6) / r;
            for k in 0..3 {
                f[k] += mag * d[k] / r;
            }
        }
        out[i] = Vec3(f);
    }
    out
}

/// `|a - b| / |b|` over the concatenated force vectors.
pub fn rel_error(a: &[Vec3], b: &[Vec3]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        num += (*x - *y).norm2();
        den += y.norm2();
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub fn two_species() -> Vec<ParticleTypeInfo> {
    vec![ParticleTypeInfo::new(0, 1.0, 1.0, 1.0).unwrap(), ParticleTypeInfo::new(1, 1.0, 0.5, 2.0).unwrap()]
}

/// `n` particles uniform in the box, rejecting points closer than `min_dist`
/// to an earlier one (nearest image) so forces stay finite and well scaled.
pub fn random_particles(n: usize, params: &SimulationParams, seed: u64, min_dist: f64, layout: Layout) -> ParticleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec3> = Vec::with_capacity(n);
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        assert!(attempts < 1_000_000, "box too dense");
        let l = params.domain_size;
        let x = Vec3::new(rng.random::<f64>() * l[0], rng.random::<f64>() * l[1], rng.random::<f64>() * l[2]);
        if pts.iter().all(|p| params.min_image(x, *p).norm() >= min_dist) {
            pts.push(x);
        }
    }
    let particles: Vec<Particle> = pts
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let v = Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            Particle::new(x, v, (i % 2) as u32)
        })
        .collect();
    ParticleSet::from_particles(two_species(), particles, layout).unwrap()
}

/// Box with boundary kinds drawn per axis.
pub fn random_params(seed: u64) -> SimulationParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut p = SimulationParams::cube(10.0, Boundary::Reflective);
    for d in 0..3 {
        p.domain_size[d] = 9.0 + rng.random::<f64>() * 9.0;
        p.boundary[d] = if rng.random::<bool>() { Boundary::Periodic } else { Boundary::Reflective };
    }
    p.skin = [0.0, 0.3, 0.5][rng.random_range(0..3)];
    p
}

/// Kinetic plus cut-and-shifted Lennard-Jones potential energy, all pairs.
/// The shift leaves forces unchanged, so this is what the dynamics conserve.
pub fn oracle_energy(ps: &ParticleSet, params: &SimulationParams) -> f64 {
    let types = ps.types();
    let mut e = 0.0;
    for i in 0..ps.len() {
        let ti = &types[ps.type_id(i) as usize];
        e += 0.5 * ti.mass * ps.velocity(i).norm2();
        for j in i + 1..ps.len() {
            let tj = &types[ps.type_id(j) as usize];
            let r = params.min_image(ps.position(i), ps.position(j)).norm();
            if r < params.cutoff {
                let sigma = 0.5 * (ti.sigma + tj.sigma);
                let u = |r: f64| {
                    let s6 = (sigma / r).powi(6);
                    4.0 * (ti.epsilon * tj.epsilon).sqrt() * (s6 * s6 - s6)
                };
                e += u(r) - u(params.cutoff);
            }
        }
    }
    e
}

/// Simple cubic lattice of `n^3` unit particles with random velocities of
/// zero total momentum.
pub fn lattice(n: usize, spacing: f64, speed: f64, seed: u64) -> ParticleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * spacing;
                let v = Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * speed;
                ps.push(Particle::new(x, v, 0));
            }
        }
    }
    let mean = ps.iter().fold(Vec3::ZERO, |a, p| a + p.velocity) * (1.0 / ps.len() as f64);
    for p in &mut ps {
        p.velocity = p.velocity - mean;
    }
    ParticleSet::from_particles(vec![ParticleTypeInfo::unit(0)], ps, Layout::Aos).unwrap()
}

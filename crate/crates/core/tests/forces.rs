mod common;

use common::{oracle_forces, random_params, random_particles, rel_error};
use mdtune::config::{enumerate_configurations, ContainerKind, TraversalKind};
use mdtune::container::{build_verlet_lists, traversal::write_sets, GridGeometry};
use mdtune::force::{compute_forces, ForceEngine};
use mdtune::params::{Boundary, SimulationParams};
use mdtune::{Layout, Particle, ParticleSet, ParticleTypeInfo, Vec3};
use std::sync::atomic::{AtomicU64, Ordering};

#[test]
fn collinear_triplet_matches_oracle() {
    let params = SimulationParams::cube(10.0, Boundary::Reflective);
    let ps = ParticleSet::from_particles(
        vec![ParticleTypeInfo::unit(0)],
        [0.0, 1.5, 3.0].map(|x| Particle::new(Vec3::new(2.0 + x, 5.0, 5.0), Vec3::ZERO, 0)),
        Layout::Aos,
    )
    .unwrap();
    let expected = oracle_forces(&ps, &params);
    for c in enumerate_configurations() {
        let (f, _) = compute_forces(&ps, c, &params).unwrap();
        assert!(rel_error(&f, &expected) < 1e-12, "{c}");
    }
}

#[test]
fn every_configuration_matches_oracle_on_random_boxes() {
    for seed in 0..6 {
        let mut params = random_params(seed);
        params.thread_count = 1 + seed as usize % 4;
        let ps = random_particles(400, &params, seed, 0.8, Layout::Aos);
        let expected = oracle_forces(&ps, &params);
        for c in enumerate_configurations() {
            let (f, _) = compute_forces(&ps, c, &params).unwrap();
            let err = rel_error(&f, &expected);
            assert!(err < 1e-9, "seed {seed} {c}: {err:e}");
        }
    }
}

#[test]
fn newton3_halves_directed_interactions() {
    for boundary in [Boundary::Reflective, Boundary::Periodic] {
        let params = SimulationParams::cube(15.0, boundary);
        let ps = random_particles(600, &params, 7, 0.8, Layout::Aos);
        for traversal in [TraversalKind::C08, TraversalKind::C18, TraversalKind::Sliced] {
            for c in enumerate_configurations().into_iter().filter(|c| c.traversal == traversal && c.newton3) {
                let mut off = c;
                off.newton3 = false;
                let count = |cfg| {
                    let counter = AtomicU64::new(0);
                    let mut work = ps.clone();
                    ForceEngine::new(&params, &work).compute_counted(&mut work, cfg, &counter).unwrap();
                    counter.load(Ordering::Relaxed)
                };
                let (n_on, n_off) = (count(c), count(off));
                assert!(n_on > 0);
                assert_eq!(n_off, 2 * n_on, "{c}");
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_forces() {
    let mut params = SimulationParams::cube(16.0, Boundary::Periodic);
    let ps = random_particles(800, &params, 3, 0.8, Layout::Aos);
    for c in enumerate_configurations() {
        params.thread_count = 1;
        let (one, _) = compute_forces(&ps, c, &params).unwrap();
        params.thread_count = 8;
        let (eight, _) = compute_forces(&ps, c, &params).unwrap();
        assert!(rel_error(&eight, &one) < 1e-8, "{c}");
    }
}

#[test]
fn verlet_lists_cover_pairs_until_half_skin_motion() {
    let mut params = SimulationParams::cube(14.0, Boundary::Periodic);
    params.skin = 0.5;
    params.rebuild_interval = 10_000;
    let mut ps = random_particles(500, &params, 11, 0.9, Layout::Aos);
    let vl = enumerate_configurations().into_iter().find(|c| c.container == ContainerKind::VerletLists).unwrap();
    let mut engine = ForceEngine::new(&params, &ps);
    engine.compute(&mut ps, vl).unwrap();
    let start = ps.positions();
    // drift each particle by up to skin / 2, wrapping periodically
    for step in 1..=5 {
        for i in 0..ps.len() {
            let v = ps.velocity(i);
            let dir = v * (1.0 / v.norm());
            let mut x = start[i] + dir * (0.049 * step as f64);
            for d in 0..3 {
                x[d] = x[d].rem_euclid(params.domain_size[d]);
            }
            ps.set_position(i, x);
        }
        let t = engine.compute(&mut ps, vl).unwrap();
        assert!(!t.rebuilt);
        assert!(rel_error(&ps.forces(), &oracle_forces(&ps, &params)) < 1e-9, "step {step}");
    }
}

#[test]
fn linked_cells_follow_particles_across_periodic_seams_between_rebuilds() {
    let mut params = SimulationParams::cube(12.0, Boundary::Periodic);
    params.rebuild_interval = 10_000;
    for c in enumerate_configurations().into_iter().filter(|c| c.container == ContainerKind::LinkedCells) {
        let mut ps = random_particles(300, &params, 5, 0.9, Layout::Aos);
        let mut engine = ForceEngine::new(&params, &ps);
        engine.compute(&mut ps, c).unwrap();
        for i in 0..ps.len() {
            let mut x = ps.position(i) + Vec3::new(0.2, -0.2, 0.2);
            for d in 0..3 {
                x[d] = x[d].rem_euclid(12.0);
            }
            ps.set_position(i, x);
        }
        engine.compute(&mut ps, c).unwrap();
        assert!(rel_error(&ps.forces(), &oracle_forces(&ps, &params)) < 1e-9, "{c}");
    }
}

#[test]
fn concurrent_tasks_never_share_a_written_cell() {
    for boundary in [Boundary::Reflective, Boundary::Periodic] {
        for csf in [1.0, 0.5] {
            for edge in [14.0, 21.0, 30.0] {
                let params = SimulationParams::cube(edge, boundary);
                let geom = GridGeometry::new(&params, csf);
                for t in [TraversalKind::C08, TraversalKind::C18, TraversalKind::Sliced] {
                    for step in write_sets(&geom, t, params.interaction_length(), 4) {
                        let mut writers: Vec<Vec<usize>> = vec![Vec::new(); geom.num_cells()];
                        for (task, cells) in step.iter().enumerate() {
                            for &c in cells {
                                writers[c].push(task);
                            }
                        }
                        for w in writers {
                            match t {
                                // slabs only meet at lock-guarded seams with their direct neighbour
                                TraversalKind::Sliced => assert!(w.len() <= 2 && w.windows(2).all(|p| p[1] == p[0] + 1)),
                                _ => assert!(w.len() <= 1, "{t} shares a cell"),
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn verlet_list_entries_double_without_newton3() {
    let params = SimulationParams::cube(12.0, Boundary::Periodic);
    let ps = random_particles(300, &params, 2, 0.8, Layout::Soa);
    let full = build_verlet_lists(&ps, &params, false);
    let half = build_verlet_lists(&ps, &params, true);
    assert_eq!(full.num_entries(), 2 * half.num_entries());
}

//! 12-6 Lennard-Jones interaction with Lorentz-Berthelot mixing.

use crate::error::{Error, Result};
use crate::particles::ParticleTypeInfo;
use crate::vec3::Vec3;

/// Mixed parameters of one species pair, pre-multiplied for the kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairParams {
    pub epsilon24: f64,
    pub sigma2: f64,
}

impl PairParams {
    pub fn mix(a: &ParticleTypeInfo, b: &ParticleTypeInfo) -> Self {
        let sigma = 0.5 * (a.sigma + b.sigma);
        let epsilon = (a.epsilon * b.epsilon).sqrt();
        PairParams { epsilon24: 24.0 * epsilon, sigma2: sigma * sigma }
    }
}

/// Row-major table of mixed parameters for every species pair.
#[derive(Clone, Debug)]
pub struct PairTable {
    n: usize,
    params: Vec<PairParams>,
}

impl PairTable {
    pub fn new(types: &[ParticleTypeInfo]) -> Self {
        let n = types.len();
        let mut params = Vec::with_capacity(n * n);
        for a in types {
            for b in types {
                params.push(PairParams::mix(a, b));
            }
        }
        PairTable { n, params }
    }

    #[inline(always)]
    pub fn get(&self, a: u32, b: u32) -> PairParams {
        self.params[a as usize * self.n + b as usize]
    }
}

/// Scalar prefactor `s` such that the force on A is `s * (pos_a - pos_b)`.
#[inline(always)]
pub fn force_prefactor(r2: f64, p: PairParams) -> f64 {
    let inv_r2 = 1.0 / r2;
    let s2 = p.sigma2 * inv_r2;
    let s6 = s2 * s2 * s2;
    p.epsilon24 * inv_r2 * s6 * (2.0 * s6 - 1.0)
}

/// Force on particle A exerted by particle B, `displacement = pos_a - pos_b`.
/// Zero at and beyond the cutoff.
pub fn lj_force_pair(
    displacement: Vec3,
    type_a: &ParticleTypeInfo,
    type_b: &ParticleTypeInfo,
    cutoff: f64,
) -> Result<Vec3> {
    let r2 = displacement.norm2();
    if r2 == 0.0 {
        return Err(Error::CoincidentParticles);
    }
    if r2 >= cutoff * cutoff {
        return Ok(Vec3::ZERO);
    }
    Ok(displacement * force_prefactor(r2, PairParams::mix(type_a, type_b)))
}

/// Truncated (unshifted) pair potential.
pub fn lj_potential(r2: f64, p: PairParams, cutoff: f64) -> f64 {
    if r2 >= cutoff * cutoff {
        return 0.0;
    }
    let s2 = p.sigma2 / r2;
    let s6 = s2 * s2 * s2;
    // epsilon24 / 6 = 4 epsilon
    p.epsilon24 / 6.0 * (s6 * s6 - s6)
}

//! Seeded sampling helpers shared by the certification sweeps and audits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{lp_norm, PrimalVector, SpaceSpec};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the cube `[-r, r]^n`.
pub fn uniform_cube(rng: &mut SeededRng, n: usize, r: f64) -> PrimalVector {
    PrimalVector::new((0..n).map(|_| rng.gen_range(-r..=r)).collect())
}

/// A random point of the closed `‖·‖_s` ball of radius `r`: a cube sample
/// rescaled to a uniformly drawn radius.
pub fn in_ball(rng: &mut SeededRng, space: &SpaceSpec, r: f64) -> PrimalVector {
    let dir = unit_direction(rng, space);
    let rho = r * rng.gen::<f64>();
    dir.scale(rho)
}

/// A random direction with unit `‖·‖_s` norm.
pub fn unit_direction(rng: &mut SeededRng, space: &SpaceSpec) -> PrimalVector {
    loop {
        let v = uniform_cube(rng, space.n(), 1.0);
        let norm = lp_norm(v.as_slice(), space.s());
        if norm > 1e-8 {
            return v.scale(1.0 / norm);
        }
    }
}

/// Log-uniform magnitude in `[10^lo, 10^hi]`.
pub fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo..=hi))
}

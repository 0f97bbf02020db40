//! Seeded randomness. Every randomized choice in the crate flows through a
//! `ChaCha8Rng` so that a `(config, seed)` pair fully determines a run.

use crate::{C64, CMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for a named sub-task.
pub fn substream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on uniform draws keeps us off rand_distr.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random real symmetric matrix with Gaussian entries, scaled so the
/// spectrum stays within roughly `[-radius, radius]`.
pub fn symmetric_gaussian(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = standard_normal(rng);
            m[(i, j)] = C64::new(v, 0.0);
            m[(j, i)] = C64::new(v, 0.0);
        }
    }
    // Gaussian symmetric n x n has spectral radius ~ 2 sqrt(n).
    let scale = radius / (2.0 * (n as f64).sqrt());
    m * C64::new(scale, 0.0)
}

/// Random dense real matrix with Gaussian entries.
pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| C64::new(standard_normal(rng), 0.0))
}

pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

//! Fixed workloads shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensilab_core::{CircleCoord, Precision, TorusPoint, WindowSet};

/// A seeded pseudo-random subset of `[0, n)` with roughly the given density
/// in percent.
pub fn scattered_set(n: u64, density_pct: u64, seed: u64) -> WindowSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems = (0..n).filter(|_| rng.random_range(0..100) < density_pct).collect();
    WindowSet::new(n, elems).expect("generated elements are in range")
}

/// Every multiple of `step` below `n`.
pub fn progression(n: u64, step: u64) -> WindowSet {
    WindowSet::new(n, (0..n).step_by(step as usize).collect()).expect("in range")
}

pub fn skew_start(dim: usize) -> (TorusPoint, CircleCoord) {
    let prec = Precision::W64;
    let coords = (0..dim)
        .map(|i| CircleCoord::from_raw(0x9e37_79b9_7f4a_7c15u128.wrapping_mul(i as u128 + 1), prec))
        .collect();
    (TorusPoint::new(coords).expect("nonempty"), CircleCoord::sqrt2_minus_1(prec))
}

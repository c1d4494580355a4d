//! Seeded sampling helpers. Callers always pass the generator in.

use alloc::vec::Vec;

use rand::Rng;

use crate::factors::FactorState;

/// Log-uniform draw from `[lo, hi]`, `0 < lo ≤ hi`. Returns `lo` when the
/// interval is a point.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let u: f64 = rng.gen_range(libm::log(lo)..=libm::log(hi));
    libm::exp(u).clamp(lo, hi)
}

/// A state with every coordinate log-uniform in `[lo, hi]`.
pub fn random_positive_state<R: Rng + ?Sized>(
    rng: &mut R,
    dims: &[usize],
    lo: f64,
    hi: f64,
) -> FactorState {
    let blocks = dims
        .iter()
        .map(|&d| (0..d).map(|_| log_uniform(rng, lo, hi)).collect())
        .collect();
    FactorState::from_blocks_unchecked(blocks)
}

/// A positive vector with every coordinate log-uniform in `[lo, hi]`.
pub fn random_positive_vector<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| log_uniform(rng, lo, hi)).collect()
}

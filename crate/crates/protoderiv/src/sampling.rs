//! Seeded random sparse vectors shared by the certification helpers, the
//! probe drivers, and the command-line experiments.
//!
//! All generators take an explicit [`ChaCha8Rng`] so that every sampled
//! experiment is reproducible from a single `u64` seed.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::pow2;
use crate::seqspace::SparseVec;

/// Deterministic generator for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonzero sparse vector with at most `max_support` entries on
/// indices `1..=max_index`, rescaled so its norm lands near
/// `2^e * u` for a uniform `e` in `min_exp..=max_exp` and `u` in `[0.5, 1)`.
///
/// The log-uniform norm sweeps the bump windows across many scales instead of
/// clustering at one magnitude.
pub fn sparse_in_shell(
    rng: &mut ChaCha8Rng,
    max_support: usize,
    max_index: u32,
    min_exp: i32,
    max_exp: i32,
) -> SparseVec {
    let support = rng.gen_range(1..=max_support.min(max_index as usize));
    let mut indices = BTreeSet::new();
    while indices.len() < support {
        indices.insert(rng.gen_range(1..=max_index));
    }
    let entries: Vec<(u32, f64)> = indices
        .into_iter()
        .map(|n| (n, nonzero_unit(rng)))
        .collect();
    let raw = SparseVec::from_entries(entries).expect("finite distinct entries");
    let target = pow2(rng.gen_range(min_exp..=max_exp)) * rng.gen_range(0.5..1.0);
    raw.scale(target / raw.norm())
}

/// Random direction of norm exactly-after-rounding 1 (up to one scaling
/// rounding per entry), with at most `max_support` entries.
pub fn unit_direction(rng: &mut ChaCha8Rng, max_support: usize, max_index: u32) -> SparseVec {
    let raw = sparse_in_shell(rng, max_support, max_index, 0, 0);
    raw.scale(1.0 / raw.norm())
}

/// Uniform draw from `[-1, 1]` bounded away from zero, so rescaling never
/// produces an entry that collapses to `+0.0`.
fn nonzero_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let c: f64 = rng.gen_range(-1.0..=1.0);
        if c.abs() >= pow2(-20) {
            return c;
        }
    }
}

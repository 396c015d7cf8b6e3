//! Seeded random streams.
//!
//! Every random draw comes from ChaCha8 keyed by the run seed. The 64-bit
//! stream id selects an independent keystream, so each rule in a population
//! owns its own substream and adding rules never shifts another rule's draws.
//! Stream ids are partitioned by purpose with the top two bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids below this belong to rules in a population (id = rule index).
pub const RULE_STREAMS: u64 = 0;
/// Frivolous-suit arrivals for rule `i` use `FRIVOLOUS_STREAMS | i`.
pub const FRIVOLOUS_STREAMS: u64 = 1 << 62;
/// Monte Carlo estimation of trial probabilities.
pub const ESTIMATION_STREAM: u64 = 1 << 63;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform on `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

//! Counter-addressed random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream selected by
//! `(seed, domain, index)`. A mode or a Monte Carlo trial therefore sees the
//! same numbers no matter which thread evaluates it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the stream families so that ensemble sampling and Monte Carlo
/// trials sharing a seed never reuse the same keystream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    Ensemble = 1,
    Trial = 2,
}

const INDEX_BITS: u32 = 56;

/// Stream for item `index` of `domain` under `seed`.
///
/// # Panics
/// If `index` does not fit in 56 bits.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    assert!(index < (1 << INDEX_BITS), "stream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | index);
    rng
}

//! Portable, seedable randomness.
//!
//! All streams are ChaCha8 (`rand_chacha`). A root seed is first split per
//! purpose with [`derive_seed`]; within a purpose, chunk `i` draws from the
//! ChaCha stream number `i as u64` of the generator keyed by that seed, so
//! chunks can be generated independently and in any order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Purpose tag for negative sampling streams.
pub const PURPOSE_SAMPLING: u64 = 0x73616d706c696e67; // "sampling"
/// Purpose tag for the intra-snapshot shuffle.
pub const PURPOSE_SHUFFLE: u64 = 0x73687566666c6521; // "shuffle!"

/// SplitMix64 finalizer applied to `root ^ purpose`.
pub fn derive_seed(root: u64, purpose: u64) -> u64 {
    let mut z = (root ^ purpose).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one chunk ordinal under `seed`.
pub fn chunk_rng(seed: u64, ordinal: i64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal as u64);
    rng
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `0..bound` (Lemire's multiply-and-reject).
pub fn below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = rng.next_u64() as u128 * bound as u128;
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

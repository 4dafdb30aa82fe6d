//! Deterministic seed derivation for parallel sampling streams.
//!
//! Scenario generation and the optimizer both evaluate work items in
//! parallel. To keep results independent of execution order, every work item
//! (a scenario index, a generation/individual pair) gets its own RNG whose
//! seed is derived from the master seed and the item address. Derivation uses
//! splitmix64, so streams are stable across platforms and releases.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer: full-avalanche 64-bit mix.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a sequence of stream tags.
///
/// Every tag is avalanched before being combined, so nearby tag tuples
/// (e.g. `(gen, i)` vs `(gen + 1, i + 1)`) yield unrelated seeds.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut h = mix(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    for &tag in tags {
        h = mix(h ^ mix(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    h
}

/// RNG for one addressed stream, e.g. one scenario index.
pub fn stream_rng(seed: u64, tags: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(seed, tags))
}

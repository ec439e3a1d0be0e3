//! Seed derivation for reproducible, order-independent replicates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream used by every sampler in the crate.
pub type ProcessRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ProcessRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replicate `replicate` in sub-experiment `experiment`.
///
/// Depends only on its three arguments, so any replicate can be re-run in
/// isolation and scheduling order never affects results.
pub fn derive_seed(master: u64, experiment: u64, replicate: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ experiment.rotate_left(21));
    splitmix64(h ^ replicate.rotate_left(42))
}

/// Folds a list of words into one experiment identifier.
pub fn experiment_key(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6d6f_7269_u64, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

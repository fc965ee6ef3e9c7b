//! Deterministic seed handling.
//!
//! Every chain gets its own ChaCha stream derived from `(seed, stream)`, so
//! chains never share randomness and results are reproducible byte-for-byte
//! across runs and platforms.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// RNG for one chain: `seed` selects the key, `stream` the chain.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a sub-seed for an independent job (for example one scan point)
/// from a master seed and a job index. SplitMix64 finaliser: bijective and
/// well mixed, so distinct jobs get unrelated seeds.
pub fn derive_seed(master: u64, job: u64) -> u64 {
    let mut z = master ^ job.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

//! Counter-based seeding.
//!
//! Trial `t` of an experiment with master seed `s` draws from ChaCha8 keyed
//! by `s` on stream `t`, so a trial's randomness does not depend on which
//! thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform `[0, 1)` value determined by `(seed, stream, index)`.
pub fn unit_f64(seed: u64, stream: u64, index: u64) -> f64 {
    let h = mix64(mix64(mix64(seed) ^ stream) ^ index);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

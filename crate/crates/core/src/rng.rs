//! Seeded random streams.
//!
//! Every random draw comes from a `ChaCha8Rng` seeded with a 64-bit value and a
//! stream id, so results are reproducible across platforms and worker counts.
//!
//! | purpose | seed | stream |
//! |---|---|---|
//! | initial state of sample `k` | `sample_seed(master_seed, k)` | [`STATE_STREAM`] |
//! | encoded noise | `NoiseSpec::seed` | [`NOISE_STREAM`] |
//! | unencoded baseline noise | `NoiseSpec::seed` | [`BASELINE_NOISE_STREAM`] |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STATE_STREAM: u64 = 0;
pub const NOISE_STREAM: u64 = 1;
pub const BASELINE_NOISE_STREAM: u64 = 2;
pub const DIAGNOSTIC_STREAM: u64 = 3;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `k` in a sweep.
pub fn sample_seed(master_seed: u64, k: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(k as u64))
}

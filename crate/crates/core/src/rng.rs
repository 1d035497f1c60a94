//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with a
//! 64-bit value derived by mixing a base seed with a path of integer labels
//! (for example `(seed, trial, node)`). The mixer is SplitMix64's finalizer,
//! applied once per label, so child seeds do not depend on how many other
//! streams were created before them. That makes results independent of the
//! number of worker threads and of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every stream.
pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a sequence of labels.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(base), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// Opens the stream identified by `base` and `labels`.
pub fn stream(base: u64, labels: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(base, labels))
}

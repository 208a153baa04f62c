//! Seeded, platform-independent randomness.
//!
//! Every random draw in the crate comes from a ChaCha20 stream keyed by the
//! caller's seed, with the kind of object being generated selecting the
//! stream id. The same `(seed, stream)` pair yields the same sequence on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Which kind of object a generator is drawing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Polynomial = 1,
    Haar = 2,
    Measurement = 3,
    Subset = 4,
    Shifts = 5,
    Perturbation = 6,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

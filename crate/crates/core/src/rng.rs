//! Seeded random streams.
//!
//! Every random component of a sketcher (matrix rows, each dither, circulant
//! generator, sign pattern, row subset) draws from its own ChaCha20 stream
//! keyed by the sketcher seed. Streams never overlap, so resizing one
//! component leaves the others untouched, and drawing components in a fixed
//! order keeps prefixes stable (the first rows of `A` do not depend on `m`).

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Identifies the generator and variate transforms. Stored in every manifest.
pub const RNG_IDENTIFIER: &str =
    "chacha20-seed_from_u64/stream-per-component/normal=rand_distr-0.5-ziggurat/uniform=rand-0.9-inclusive";

/// Stream ids for the components of a sketcher.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Rows = 1,
    Dither = 2,
    DitherPrime = 3,
    Xi = 4,
    Theta = 5,
    RowSet = 6,
    Gaussian = 7,
}

/// Generator for one component of the sketcher with the given seed.
pub fn substream(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed number `index` derived from `master` (SplitMix64 finalizer over a counter).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

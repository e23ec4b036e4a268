use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent draw streams per (round, agent).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Stream {
    Listing = 1,
    Purchase = 2,
    Delivery = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator keyed by (seed, round, agent, stream). Draws never depend on
/// anything that happened earlier in the run, so two mechanism variants
/// sharing a seed see the same random numbers.
pub(crate) fn keyed_rng(seed: u64, round: u64, agent: u64, stream: Stream) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ round) ^ agent);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(stream as u64);
    rng
}

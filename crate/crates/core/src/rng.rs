//! Deterministic random streams and order-stable parallel sharding.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per shard for Monte Carlo work. Fixed so results do not depend on
/// the number of worker threads.
pub const SHARD_SIZE: usize = 4096;

/// A `(seed, stream_id)` pair naming one ChaCha8 keystream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Child stream `index` of this stream. Pure function of `(self, index)`.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Named child stream, for separating unrelated uses of one seed.
    pub fn fork(&self, tag: &str) -> Self {
        let h = tag
            .bytes()
            .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
        self.substream(h)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Splits `0..count` into fixed-size shards, runs `f` on each with its own
/// substream, and returns the results in shard order.
pub fn map_shards<A, F>(count: usize, shard_size: usize, stream: RngStream, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>, &mut ChaCha8Rng) -> A + Sync + Send,
{
    let shards = count.div_ceil(shard_size.max(1));
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = s * shard_size;
            let end = (start + shard_size).min(count);
            let mut rng = stream.substream(s as u64).rng();
            f(start..end, &mut rng)
        })
        .collect()
}

/// Runs `f(i, rng_i)` for each trial index with an independent per-trial stream;
/// results come back in trial order.
pub fn map_trials<A, F>(trials: usize, stream: RngStream, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> A + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64).rng();
            f(i, &mut rng)
        })
        .collect()
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r`: a fixed avalanche mix of the master seed and the index.
#[inline]
pub fn mix(master_seed: u64, r: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(r.wrapping_add(0x6A09_E667_F3BC_C909)))
}

/// Independent sub-streams of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Main = 0,
    /// Independent copy used by symmetrization.
    Copy = 1,
    /// Fresh blocks for the block-probability series.
    Blocks = 2,
}

/// Generator for `(master_seed, replication, stream)`; a pure function of the triple.
pub fn replication_rng(master_seed: u64, replication: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(master_seed, replication));
    rng.set_stream(stream as u64);
    rng
}

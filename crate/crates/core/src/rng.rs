use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded generator for an independent stream. The same `(seed, stream)`
/// always yields the same sequence on every platform.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Deterministic Gaussian sampling on counter-keyed ChaCha streams.
//!
//! Every consumer derives its randomness from a `(seed, stream)` pair, so
//! results are bit-reproducible and independent of evaluation order or
//! thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// RNG for a logical stream of the given seed; streams with distinct keys
/// are statistically independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One standard normal draw (Box–Muller).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    // open interval (0, 1] for the log argument
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `n` standard normal draws.
pub fn standard_normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

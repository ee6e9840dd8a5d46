//! Seeded random streams.
//!
//! Every Monte Carlo run draws from its own ChaCha8 stream: the batch seed
//! selects the key and the run index selects the 64-bit stream id, so run
//! `i` sees the same numbers no matter which thread executes it or in which
//! order runs are scheduled.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type SimRng = ChaCha8Rng;

pub fn run_stream(seed: u64, run_index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// Draw from N(mu, sigma²). With `sigma == 0` returns `mu` without consuming
/// the stream, so disabling a noise source does not shift the others.
pub fn gaussian_sample<R: Rng + ?Sized>(rng: &mut R, mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return mu;
    }
    let z: f64 = StandardNormal.sample(rng);
    mu + sigma * z
}

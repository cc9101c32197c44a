//! Seeded randomness and shot sampling.
//!
//! Every random draw goes through a ChaCha8 stream chosen by `(seed, stream)`,
//! so independent work items never share generator state and results do not
//! depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type SimRng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-item seed derived from a master seed and an item index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    stream_rng(master, index).next_u64()
}

/// Shot-sampled estimate of a probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotEstimate<T> {
    pub shots: u64,
    pub p_hat: T,
    /// `√(p̂(1−p̂)/shots)`.
    pub stderr: T,
}

/// Draws `shots` Bernoulli(p) outcomes and summarizes them.
pub fn sample_shots<T: Real>(p: T, shots: u64, rng: &mut SimRng) -> Result<ShotEstimate<T>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be ≥ 1".into()));
    }
    let pf = p.as_f64();
    if !(-1e-9..=1.0 + 1e-9).contains(&pf) {
        return Err(Error::InvalidParameter(format!("probability {pf} outside [0, 1]")));
    }
    let dist = Binomial::new(shots, pf.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidParameter(format!("binomial: {e}")))?;
    let k = dist.sample(rng);
    let n = shots as f64;
    let p_hat = k as f64 / n;
    let stderr = (p_hat * (1.0 - p_hat) / n).sqrt();
    Ok(ShotEstimate { shots, p_hat: T::lit(p_hat), stderr: T::lit(stderr) })
}

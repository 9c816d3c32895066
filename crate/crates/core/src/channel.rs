//! Seeded AWGN channel.
//!
//! Noise streams are ChaCha8 keyed by `seed` and selected by `stream_id`, so
//! any substream can be regenerated independently of the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::filterbank::SampleBlock;

/// Per-sample noise standard deviation and its random stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(NoiseSpec {
            sigma,
            seed,
            stream_id,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// The generator behind stream `(seed, stream_id)`.
pub fn stream_rng(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Adds `sigma * N(0, 1)` to each sample in place.
pub fn add_awgn_in_place(samples: &mut [f64], spec: &NoiseSpec) {
    if spec.sigma == 0.0 {
        return;
    }
    let mut rng = stream_rng(spec.seed, spec.stream_id);
    for v in samples.iter_mut() {
        let z: f64 = StandardNormal.sample(&mut rng);
        *v += spec.sigma * z;
    }
}

pub fn add_awgn(block: &SampleBlock, spec: &NoiseSpec) -> SampleBlock {
    let mut out = block.clone();
    add_awgn_in_place(&mut out.samples, spec);
    out
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Noise standard deviation giving per-copy SNR `E0 / sigma^2` of `snr_db`.
pub fn sigma_for_snr(symbol_energy: f64, snr_db: f64) -> f64 {
    (symbol_energy / db_to_linear(snr_db)).sqrt()
}

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::theory::{ber_method1_exact, ber_method1_ideal, ber_method2, ber_pam};
use crate::channel::{add_awgn_in_place, db_to_linear, linear_to_db, stream_rng, NoiseSpec};
use crate::detector::detect_block;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::filterbank::{analyze_pyramid, synthesize_pyramid};
use crate::wavelet_filters::{make_daubechies, FilterPair};
use crate::wm_codec::{place, MessageBlock, Method, PlacementSpec};

/// Spectral efficiency reported alongside wavelet-modulation results.
pub const SPECTRAL_EFFICIENCY: f64 = 0.5;

const MESSAGE_PURPOSE: u64 = 1;
const NOISE_PURPOSE: u64 = 2;
const FIRST_ROUND: u64 = 16;
const MAX_ROUND: u64 = 1024;

/// A simulated modulation: one of the wavelet placements or plain PAM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Wavelet(Method),
    Pam,
}

impl Scheme {
    /// Matched theory value at linear per-copy SNR. WM1 uses the copy-count
    /// mixture.
    pub fn theory(&self, num_scales: usize, snr: f64) -> f64 {
        match self {
            Scheme::Wavelet(Method::Wm1) => ber_method1_exact(num_scales, snr),
            Scheme::Wavelet(Method::Wm2) => ber_method2(num_scales, snr),
            Scheme::Pam => ber_pam(snr),
        }
    }

    /// The all-scales idealization, reported for WM1 only.
    pub fn theory_ideal(&self, num_scales: usize, snr: f64) -> Option<f64> {
        match self {
            Scheme::Wavelet(Method::Wm1) => Some(ber_method1_ideal(num_scales, snr)),
            _ => None,
        }
    }

    /// Transmitted copies per message bit, averaged over a block.
    pub fn copies_per_bit(&self, num_scales: usize) -> f64 {
        let k = ((1u64 << num_scales) - 1) as f64;
        match self {
            Scheme::Wavelet(Method::Wm1) => k / (1u64 << (num_scales - 1)) as f64,
            Scheme::Wavelet(Method::Wm2) => k,
            Scheme::Pam => 1.0,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Wavelet(m) => m.fmt(f),
            Scheme::Pam => f.write_str("pam"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("pam") {
            return Ok(Scheme::Pam);
        }
        s.parse::<Method>().map(Scheme::Wavelet).map_err(|_| {
            Error::Config(format!(
                "unknown method '{}' (expected wm1, wm2 or pam)",
                s.trim()
            ))
        })
    }
}

/// One point of a BER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    /// Per-copy SNR `E0 / sigma^2` in dB.
    pub snr_db: f64,
    /// SNR charging every transmitted copy of a bit to that bit, in dB.
    pub snr_db_per_message_energy: f64,
    pub ber_theory: f64,
    pub ber_theory_ideal: Option<f64>,
    /// `errors / trials`; `None` for theory-only points.
    pub ber_sim: Option<f64>,
    /// Bits tested.
    pub trials: u64,
    /// Bit errors observed.
    pub errors: u64,
    /// Message blocks simulated.
    pub blocks: u64,
}

impl BerPoint {
    pub fn theory_only(scheme: Scheme, num_scales: usize, snr_db: f64) -> Self {
        let snr = db_to_linear(snr_db);
        BerPoint {
            snr_db,
            snr_db_per_message_energy: snr_db + linear_to_db(scheme.copies_per_bit(num_scales)),
            ber_theory: scheme.theory(num_scales, snr),
            ber_theory_ideal: scheme.theory_ideal(num_scales, snr),
            ber_sim: None,
            trials: 0,
            errors: 0,
            blocks: 0,
        }
    }

    /// Binomial standard error of `ber_sim` around probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        if self.trials == 0 {
            return f64::INFINITY;
        }
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Parameters of one simulated BER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub num_scales: usize,
    pub message_len: usize,
    pub symbol_energy: f64,
    pub snr_grid_db: Vec<f64>,
    /// Stop a point once this many bit errors have been seen...
    pub min_errors: u64,
    /// ...or this many message blocks have been sent.
    pub max_trials: u64,
    pub seed: u64,
    pub wavelet_taps: usize,
}

impl Default for ExperimentConfig {
    /// 512-bit messages over 6 scales with the 4-tap Daubechies filter.
    fn default() -> Self {
        ExperimentConfig {
            scheme: Scheme::Wavelet(Method::Wm1),
            num_scales: 6,
            message_len: 512,
            symbol_energy: 1.0,
            snr_grid_db: (0..=24).map(|i| -20.0 + i as f64).collect(),
            min_errors: 200,
            max_trials: 1000,
            seed: 1,
            wavelet_taps: 4,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("SNR grid value {bad} is not finite")));
        }
        if self.min_errors < 1 {
            return Err(Error::Config("min_errors must be at least 1".into()));
        }
        if self.max_trials < 1 {
            return Err(Error::Config("max_trials must be at least 1".into()));
        }
        if !(self.symbol_energy > 0.0 && self.symbol_energy.is_finite()) {
            return Err(Error::Config(format!(
                "symbol energy must be positive, got {}",
                self.symbol_energy
            )));
        }
        self.build_simulator().map(|_| ())
    }

    fn build_simulator(&self) -> Result<BlockSimulator> {
        if self.message_len == 0 {
            return Err(Error::Config("message_len must be at least 1".into()));
        }
        let wavelet = match self.scheme {
            Scheme::Wavelet(method) => Some((
                make_daubechies(self.wavelet_taps)?,
                PlacementSpec::for_message(method, self.num_scales, self.message_len)?,
            )),
            Scheme::Pam => None,
        };
        if self.num_scales == 0 || self.num_scales > 30 {
            return Err(Error::Config(format!(
                "number of scales must be in 1..=30, got {}",
                self.num_scales
            )));
        }
        Ok(BlockSimulator {
            wavelet,
            message_len: self.message_len,
            symbol_energy: self.symbol_energy,
        })
    }
}

/// Key for a derived stream family; independent of grid position.
fn derive_seed(seed: u64, snr_db: f64, purpose: u64) -> u64 {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&snr_db.to_bits().to_le_bytes());
    key[16..24].copy_from_slice(&purpose.to_le_bytes());
    ChaCha8Rng::from_seed(key).next_u64()
}

struct BlockSimulator {
    wavelet: Option<(FilterPair, PlacementSpec)>,
    message_len: usize,
    symbol_energy: f64,
}

impl BlockSimulator {
    /// Bit errors in message block `trial`.
    fn block_errors(&self, message_seed: u64, noise: NoiseSpec) -> Result<u64> {
        let mut rng = stream_rng(message_seed, noise.stream_id);
        let bits: Vec<u8> = (0..self.message_len)
            .map(|_| rng.random::<bool>() as u8)
            .collect();

        let decided = match &self.wavelet {
            Some((fp, spec)) => {
                let msg = MessageBlock::new(bits.clone(), self.symbol_energy)?;
                let frame = place(&msg, spec.method, spec.num_scales)?;
                let mut block = synthesize_pyramid(&frame, fp)?;
                add_awgn_in_place(&mut block.samples, &noise);
                let received = analyze_pyramid(&block, spec.num_scales, fp)?;
                detect_block(
                    &received,
                    spec,
                    self.symbol_energy,
                    noise.variance().max(f64::MIN_POSITIVE),
                )?
            }
            None => {
                let amp = self.symbol_energy.sqrt();
                let mut noise_rng = stream_rng(noise.seed, noise.stream_id);
                bits.iter()
                    .map(|&b| {
                        let z: f64 = StandardNormal.sample(&mut noise_rng);
                        let r = if b == 1 { amp } else { -amp } + noise.sigma() * z;
                        (r > 0.0) as u8
                    })
                    .collect()
            }
        };
        Ok(bits.iter().zip(&decided).filter(|(a, b)| a != b).count() as u64)
    }
}

/// [`run_monte_carlo_with`] using the default [`Execution`].
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    run_monte_carlo_with(cfg, Execution::default())
}

/// Simulates every grid point until `min_errors` bit errors or `max_trials`
/// blocks.
///
/// Block `t` at a given SNR always uses the same message and noise streams,
/// and the stopping rule is applied block by block in index order, so the
/// result does not depend on `exec`.
pub fn run_monte_carlo_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    let sim = cfg.build_simulator()?;
    let bits_per_block = cfg.message_len as u64;

    cfg.snr_grid_db
        .iter()
        .map(|&snr_db| {
            let sigma = (cfg.symbol_energy / db_to_linear(snr_db)).sqrt();
            let message_seed = derive_seed(cfg.seed, snr_db, MESSAGE_PURPOSE);
            let noise_seed = derive_seed(cfg.seed, snr_db, NOISE_PURPOSE);

            let mut blocks = 0u64;
            let mut errors = 0u64;
            let mut round = FIRST_ROUND;
            'outer: while blocks < cfg.max_trials && errors < cfg.min_errors {
                let end = (blocks + round).min(cfg.max_trials);
                let counts = exec.map_range(blocks..end, |t| {
                    sim.block_errors(message_seed, NoiseSpec::new(sigma, noise_seed, t)?)
                });
                for count in counts {
                    errors += count?;
                    blocks += 1;
                    if errors >= cfg.min_errors {
                        break 'outer;
                    }
                }
                round = (round * 2).min(MAX_ROUND);
            }

            let trials = blocks * bits_per_block;
            let mut point = BerPoint::theory_only(cfg.scheme, cfg.num_scales, snr_db);
            point.ber_sim = Some(errors as f64 / trials as f64);
            point.trials = trials;
            point.errors = errors;
            point.blocks = blocks;
            Ok(point)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ber_lab::q_function;

    fn quick(scheme: Scheme, num_scales: usize, message_len: usize) -> ExperimentConfig {
        ExperimentConfig {
            scheme,
            num_scales,
            message_len,
            snr_grid_db: vec![-3.0, 0.0],
            min_errors: 50,
            max_trials: 200,
            seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn scheme_names() {
        for s in ["wm1", "wm2", "pam"] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
        assert!("qam".parse::<Scheme>().is_err());
    }

    #[test]
    fn copies_per_bit() {
        assert_eq!(Scheme::Wavelet(Method::Wm2).copies_per_bit(6), 63.0);
        assert_eq!(Scheme::Wavelet(Method::Wm1).copies_per_bit(1), 1.0);
        assert_eq!(Scheme::Wavelet(Method::Wm1).copies_per_bit(2), 1.5);
        assert_eq!(Scheme::Pam.copies_per_bit(6), 1.0);
    }

    #[test]
    fn rejects_bad_config_up_front() {
        let mut cfg = ExperimentConfig::default();
        cfg.snr_grid_db.clear();
        assert!(run_monte_carlo(&cfg).is_err());
        let cfg = ExperimentConfig {
            message_len: 510,
            ..ExperimentConfig::default()
        };
        assert!(matches!(run_monte_carlo(&cfg), Err(Error::Config(_))));
        let cfg = ExperimentConfig {
            wavelet_taps: 5,
            ..ExperimentConfig::default()
        };
        assert!(run_monte_carlo(&cfg).is_err());
        let cfg = ExperimentConfig {
            min_errors: 0,
            ..ExperimentConfig::default()
        };
        assert!(run_monte_carlo(&cfg).is_err());
    }

    #[test]
    fn high_snr_has_no_errors() {
        let cfg = ExperimentConfig {
            scheme: Scheme::Wavelet(Method::Wm2),
            num_scales: 3,
            message_len: 8,
            snr_grid_db: vec![40.0],
            min_errors: 1,
            max_trials: 10_000,
            ..ExperimentConfig::default()
        };
        let pts = run_monte_carlo(&cfg).unwrap();
        assert_eq!(pts[0].errors, 0);
        assert_eq!(pts[0].blocks, 10_000);
        assert_eq!(pts[0].ber_sim, Some(0.0));
    }

    #[test]
    fn sequential_equals_parallel() {
        for scheme in [
            Scheme::Wavelet(Method::Wm1),
            Scheme::Wavelet(Method::Wm2),
            Scheme::Pam,
        ] {
            let cfg = quick(scheme, 3, 32);
            let a = run_monte_carlo_with(&cfg, Execution::Sequential).unwrap();
            let b = run_monte_carlo_with(&cfg, Execution::Parallel).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, run_monte_carlo(&cfg).unwrap());
        }
    }

    #[test]
    fn stops_at_min_errors() {
        let cfg = quick(Scheme::Pam, 1, 64);
        for p in run_monte_carlo(&cfg).unwrap() {
            assert!(p.errors >= cfg.min_errors || p.blocks == cfg.max_trials);
            assert_eq!(p.trials, p.blocks * 64);
            assert_eq!(p.ber_sim, Some(p.errors as f64 / p.trials as f64));
        }
    }

    #[test]
    fn seed_changes_results() {
        let a = run_monte_carlo(&quick(Scheme::Pam, 1, 64)).unwrap();
        let mut cfg = quick(Scheme::Pam, 1, 64);
        cfg.seed = 12;
        let b = run_monte_carlo(&cfg).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn theory_columns() {
        let p = BerPoint::theory_only(Scheme::Wavelet(Method::Wm2), 2, 0.0);
        assert_eq!(p.ber_theory, q_function(3f64.sqrt()));
        assert!(p.ber_theory_ideal.is_none());
        assert!((p.snr_db_per_message_energy - linear_to_db(3.0)).abs() < 1e-12);
        let p = BerPoint::theory_only(Scheme::Wavelet(Method::Wm1), 6, 0.0);
        assert_eq!(p.ber_theory_ideal, Some(q_function(6f64.sqrt())));
    }
}

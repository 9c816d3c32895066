//! Wavelet (fractal) modulation over the additive white Gaussian noise channel.
//!
//! A binary message is copied into several dyadic detail scales, synthesized
//! into a time-domain waveform with an inverse Mallat filter bank, passed
//! through AWGN, analyzed back into scales and detected with an equal-gain
//! maximum-likelihood combiner. [`ber_lab`] pairs the closed-form error
//! probabilities with a seeded Monte Carlo harness that runs the whole chain.
//!
//! Two message placements are supported:
//!
//! * [`Method::Wm1`] puts decimated copies of the message in coarser scales,
//!   so symbol `k` has `1 + min(v2(k), M - 1)` copies.
//! * [`Method::Wm2`] repeats the whole message `2^m` times in scale `m`, so
//!   every symbol has `2^M - 1` copies.
//!
//! ```
//! use wavemod::{run_monte_carlo, ExperimentConfig, Method, Scheme};
//!
//! let cfg = ExperimentConfig {
//!     scheme: Scheme::Wavelet(Method::Wm2),
//!     num_scales: 4,
//!     message_len: 64,
//!     snr_grid_db: vec![-8.0, -6.0],
//!     ..ExperimentConfig::default()
//! };
//! for p in run_monte_carlo(&cfg)? {
//!     println!("{} dB: theory {:e}, simulated {:?}", p.snr_db, p.ber_theory, p.ber_sim);
//! }
//! # Ok::<(), wavemod::Error>(())
//! ```
//!
//! Monte Carlo trials run on rayon when the `parallel` feature is enabled
//! (the default); results are identical to the sequential path for a given
//! seed.

pub mod ber_lab;
pub mod channel;
pub mod cli_io;
pub mod detector;
mod error;
mod exec;
pub mod filterbank;
pub mod wavelet_filters;
pub mod wm_codec;

pub use ber_lab::{
    ber_method1_exact, ber_method1_ideal, ber_method2, ber_pam, q_function, q_inverse,
    run_monte_carlo, run_monte_carlo_with, BerPoint, ExperimentConfig, Scheme, SPECTRAL_EFFICIENCY,
};
pub use channel::{add_awgn, NoiseSpec};
pub use detector::{detect_block, ml_decide, Decision, ObservationSet};
pub use error::{Error, Result};
pub use exec::Execution;
pub use filterbank::{
    analysis_step, analyze_pyramid, synthesis_step, synthesize_pyramid, SampleBlock, SubbandFrame,
};
pub use wavelet_filters::{make_daubechies, validate_filter_pair, FilterPair, Violation};
pub use wm_codec::{
    gather_observations, place, place_method1, place_method2, MessageBlock, Method, PlacementSpec,
};

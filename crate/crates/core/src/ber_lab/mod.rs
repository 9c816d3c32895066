//! Closed-form error probabilities and the Monte Carlo harness that checks
//! the full modulate/channel/demodulate chain against them.

mod monte_carlo;
mod theory;

pub use monte_carlo::{
    run_monte_carlo, run_monte_carlo_with, BerPoint, ExperimentConfig, Scheme, SPECTRAL_EFFICIENCY,
};
pub use theory::{
    ber_method1_exact, ber_method1_ideal, ber_method2, ber_pam, q_function, q_inverse,
};

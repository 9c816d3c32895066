use std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// The `x` with `Q(x) = p`, for `p` in `(0, 1)`.
///
/// Returns `None` outside that range.
pub fn q_inverse(p: f64) -> Option<f64> {
    if !(p > 0.0 && p < 1.0) {
        return None;
    }
    // Q is strictly decreasing; Q(-40) rounds to 1 and Q(40) to 0.
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Binary antipodal signalling at per-symbol SNR `snr` (linear).
pub fn ber_pam(snr: f64) -> f64 {
    q_function(snr.sqrt())
}

/// `Q(sqrt(M snr))`: WM1 assuming every symbol has a copy in every scale.
///
/// This lower-bounds the real WM1 error rate; see [`ber_method1_exact`].
pub fn ber_method1_ideal(num_scales: usize, snr: f64) -> f64 {
    q_function((num_scales as f64 * snr).sqrt())
}

/// WM1 error rate averaged over the copy-count census of a block.
///
/// Half the symbols have one copy, a quarter two, and so on; the last
/// `2^-(M-1)` share has all `M`.
pub fn ber_method1_exact(num_scales: usize, snr: f64) -> f64 {
    let big_m = num_scales.max(1);
    let mut total = 0.0;
    let mut weight = 1.0;
    for copies in 1..big_m {
        weight *= 0.5;
        total += weight * q_function((copies as f64 * snr).sqrt());
    }
    total + weight * q_function((big_m as f64 * snr).sqrt())
}

/// `Q(sqrt(K snr))` with `K = 2^M - 1` copies per symbol.
pub fn ber_method2(num_scales: usize, snr: f64) -> f64 {
    let copies = (1u64 << num_scales) - 1;
    q_function((copies as f64 * snr).sqrt())
}

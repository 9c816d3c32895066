//! Orthonormal scaling/wavelet filter pairs.
//!
//! Daubechies filters are built by spectral factorization: the half-band
//! product filter `|H(w)|^2 = 2 cos^{2p}(w/2) P(sin^2(w/2))` is split by
//! keeping the zeros of `P` that lie inside the unit circle (minimum phase).

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used by [`validate_filter_pair`].
pub const FILTER_TOLERANCE: f64 = 1e-12;

/// Largest Daubechies filter length [`make_daubechies`] will build.
pub const MAX_TAPS: usize = 20;

/// Scaling filter `h` and wavelet filter `g` of one analysis/synthesis level.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    h: Vec<f64>,
    g: Vec<f64>,
}

impl FilterPair {
    /// Wraps raw taps without checking them; see [`validate_filter_pair`].
    pub fn from_taps(h: Vec<f64>, g: Vec<f64>) -> Self {
        FilterPair { h, g }
    }

    /// Builds the pair from a scaling filter, deriving `g(n) = (-1)^n h(L-1-n)`.
    pub fn from_scaling(h: Vec<f64>) -> Self {
        let g = quadrature_mirror(&h);
        FilterPair { h, g }
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn taps(&self) -> usize {
        self.h.len()
    }
}

fn quadrature_mirror(h: &[f64]) -> Vec<f64> {
    let len = h.len();
    (0..len)
        .map(|n| {
            let v = h[len - 1 - n];
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Tap counts accepted by [`make_daubechies`].
pub fn supported_taps() -> impl Iterator<Item = usize> {
    (2..=MAX_TAPS).step_by(2)
}

fn supported_taps_text() -> String {
    let list: Vec<String> = supported_taps().map(|t| t.to_string()).collect();
    list.join(", ")
}

/// Daubechies filter with `taps / 2` vanishing moments (`taps = 2` is Haar).
pub fn make_daubechies(taps: usize) -> Result<FilterPair> {
    if taps < 2 || !taps.is_multiple_of(2) || taps > MAX_TAPS {
        return Err(Error::Config(format!(
            "unsupported wavelet tap count {taps}; supported values are {}",
            supported_taps_text()
        )));
    }
    let p = taps / 2;

    // P(y) = sum_k C(p-1+k, k) y^k, lowest degree first.
    let mut poly = Vec::with_capacity(p);
    let mut binom = 1.0f64;
    for k in 0..p {
        if k > 0 {
            binom = binom * (p - 1 + k) as f64 / k as f64;
        }
        poly.push(Complex64::new(binom, 0.0));
    }

    let y_roots = polynomial_roots(&poly);

    // Each y root gives a reciprocal pair z, 1/z with z + 1/z = 2 - 4y.
    let mut z_roots = Vec::with_capacity(p - 1);
    for y in y_roots {
        let b = Complex64::new(2.0, 0.0) - 4.0 * y;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) / 2.0;
        let z2 = (b - disc) / 2.0;
        z_roots.push(if z1.norm() < z2.norm() { z1 } else { z2 });
    }

    // Highest power first: (z + 1)^p * prod (z - z_i).
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..p {
        coeffs = multiply_monic(&coeffs, Complex64::new(-1.0, 0.0));
    }
    for &z in &z_roots {
        coeffs = multiply_monic(&coeffs, z);
    }

    let mut h: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    let sum: f64 = h.iter().sum();
    let scale = SQRT_2 / sum;
    h.iter_mut().for_each(|v| *v *= scale);

    Ok(FilterPair::from_scaling(h))
}

/// Multiplies a polynomial (highest power first) by `(z - root)`.
fn multiply_monic(coeffs: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        out[i] += c;
        out[i + 1] -= c * root;
    }
    out
}

/// Evaluates a polynomial (lowest power first) and its derivative.
fn eval_with_derivative(poly: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        deriv = deriv * x + value;
        value = value * x + c;
    }
    (value, deriv)
}

/// All complex roots of a polynomial given lowest power first (Aberth-Ehrlich).
fn polynomial_roots(poly: &[Complex64]) -> Vec<Complex64> {
    let degree = poly.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }

    // Cauchy bound on root magnitude sets the starting circle.
    let lead = poly[degree].norm();
    let bound = 1.0
        + poly[..degree]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / degree as f64;
            Complex64::from_polar(0.5 * bound, angle)
        })
        .collect();

    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (value, deriv) = eval_with_derivative(poly, roots[i]);
            if value.norm() == 0.0 {
                continue;
            }
            let ratio = value / deriv;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (roots[i] - roots[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            roots[i] -= step;
            max_step = max_step.max(step.norm() / roots[i].norm().max(1.0));
        }
        if max_step < 1e-16 {
            break;
        }
    }

    // Newton polish.
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let (value, deriv) = eval_with_derivative(poly, *root);
            if deriv.norm() == 0.0 {
                break;
            }
            *root -= value / deriv;
        }
    }
    roots
}

/// Which [`FilterPair`] invariant a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// `len(h) == len(g)`, even, at least 2.
    Length,
    ScalingUnitNorm,
    WaveletUnitNorm,
    /// `sum_n h(n) h(n - 2k) = delta(k)`.
    EvenShiftOrthogonality,
    /// `g(n) = (-1)^n h(L-1-n)`.
    Quadrature,
    /// `sum h = sqrt(2)`.
    ScalingSum,
    /// `sum g = 0`.
    WaveletSum,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Invariant::Length => "filter length",
            Invariant::ScalingUnitNorm => "unit norm of h",
            Invariant::WaveletUnitNorm => "unit norm of g",
            Invariant::EvenShiftOrthogonality => "orthogonality of h to even shifts",
            Invariant::Quadrature => "quadrature relation g(n) = (-1)^n h(L-1-n)",
            Invariant::ScalingSum => "Σh ≠ √2",
            Invariant::WaveletSum => "Σg ≠ 0",
        };
        f.write_str(text)
    }
}

/// One failed invariant and the measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: Invariant,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (residual {:e})", self.invariant, self.residual)
    }
}

/// Checks every filter pair invariant at [`FILTER_TOLERANCE`]; empty means valid.
pub fn validate_filter_pair(fp: &FilterPair) -> Vec<Violation> {
    let (h, g) = (fp.h(), fp.g());
    let mut out = Vec::new();
    let mut check = |invariant, residual: f64| {
        if residual.is_nan() || residual > FILTER_TOLERANCE {
            out.push(Violation {
                invariant,
                residual,
            });
        }
    };

    if h.len() != g.len() || h.len() < 2 || h.len() % 2 != 0 {
        check(
            Invariant::Length,
            (h.len() as f64 - g.len() as f64).abs().max(1.0),
        );
        return out;
    }

    let energy = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    check(Invariant::ScalingUnitNorm, (energy(h) - 1.0).abs());
    check(Invariant::WaveletUnitNorm, (energy(g) - 1.0).abs());

    let taps = h.len();
    let mut worst_shift = 0.0f64;
    for k in 1..taps / 2 {
        let dot: f64 = (2 * k..taps).map(|n| h[n] * h[n - 2 * k]).sum();
        worst_shift = worst_shift.max(dot.abs());
    }
    check(Invariant::EvenShiftOrthogonality, worst_shift);

    let mirror = quadrature_mirror(h);
    let quad = g
        .iter()
        .zip(&mirror)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(Invariant::Quadrature, quad);

    check(
        Invariant::ScalingSum,
        (h.iter().sum::<f64>() - SQRT_2).abs(),
    );
    check(Invariant::WaveletSum, g.iter().sum::<f64>().abs());
    out
}

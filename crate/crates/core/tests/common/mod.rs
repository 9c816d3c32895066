//! Reference computations used by the integration tests. Nothing here calls
//! into the library's implementation of the quantity being checked.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn gaussian_density(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson_rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adaptive_simpson_rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    adaptive_simpson_rec(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Gaussian tail `∫_x^∞ φ(t) dt` by quadrature over unit panels up to 40.
pub fn q_by_quadrature(x: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut a = x;
    while a < 40.0 {
        let b = (a + 1.0).min(40.0);
        total += integrate(&gaussian_density, a, b, tol / 64.0);
        a = b;
    }
    total
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[col];
            for (v, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *v -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Daubechies scaling filter from its defining constraints, by Newton's method:
/// `Σh = √2`, `Σ h(n) h(n+2k) = 0` for `k = 1..p-1`, and
/// `Σ (-1)^n n^m h(n) = 0` for `m = 0..p-1`.
pub fn daubechies_by_constraints(start: &[f64]) -> Vec<f64> {
    let taps = start.len();
    let p = taps / 2;
    let mut h = start.to_vec();
    let sign = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };

    for _ in 0..100 {
        let mut residual = Vec::with_capacity(taps);
        let mut jac = Vec::with_capacity(taps);

        residual.push(h.iter().sum::<f64>() - std::f64::consts::SQRT_2);
        jac.push(vec![1.0; taps]);

        for k in 1..p {
            let s = 2 * k;
            residual.push((0..taps - s).map(|n| h[n] * h[n + s]).sum());
            jac.push(
                (0..taps)
                    .map(|j| {
                        let up = if j + s < taps { h[j + s] } else { 0.0 };
                        let down = if j >= s { h[j - s] } else { 0.0 };
                        up + down
                    })
                    .collect(),
            );
        }
        for m in 0..p {
            let w = |n: usize| sign(n) * (n as f64).powi(m as i32);
            residual.push((0..taps).map(|n| w(n) * h[n]).sum());
            jac.push((0..taps).map(w).collect());
        }

        let step = solve_linear(jac, residual.iter().map(|r| -r).collect());
        let size: f64 = step.iter().map(|s| s.abs()).fold(0.0, f64::max);
        h.iter_mut().zip(&step).for_each(|(v, s)| *v += s);
        if size < 1e-16 {
            break;
        }
    }
    h
}

/// Root of a decreasing function on `[lo, hi]` by bisection.
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// SNR (dB) where a sampled BER curve crosses `level`, by linear
/// interpolation of `log10(BER)` between the bracketing grid points.
pub fn crossing_db(points: &[(f64, f64)], level: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 >= level && y1 < level && y1 > 0.0 {
            let (l0, l1, lt) = (y0.log10(), y1.log10(), level.log10());
            Some(x0 + (lt - l0) / (l1 - l0) * (x1 - x0))
        } else {
            None
        }
    })
}

/// Prints and returns a pass/fail line for an acceptance criterion.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "[{}] criterion {id}: {name} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

//! Periodized Mallat pyramid.
//!
//! One analysis level computes
//!
//! ```text
//! c(n) = sum_k h(k) c_next((2n + k) mod N)
//! x(n) = sum_k g(k) c_next((2n + k) mod N)
//! ```
//!
//! and synthesis is its adjoint. For an orthonormal [`FilterPair`] the two are
//! exact inverses at every length, including lengths shorter than the filter.
//! Scale indices are relative: the coarsest detail scale is 0.

use crate::error::{Error, Result};
use crate::wavelet_filters::FilterPair;

/// Real time-domain samples at rate `2^rate_exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub samples: Vec<f64>,
    pub rate_exponent: i32,
}

impl SampleBlock {
    pub fn new(samples: Vec<f64>, rate_exponent: i32) -> Self {
        SampleBlock {
            samples,
            rate_exponent,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Detail sequences of `M` scales plus the coarse approximation branch.
///
/// `details[m]` has length `n0 * 2^m`; `coarse` has length `n0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandFrame {
    coarse: Vec<f64>,
    details: Vec<Vec<f64>>,
}

impl SubbandFrame {
    /// Checks the dyadic layout before wrapping.
    pub fn new(coarse: Vec<f64>, details: Vec<Vec<f64>>) -> Result<Self> {
        let n0 = coarse.len();
        if n0 == 0 {
            return Err(Error::Shape("coarse branch must be non-empty".into()));
        }
        if details.is_empty() {
            return Err(Error::Shape("frame needs at least one detail scale".into()));
        }
        for (m, d) in details.iter().enumerate() {
            let want = n0 << m;
            if d.len() != want {
                return Err(Error::Shape(format!(
                    "detail scale {m} has length {}, expected {want}",
                    d.len()
                )));
            }
        }
        Ok(SubbandFrame { coarse, details })
    }

    pub fn zeros(n0: usize, num_scales: usize) -> Result<Self> {
        let details = (0..num_scales).map(|m| vec![0.0; n0 << m]).collect();
        Self::new(vec![0.0; n0], details)
    }

    pub fn n0(&self) -> usize {
        self.coarse.len()
    }

    pub fn num_scales(&self) -> usize {
        self.details.len()
    }

    pub fn coarse(&self) -> &[f64] {
        &self.coarse
    }

    pub fn coarse_mut(&mut self) -> &mut [f64] {
        &mut self.coarse
    }

    /// Detail sequence of relative scale `m` (0 = coarsest).
    pub fn detail(&self, m: usize) -> &[f64] {
        &self.details[m]
    }

    pub fn detail_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.details[m]
    }

    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    /// Number of time-domain samples this frame synthesizes to.
    pub fn block_len(&self) -> usize {
        self.n0() << self.num_scales()
    }

    pub fn energy(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        sq(&self.coarse) + self.details.iter().map(|d| sq(d)).sum::<f64>()
    }
}

fn analysis_into(c_next: &[f64], fp: &FilterPair, c: &mut [f64], x: &mut [f64]) {
    let len = c_next.len();
    let (h, g) = (fp.h(), fp.g());
    for n in 0..len / 2 {
        let mut acc_c = 0.0;
        let mut acc_x = 0.0;
        let mut idx = (2 * n) % len;
        for k in 0..h.len() {
            let v = c_next[idx];
            acc_c += h[k] * v;
            acc_x += g[k] * v;
            idx += 1;
            if idx == len {
                idx = 0;
            }
        }
        c[n] = acc_c;
        x[n] = acc_x;
    }
}

fn synthesis_into(c: &[f64], x: &[f64], fp: &FilterPair, out: &mut [f64]) {
    let len = out.len();
    let (h, g) = (fp.h(), fp.g());
    out.fill(0.0);
    for n in 0..c.len() {
        let (cn, xn) = (c[n], x[n]);
        let mut idx = (2 * n) % len;
        for k in 0..h.len() {
            out[idx] += h[k] * cn + g[k] * xn;
            idx += 1;
            if idx == len {
                idx = 0;
            }
        }
    }
}

/// One analysis level: circular convolution with `h` and `g`, then decimation by 2.
pub fn analysis_step(c_next: &[f64], fp: &FilterPair) -> Result<(Vec<f64>, Vec<f64>)> {
    if c_next.is_empty() || !c_next.len().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "analysis input length {} must be even and non-zero",
            c_next.len()
        )));
    }
    let half = c_next.len() / 2;
    let mut c = vec![0.0; half];
    let mut x = vec![0.0; half];
    analysis_into(c_next, fp, &mut c, &mut x);
    Ok((c, x))
}

/// One synthesis level, the adjoint (and for orthonormal filters the inverse)
/// of [`analysis_step`].
pub fn synthesis_step(c: &[f64], x: &[f64], fp: &FilterPair) -> Result<Vec<f64>> {
    if c.len() != x.len() {
        return Err(Error::Shape(format!(
            "approximation length {} differs from detail length {}",
            c.len(),
            x.len()
        )));
    }
    let mut out = vec![0.0; 2 * c.len()];
    if !c.is_empty() {
        synthesis_into(c, x, fp, &mut out);
    }
    Ok(out)
}

/// Inverse pyramid: coarse branch plus details, coarsest scale first.
pub fn synthesize_pyramid(frame: &SubbandFrame, fp: &FilterPair) -> Result<SampleBlock> {
    let total = frame.block_len();
    let mut current = Vec::with_capacity(total);
    current.extend_from_slice(frame.coarse());
    let mut next = vec![0.0; total];
    for detail in frame.details() {
        let out_len = 2 * current.len();
        synthesis_into(&current, detail, fp, &mut next[..out_len]);
        current.clear();
        current.extend_from_slice(&next[..out_len]);
    }
    Ok(SampleBlock::new(current, frame.num_scales() as i32))
}

/// Forward pyramid of depth `num_scales`, peeling the finest detail first.
pub fn analyze_pyramid(
    block: &SampleBlock,
    num_scales: usize,
    fp: &FilterPair,
) -> Result<SubbandFrame> {
    let len = block.len();
    if num_scales == 0 {
        return Err(Error::Shape("analysis depth must be at least 1".into()));
    }
    if num_scales >= usize::BITS as usize || len == 0 || !len.is_multiple_of(1usize << num_scales) {
        return Err(Error::Shape(format!(
            "block length {len} is not a non-zero multiple of 2^{num_scales}"
        )));
    }

    let mut details: Vec<Vec<f64>> = Vec::with_capacity(num_scales);
    let mut current = block.samples.clone();
    for _ in 0..num_scales {
        let half = current.len() / 2;
        let mut c = vec![0.0; half];
        let mut x = vec![0.0; half];
        analysis_into(&current, fp, &mut c, &mut x);
        details.push(x);
        current = c;
    }
    details.reverse();
    SubbandFrame::new(current, details)
}

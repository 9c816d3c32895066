//! Placement of message symbols into detail scales, and the inverse gather.

use std::fmt;
use std::str::FromStr;

use crate::detector::ObservationSet;
use crate::error::{Error, Result};
use crate::filterbank::SubbandFrame;

/// How message symbols are spread over the detail scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Scale `m` of `M` carries every `2^(M-1-m)`-th symbol; the finest scale
    /// holds the whole message.
    Wm1,
    /// Scale `m` carries the whole message repeated `2^m` times.
    Wm2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Wm1 => "wm1",
            Method::Wm2 => "wm2",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wm1" | "method1" => Ok(Method::Wm1),
            "wm2" | "method2" => Ok(Method::Wm2),
            other => Err(Error::Config(format!(
                "unknown placement method '{other}' (expected wm1 or wm2)"
            ))),
        }
    }
}

/// Binary message with antipodal mapping `1 -> +sqrt(E0)`, `0 -> -sqrt(E0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageBlock {
    bits: Vec<u8>,
    symbol_energy: f64,
}

impl MessageBlock {
    pub fn new(bits: Vec<u8>, symbol_energy: f64) -> Result<Self> {
        if !(symbol_energy > 0.0 && symbol_energy.is_finite()) {
            return Err(Error::Config(format!(
                "symbol energy must be positive and finite, got {symbol_energy}"
            )));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Config(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(MessageBlock {
            bits,
            symbol_energy,
        })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    pub fn symbols(&self) -> impl Iterator<Item = f64> + '_ {
        let amp = self.symbol_energy.sqrt();
        self.bits
            .iter()
            .map(move |&b| if b == 1 { amp } else { -amp })
    }
}

/// Placement method, scale count `M` and coarsest detail length `n0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementSpec {
    pub method: Method,
    pub num_scales: usize,
    pub base_length: usize,
}

impl PlacementSpec {
    /// Derives `n0` from the message length, checking divisibility for WM1.
    pub fn for_message(method: Method, num_scales: usize, message_len: usize) -> Result<Self> {
        if num_scales == 0 || num_scales > 30 {
            return Err(Error::Config(format!(
                "number of scales must be in 1..=30, got {num_scales}"
            )));
        }
        if message_len == 0 {
            return Err(Error::Config(
                "message must contain at least one bit".into(),
            ));
        }
        let base_length = match method {
            Method::Wm1 => {
                let factor = 1usize << (num_scales - 1);
                if !message_len.is_multiple_of(factor) {
                    return Err(Error::Config(format!(
                        "wm1 with {num_scales} scales requires a message length that is a \
                         multiple of {factor}, got {message_len}"
                    )));
                }
                message_len / factor
            }
            Method::Wm2 => message_len,
        };
        Ok(PlacementSpec {
            method,
            num_scales,
            base_length,
        })
    }

    /// Inverse of [`PlacementSpec::for_message`]: the spec whose synthesized
    /// block has `block_len` samples.
    pub fn for_block_len(method: Method, num_scales: usize, block_len: usize) -> Result<Self> {
        if num_scales == 0 || num_scales > 30 {
            return Err(Error::Config(format!(
                "number of scales must be in 1..=30, got {num_scales}"
            )));
        }
        let factor = 1usize << num_scales;
        if block_len == 0 || !block_len.is_multiple_of(factor) {
            return Err(Error::Config(format!(
                "sample count {block_len} is not a non-zero multiple of 2^{num_scales}"
            )));
        }
        let n0 = block_len / factor;
        let message_len = match method {
            Method::Wm1 => n0 << (num_scales - 1),
            Method::Wm2 => n0,
        };
        Self::for_message(method, num_scales, message_len)
    }

    pub fn message_len(&self) -> usize {
        match self.method {
            Method::Wm1 => self.base_length << (self.num_scales - 1),
            Method::Wm2 => self.base_length,
        }
    }

    /// Time-domain samples per synthesized frame.
    pub fn block_len(&self) -> usize {
        self.base_length << self.num_scales
    }

    fn check_frame(&self, frame: &SubbandFrame) -> Result<()> {
        if frame.num_scales() != self.num_scales || frame.n0() != self.base_length {
            return Err(Error::Config(format!(
                "frame with {} scales and n0 = {} does not match placement with {} scales \
                 and n0 = {}",
                frame.num_scales(),
                frame.n0(),
                self.num_scales,
                self.base_length
            )));
        }
        Ok(())
    }
}

/// 2-adic valuation with `v2(0)` saturated at `cap`.
fn two_adic(k: usize, cap: usize) -> usize {
    if k == 0 {
        cap
    } else {
        (k.trailing_zeros() as usize).min(cap)
    }
}

/// WM1 placement: scale `m` holds `a(2^(M-1-m) n)`.
pub fn place_method1(msg: &MessageBlock, num_scales: usize) -> Result<SubbandFrame> {
    let spec = PlacementSpec::for_message(Method::Wm1, num_scales, msg.len())?;
    let symbols: Vec<f64> = msg.symbols().collect();
    let mut frame = SubbandFrame::zeros(spec.base_length, num_scales)?;
    for m in 0..num_scales {
        let stride = 1usize << (num_scales - 1 - m);
        for (n, slot) in frame.detail_mut(m).iter_mut().enumerate() {
            *slot = symbols[n * stride];
        }
    }
    Ok(frame)
}

/// WM2 placement: scale `m` holds `a(n mod L)` for `n < 2^m L`.
pub fn place_method2(msg: &MessageBlock, num_scales: usize) -> Result<SubbandFrame> {
    let spec = PlacementSpec::for_message(Method::Wm2, num_scales, msg.len())?;
    let symbols: Vec<f64> = msg.symbols().collect();
    let mut frame = SubbandFrame::zeros(spec.base_length, num_scales)?;
    for m in 0..num_scales {
        for chunk in frame.detail_mut(m).chunks_exact_mut(symbols.len()) {
            chunk.copy_from_slice(&symbols);
        }
    }
    Ok(frame)
}

pub fn place(msg: &MessageBlock, method: Method, num_scales: usize) -> Result<SubbandFrame> {
    match method {
        Method::Wm1 => place_method1(msg, num_scales),
        Method::Wm2 => place_method2(msg, num_scales),
    }
}

/// Number of frame coefficients that carry symbol `k`.
pub fn copy_count(spec: &PlacementSpec, k: usize) -> usize {
    match spec.method {
        Method::Wm1 => 1 + two_adic(k, spec.num_scales - 1),
        Method::Wm2 => (1usize << spec.num_scales) - 1,
    }
}

/// Collects, per message symbol, every coefficient its placement wrote.
///
/// Copies are listed finest scale first for WM1 and coarsest scale first for
/// WM2.
pub fn gather_observations(
    frame: &SubbandFrame,
    spec: &PlacementSpec,
) -> Result<Vec<ObservationSet>> {
    spec.check_frame(frame)?;
    let big_m = spec.num_scales;
    let len = spec.message_len();
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let mut copies = Vec::with_capacity(copy_count(spec, k));
        match spec.method {
            Method::Wm1 => {
                for m in (0..big_m).rev() {
                    let stride = 1usize << (big_m - 1 - m);
                    if k % stride != 0 {
                        break;
                    }
                    copies.push(frame.detail(m)[k / stride]);
                }
            }
            Method::Wm2 => {
                for m in 0..big_m {
                    let detail = frame.detail(m);
                    copies.extend((0..1usize << m).map(|i| detail[k + i * len]));
                }
            }
        }
        out.push(ObservationSet::new(k, copies)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn msg(bits: &[u8]) -> MessageBlock {
        MessageBlock::new(bits.to_vec(), 4.0).unwrap()
    }

    #[test]
    fn antipodal_map() {
        let m = msg(&[1, 0]);
        assert_eq!(m.symbols().collect::<Vec<_>>(), vec![2.0, -2.0]);
        assert!(MessageBlock::new(vec![2], 1.0).is_err());
        assert!(MessageBlock::new(vec![1], 0.0).is_err());
    }

    #[test]
    fn method1_two_scales() {
        let frame = place_method1(&msg(&[1, 0, 0, 1]), 2).unwrap();
        assert_eq!(frame.detail(1), &[2.0, -2.0, -2.0, 2.0]);
        assert_eq!(frame.detail(0), &[2.0, -2.0]);
        assert_eq!(frame.coarse(), &[0.0, 0.0]);
    }

    #[test]
    fn method1_single_scale_is_verbatim() {
        let frame = place_method1(&msg(&[1, 0, 1]), 1).unwrap();
        assert_eq!(frame.num_scales(), 1);
        assert_eq!(frame.detail(0), &[2.0, -2.0, 2.0]);
    }

    #[test]
    fn method1_three_scales_strides() {
        let bits: Vec<u8> = (0..8).map(|i| (i % 3 == 0) as u8).collect();
        let m = msg(&bits);
        let sym: Vec<f64> = m.symbols().collect();
        let frame = place_method1(&m, 3).unwrap();
        for (scale, stride) in [(2usize, 1usize), (1, 2), (0, 4)] {
            let want: Vec<f64> = (0..8 / stride).map(|n| sym[n * stride]).collect();
            assert_eq!(frame.detail(scale), want.as_slice());
        }
    }

    #[test]
    fn method1_divisibility() {
        let err = place_method1(&msg(&[0; 510]), 6).unwrap_err();
        assert!(err.to_string().contains("multiple of 32"), "{err}");
    }

    #[test]
    fn method2_repetitions() {
        let frame = place_method2(&msg(&[1, 0]), 2).unwrap();
        assert_eq!(frame.detail(0), &[2.0, -2.0]);
        assert_eq!(frame.detail(1), &[2.0, -2.0, 2.0, -2.0]);

        let frame = place_method2(&msg(&[1]), 3).unwrap();
        let total: usize = frame.details().iter().map(Vec::len).sum();
        assert_eq!(total, 7);
        assert!(frame.details().iter().flatten().all(|&v| v == 2.0));
    }

    #[test]
    fn method1_copy_counts() {
        let spec = PlacementSpec::for_message(Method::Wm1, 3, 8).unwrap();
        let frame = place_method1(&msg(&[0; 8]), 3).unwrap();
        let obs = gather_observations(&frame, &spec).unwrap();
        assert_eq!(obs[4].copies().len(), 3);
        assert_eq!(obs[0].copies().len(), 3);
        assert_eq!(obs[2].copies().len(), 2);
        for k in (1..8).step_by(2) {
            assert_eq!(obs[k].copies().len(), 1);
        }
    }

    #[test]
    fn method1_census() {
        let big_m = 6;
        let n = 512;
        let spec = PlacementSpec::for_message(Method::Wm1, big_m, n).unwrap();
        let mut census = vec![0usize; big_m + 1];
        for k in 0..n {
            census[copy_count(&spec, k)] += 1;
        }
        for (c, &count) in census.iter().enumerate().take(big_m).skip(1) {
            assert_eq!(count, n >> c, "copies={c}");
        }
        assert_eq!(census[big_m], n >> (big_m - 1));
    }

    #[test]
    fn method2_sixty_three_copies() {
        let spec = PlacementSpec::for_message(Method::Wm2, 6, 5).unwrap();
        let frame = place_method2(&msg(&[1, 0, 1, 1, 0]), 6).unwrap();
        let obs = gather_observations(&frame, &spec).unwrap();
        assert!(obs.iter().all(|o| o.copies().len() == 63));
        assert_eq!(spec.block_len(), 5 * 64);
    }

    #[test]
    fn gather_rejects_mismatched_frame() {
        let spec = PlacementSpec::for_message(Method::Wm2, 3, 4).unwrap();
        let frame = SubbandFrame::zeros(4, 2).unwrap();
        assert!(matches!(
            gather_observations(&frame, &spec),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn block_len_inverse() {
        for method in [Method::Wm1, Method::Wm2] {
            let spec = PlacementSpec::for_message(method, 6, 512).unwrap();
            let back = PlacementSpec::for_block_len(method, 6, spec.block_len()).unwrap();
            assert_eq!(spec, back);
        }
        assert!(PlacementSpec::for_block_len(Method::Wm1, 6, 100).is_err());
    }

    proptest! {
        #[test]
        fn method2_copy_total(len in 1usize..20, big_m in 1usize..7) {
            let spec = PlacementSpec::for_message(Method::Wm2, big_m, len).unwrap();
            let frame = place_method2(&msg(&vec![1; len]), big_m).unwrap();
            let obs = gather_observations(&frame, &spec).unwrap();
            let total: usize = obs.iter().map(|o| o.copies().len()).sum();
            prop_assert_eq!(total, len * ((1 << big_m) - 1));
            let coeffs: usize = frame.details().iter().map(Vec::len).sum();
            prop_assert_eq!(coeffs, total);
        }

        #[test]
        fn gather_inverts_placement(
            bits in proptest::collection::vec(0u8..=1, 1..5),
            big_m in 1usize..6,
            method in prop_oneof![Just(Method::Wm1), Just(Method::Wm2)],
        ) {
            // Stretch the message so WM1 divisibility holds.
            let reps = 1usize << (big_m - 1);
            let bits: Vec<u8> = bits.iter().flat_map(|&b| std::iter::repeat_n(b, reps)).collect();
            let m = msg(&bits);
            let spec = PlacementSpec::for_message(method, big_m, bits.len()).unwrap();
            let frame = place(&m, method, big_m).unwrap();
            let obs = gather_observations(&frame, &spec).unwrap();
            for (k, o) in obs.iter().enumerate() {
                let want = if bits[k] == 1 { 2.0 } else { -2.0 };
                prop_assert!(o.copies().iter().all(|&c| c == want));
                prop_assert_eq!(o.copies().len(), copy_count(&spec, k));
            }
        }
    }
}

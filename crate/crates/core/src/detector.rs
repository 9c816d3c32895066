//! Equal-gain maximum-likelihood combining.
//!
//! With equiprobable antipodal symbols and i.i.d. Gaussian noise on every copy,
//! the likelihood ratio reduces to the sign of
//! `I = sqrt(E0) / sigma^2 * sum(copies)`.

use crate::error::{Error, Result};
use crate::filterbank::SubbandFrame;
use crate::wm_codec::{gather_observations, PlacementSpec};

/// Every received copy of message symbol `symbol_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    symbol_index: usize,
    copies: Vec<f64>,
}

impl ObservationSet {
    pub fn new(symbol_index: usize, copies: Vec<f64>) -> Result<Self> {
        if copies.is_empty() {
            return Err(Error::Contract(format!(
                "observation set for symbol {symbol_index} has no copies"
            )));
        }
        Ok(ObservationSet {
            symbol_index,
            copies,
        })
    }

    pub fn symbol_index(&self) -> usize {
        self.symbol_index
    }

    pub fn copies(&self) -> &[f64] {
        &self.copies
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub bit: u8,
    pub statistic: f64,
}

impl Decision {
    /// `I > 0` decides 1; ties go to 0.
    pub fn from_statistic(statistic: f64) -> Self {
        Decision {
            bit: (statistic > 0.0) as u8,
            statistic,
        }
    }
}

pub fn ml_decide(obs: &ObservationSet, symbol_energy: f64, sigma2: f64) -> Result<Decision> {
    if symbol_energy.is_nan() || symbol_energy <= 0.0 || sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::Contract(format!(
            "ML decision needs E0 > 0 and sigma^2 > 0, got E0 = {symbol_energy}, \
             sigma^2 = {sigma2}"
        )));
    }
    let sum: f64 = obs.copies.iter().sum();
    Ok(Decision::from_statistic(
        symbol_energy.sqrt() / sigma2 * sum,
    ))
}

/// Gathers each symbol's copies from a demodulated frame and decides it.
pub fn detect_block(
    frame: &SubbandFrame,
    spec: &PlacementSpec,
    symbol_energy: f64,
    sigma2: f64,
) -> Result<Vec<u8>> {
    gather_observations(frame, spec)?
        .iter()
        .map(|obs| ml_decide(obs, symbol_energy, sigma2).map(|d| d.bit))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wm_codec::{place, MessageBlock, Method};
    use proptest::prelude::*;

    fn obs(copies: &[f64]) -> ObservationSet {
        ObservationSet::new(0, copies.to_vec()).unwrap()
    }

    /// Decides by comparing the two Gaussian likelihood products directly.
    fn brute_force_ml(copies: &[f64], e0: f64, sigma2: f64) -> u8 {
        let amp = e0.sqrt();
        let density = |r: f64, mean: f64| {
            (-(r - mean).powi(2) / (2.0 * sigma2)).exp()
                / (2.0 * std::f64::consts::PI * sigma2).sqrt()
        };
        let plus: f64 = copies.iter().map(|&r| density(r, amp)).product();
        let minus: f64 = copies.iter().map(|&r| density(r, -amp)).product();
        (plus > minus) as u8
    }

    #[test]
    fn statistic_and_tie_break() {
        let d = ml_decide(&obs(&[0.3, -0.1]), 1.0, 1.0).unwrap();
        assert!((d.statistic - 0.2).abs() < 1e-15);
        assert_eq!(d.bit, 1);
        assert_eq!(ml_decide(&obs(&[-0.7]), 1.0, 1.0).unwrap().bit, 0);
        let tie = ml_decide(&obs(&[0.4, -0.4]), 1.0, 1.0).unwrap();
        assert_eq!(tie.statistic, 0.0);
        assert_eq!(tie.bit, 0);
    }

    #[test]
    fn contract_errors() {
        assert!(matches!(
            ObservationSet::new(3, vec![]),
            Err(Error::Contract(_))
        ));
        assert!(ml_decide(&obs(&[1.0]), 0.0, 1.0).is_err());
        assert!(ml_decide(&obs(&[1.0]), 1.0, 0.0).is_err());
    }

    #[test]
    fn one_bad_copy_outvoted() {
        // K = 7 copies of +sqrt(E0); one replaced by a value of magnitude
        // just under (K-1) sqrt(E0) with the wrong sign.
        let e0 = 1.0;
        let mut copies = vec![1.0; 7];
        copies[3] = -5.99;
        assert_eq!(ml_decide(&obs(&copies), e0, 1.0).unwrap().bit, 1);
        copies[3] = -6.01;
        assert_eq!(ml_decide(&obs(&copies), e0, 1.0).unwrap().bit, 0);
    }

    #[test]
    fn single_scale_matches_sign_detector() {
        let bits = vec![1, 0, 0, 1, 1, 0, 1, 0];
        let msg = MessageBlock::new(bits, 1.0).unwrap();
        let mut frame = place(&msg, Method::Wm1, 1).unwrap();
        let noise = [0.3, -2.0, 0.5, -1.1, 0.2, 1.7, -0.9, 0.0];
        for (v, n) in frame.detail_mut(0).iter_mut().zip(noise) {
            *v += n;
        }
        let spec = PlacementSpec::for_message(Method::Wm1, 1, 8).unwrap();
        let got = detect_block(&frame, &spec, 1.0, 1.0).unwrap();
        let want: Vec<u8> = frame.detail(0).iter().map(|&v| (v > 0.0) as u8).collect();
        assert_eq!(got, want);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            copies in proptest::collection::vec(-3.0f64..3.0, 1..=12),
            e0 in 0.1f64..4.0,
            sigma2 in 0.2f64..4.0,
        ) {
            let sum: f64 = copies.iter().sum();
            // Skip near-ties where the two routes differ only by rounding.
            prop_assume!(sum.abs() > 1e-9);
            let d = ml_decide(&obs(&copies), e0, sigma2).unwrap();
            prop_assert_eq!(d.bit, brute_force_ml(&copies, e0, sigma2));
        }

        #[test]
        fn invariant_under_common_rescaling(
            copies in proptest::collection::vec(-3.0f64..3.0, 1..20),
            e0 in 0.1f64..4.0,
            sigma2 in 0.1f64..4.0,
            scale in 0.01f64..100.0,
        ) {
            let a = ml_decide(&obs(&copies), e0, sigma2).unwrap();
            let b = ml_decide(&obs(&copies), e0 * scale, sigma2 * scale).unwrap();
            prop_assert_eq!(a.bit, b.bit);
        }

        #[test]
        fn agreeing_copy_never_hurts(
            copies in proptest::collection::vec(-3.0f64..3.0, 1..20),
            extra in 0.0f64..3.0,
        ) {
            let before = ml_decide(&obs(&copies), 1.0, 1.0).unwrap();
            if before.bit == 1 {
                let mut more = copies.clone();
                more.push(extra + f64::MIN_POSITIVE);
                prop_assert_eq!(ml_decide(&obs(&more), 1.0, 1.0).unwrap().bit, 1);
            } else if before.statistic < 0.0 {
                let mut more = copies.clone();
                more.push(-extra);
                prop_assert_eq!(ml_decide(&obs(&more), 1.0, 1.0).unwrap().bit, 0);
            }
        }
    }
}

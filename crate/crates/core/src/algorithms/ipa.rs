//! Interval-prediction algorithm.
//!
//! Items above the interval get `w / (alpha + 1)`; items inside are forwarded
//! to an `alpha`-competitive sub-algorithm running on its own capacity-1
//! knapsack, whose decision is scaled by `alpha / (alpha + 1)`.

use crate::error::{OkpError, Result};
use crate::online::OnlineAlgorithm;
use crate::types::{values_equal, Item};

use super::{admit, Ta};

pub struct Ipa {
    lo: f64,
    hi: f64,
    alpha: f64,
    inner: Box<dyn OnlineAlgorithm>,
    z: f64,
}

impl Ipa {
    /// IPA with the threshold algorithm on `[lo, hi]` as sub-algorithm.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let ta = Ta::new(lo, hi).map_err(|e| OkpError::Config(format!("interval prediction: {e}")))?;
        let alpha = ta.threshold().alpha();
        Ipa::with_inner(lo, hi, alpha, Box::new(ta))
    }

    /// IPA around an arbitrary sub-algorithm with known competitive ratio `alpha`.
    pub fn with_inner(lo: f64, hi: f64, alpha: f64, inner: Box<dyn OnlineAlgorithm>) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(OkpError::Config(format!("interval [{lo}, {hi}] is empty")));
        }
        if alpha.is_nan() || alpha < 1.0 {
            return Err(OkpError::Config(format!("sub-algorithm ratio must be >= 1, got {alpha}")));
        }
        Ok(Ipa { lo, hi, alpha, inner, z: 0.0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn inner_utilization(&self) -> f64 {
        self.inner.utilization()
    }
}

impl OnlineAlgorithm for Ipa {
    fn step(&mut self, item: &Item) -> Result<f64> {
        let below = item.value < self.lo && !values_equal(item.value, self.lo);
        let above = item.value > self.hi && !values_equal(item.value, self.hi);
        let proposed = if below {
            0.0
        } else if above {
            item.weight / (self.alpha + 1.0)
        } else {
            // Snap tolerance-equal endpoints into the sub-algorithm's range.
            let forwarded = Item { value: item.value.clamp(self.lo, self.hi), weight: item.weight };
            self.alpha / (self.alpha + 1.0) * self.inner.step(&forwarded)?
        };
        let x = admit(proposed, item, self.z);
        self.z += x;
        Ok(x)
    }

    fn utilization(&self) -> f64 {
        self.z
    }
}

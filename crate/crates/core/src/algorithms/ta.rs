//! Threshold-based algorithm without predictions.
//!
//! The pseudo-price of capacity is
//! `phi(z) = L` for `z < 1/(1 + ln(U/L))` and `L * exp((1 + ln(U/L)) z - 1)` above.
//! Fractional admission fills capacity until `phi(z') = v`, computed in
//! closed form through `phi^{-1}`.

use crate::error::{OkpError, Result};
use crate::online::OnlineAlgorithm;
use crate::types::{Bounds, Item};

use super::admit;

/// Threshold function over a value range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    lo: f64,
    hi: f64,
    alpha: f64,
}

impl Threshold {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(OkpError::Domain(format!("threshold needs 0 < L <= U, got [{lo}, {hi}]")));
        }
        Ok(Threshold { lo, hi, alpha: 1.0 + (hi / lo).ln() })
    }

    pub fn from_bounds(bounds: Bounds) -> Result<Self> {
        Threshold::new(bounds.lo, bounds.hi)
    }

    /// Competitive ratio `1 + ln(U/L)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Utilization at which the flat segment ends.
    pub fn breakpoint(&self) -> f64 {
        1.0 / self.alpha
    }

    pub fn price(&self, z: f64) -> f64 {
        if z < self.breakpoint() {
            self.lo
        } else {
            self.lo * (self.alpha * z - 1.0).exp()
        }
    }

    /// Largest utilization whose price does not exceed `v` (may exceed 1 for `v > U`).
    /// Returns 0 for `v < L`.
    pub fn inverse(&self, v: f64) -> f64 {
        if v < self.lo {
            0.0
        } else {
            (1.0 + (v / self.lo).ln()) / self.alpha
        }
    }
}

/// `phi(z)` for bounds `[lo, hi]`; rejects `z` outside `[0, 1]` and `lo > hi`.
pub fn ta_threshold(z: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(OkpError::Domain(format!("utilization {z} outside [0, 1]")));
    }
    Ok(Threshold::new(lo, hi)?.price(z))
}

/// `phi^{-1}(v) = (1 + ln(v/L)) / (1 + ln(U/L))` for `v >= L`.
pub fn ta_threshold_inverse(v: f64, lo: f64, hi: f64) -> Result<f64> {
    if v < lo {
        return Err(OkpError::Domain(format!("value {v} below L = {lo}")));
    }
    Ok(Threshold::new(lo, hi)?.inverse(v))
}

#[derive(Debug, Clone)]
pub struct Ta {
    threshold: Threshold,
    z: f64,
}

impl Ta {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Ok(Ta { threshold: Threshold::new(lo, hi)?, z: 0.0 })
    }

    pub fn from_bounds(bounds: Bounds) -> Result<Self> {
        Ok(Ta { threshold: Threshold::from_bounds(bounds)?, z: 0.0 })
    }

    pub fn threshold(&self) -> &Threshold {
        &self.threshold
    }

    /// Starts from a given utilization; used to probe single steps.
    pub fn with_utilization(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn decide(&mut self, item: &Item) -> f64 {
        if item.value < self.threshold.price(self.z) {
            return 0.0;
        }
        let target = self.threshold.inverse(item.value).min(1.0);
        let x = admit(target - self.z, item, self.z);
        self.z += x;
        x
    }
}

impl OnlineAlgorithm for Ta {
    fn step(&mut self, item: &Item) -> Result<f64> {
        Ok(self.decide(item))
    }

    fn utilization(&self) -> f64 {
        self.z
    }
}

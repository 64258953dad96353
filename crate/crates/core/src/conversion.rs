//! Fractional-to-integral conversion by value partitioning.
//!
//! `[L, U]` is cut into multiplicative `(1 + delta)` buckets. For every item,
//! the wrapped fractional machine's admitted value is added to the simulated
//! total `R[j]` of the item's bucket; the whole item is admitted iff the
//! integral total `A[j]` is still below `R[j] (1 - eps (K + 1)) / (1 + delta)`.
//! With every weight at most `eps < 1 / (K + 1)` this never overfills.

use crate::error::{OkpError, Result};
use crate::online::OnlineAlgorithm;
use crate::types::{Bounds, Item, Mode, VALUE_REL_TOL};

/// Buckets `0..=K` over `[L, U]` with `K = ceil(log_{1+delta}(U / L))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuePartition {
    delta: f64,
    bounds: Bounds,
    k: usize,
}

impl ValuePartition {
    pub fn new(delta: f64, bounds: Bounds) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(OkpError::Config(format!("partition delta must be positive, got {delta}")));
        }
        let k = snapped_ceil_log(bounds.hi / bounds.lo, delta);
        Ok(ValuePartition { delta, bounds, k })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Highest bucket index `K`; there are `K + 1` buckets.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bucket_count(&self) -> usize {
        self.k + 1
    }

    /// `ceil(log_{1+delta}(v / L))`, with values within relative 1e-12 of a
    /// boundary `L (1 + delta)^k` assigned to bucket `k`.
    pub fn bucket_index(&self, v: f64) -> Result<usize> {
        if !self.bounds.contains(v) {
            return Err(OkpError::Domain(format!(
                "value {v} outside partition range [{}, {}]",
                self.bounds.lo, self.bounds.hi
            )));
        }
        let ratio = (v / self.bounds.lo).max(1.0);
        Ok(snapped_ceil_log(ratio, self.delta).min(self.k))
    }

    /// Loss factor `(1 + delta) / (1 - eps (K + 1))` inherited by the converted algorithm.
    pub fn slack(&self, epsilon: f64) -> f64 {
        (1.0 + self.delta) / (1.0 - epsilon * self.bucket_count() as f64)
    }
}

fn snapped_ceil_log(ratio: f64, delta: f64) -> usize {
    let exact = ratio.ln() / delta.ln_1p();
    let nearest = exact.round();
    let boundary = (1.0 + delta).powf(nearest);
    if (ratio - boundary).abs() <= VALUE_REL_TOL * ratio {
        nearest.max(0.0) as usize
    } else {
        exact.ceil().max(0.0) as usize
    }
}

pub struct Conv {
    partition: ValuePartition,
    epsilon: f64,
    factor: f64,
    /// Integral admitted value per bucket.
    accepted: Vec<f64>,
    /// Simulated fractional admitted value per bucket.
    simulated: Vec<f64>,
    inner: Box<dyn OnlineAlgorithm>,
    z: f64,
}

impl Conv {
    /// Wraps `inner`; requires `0 < eps < 1 / (K + 1)`.
    pub fn new(partition: ValuePartition, epsilon: f64, inner: Box<dyn OnlineAlgorithm>) -> Result<Self> {
        let buckets = partition.bucket_count();
        if !(epsilon > 0.0 && epsilon * (buckets as f64) < 1.0) {
            return Err(OkpError::Config(format!(
                "epsilon {epsilon} must lie in (0, 1/{buckets}) for K = {}",
                partition.k()
            )));
        }
        Ok(Conv {
            partition,
            epsilon,
            factor: (1.0 - epsilon * buckets as f64) / (1.0 + partition.delta()),
            accepted: vec![0.0; buckets],
            simulated: vec![0.0; buckets],
            inner,
            z: 0.0,
        })
    }

    pub fn partition(&self) -> &ValuePartition {
        &self.partition
    }

    /// `(1 - eps (K + 1)) / (1 + delta)`.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn accepted_values(&self) -> &[f64] {
        &self.accepted
    }

    pub fn simulated_values(&self) -> &[f64] {
        &self.simulated
    }

    pub fn inner_utilization(&self) -> f64 {
        self.inner.utilization()
    }
}

impl OnlineAlgorithm for Conv {
    fn step(&mut self, item: &Item) -> Result<f64> {
        if item.weight > self.epsilon * (1.0 + VALUE_REL_TOL) {
            return Err(OkpError::Data(format!(
                "item weight {} exceeds the small-weight bound {}",
                item.weight, self.epsilon
            )));
        }
        let fractional = self.inner.step(item)?;
        let j = self.partition.bucket_index(item.value)?;
        self.simulated[j] += fractional * item.value;
        if self.accepted[j] < self.simulated[j] * self.factor {
            self.accepted[j] += item.weight * item.value;
            self.z += item.weight;
            Ok(item.weight)
        } else {
            Ok(0.0)
        }
    }

    fn utilization(&self) -> f64 {
        self.z
    }

    fn mode(&self) -> Mode {
        Mode::Integral
    }
}

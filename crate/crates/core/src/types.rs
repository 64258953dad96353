//! Domain types shared by every module.
//!
//! Values are unit values (profit per unit weight); an item's total profit is
//! `value * weight`. The knapsack capacity is always 1.

use std::fmt;

use crate::error::{OkpError, Result};

/// Absolute slack allowed on the capacity constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative tolerance for unit-value equality.
pub const VALUE_REL_TOL: f64 = 1e-12;
/// Absolute floor for unit-value equality.
pub const VALUE_ABS_TOL: f64 = 1e-15;

/// Tolerant unit-value equality used wherever an algorithm branches on `v == v̂`.
pub fn values_equal(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= (VALUE_REL_TOL * scale).max(VALUE_ABS_TOL)
}

/// Three-way comparison of a unit value against a reference with [`values_equal`] ties.
pub fn compare_value(v: f64, reference: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if values_equal(v, reference) {
        Ordering::Equal
    } else if v < reference {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// One online arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub value: f64,
    pub weight: f64,
}

impl Item {
    pub fn new(value: f64, weight: f64) -> Result<Self> {
        let item = Item { value, weight };
        item.validate()?;
        Ok(item)
    }

    pub fn profit(&self) -> f64 {
        self.value * self.weight
    }

    fn validate(&self) -> Result<()> {
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(OkpError::Data(format!("item weight must be positive, got {}", self.weight)));
        }
        if !(self.value.is_finite() && self.value >= 0.0) {
            return Err(OkpError::Data(format!("item value must be non-negative, got {}", self.value)));
        }
        Ok(())
    }
}

/// Known range `[lo, hi]` of unit values (L and U).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(OkpError::Config(format!("invalid value bounds [{lo}, {hi}]")));
        }
        Ok(Bounds { lo, hi })
    }

    /// `true` if `v` lies in `[lo, hi]` up to value-equality tolerance.
    pub fn contains(&self, v: f64) -> bool {
        (v >= self.lo || values_equal(v, self.lo)) && (v <= self.hi || values_equal(v, self.hi))
    }

    pub fn ratio(&self) -> f64 {
        self.hi / self.lo
    }
}

/// An ordered arrival sequence with optional value bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instance {
    items: Vec<Item>,
    bounds: Option<Bounds>,
}

impl Instance {
    /// Builds an instance, checking every item and the bounds invariant.
    pub fn new(items: Vec<Item>, bounds: Option<Bounds>) -> Result<Self> {
        for (i, item) in items.iter().enumerate() {
            item.validate().map_err(|e| OkpError::Data(format!("item {i}: {e}")))?;
            if let Some(b) = bounds {
                if item.value > 0.0 && !b.contains(item.value) {
                    return Err(OkpError::Data(format!(
                        "item {i}: value {} outside bounds [{}, {}]",
                        item.value, b.lo, b.hi
                    )));
                }
            }
        }
        Ok(Instance { items, bounds })
    }

    /// Builds an instance whose bounds are the observed min/max positive values.
    pub fn with_observed_bounds(items: Vec<Item>) -> Result<Self> {
        let bounds = observed_bounds(&items);
        Instance::new(items, bounds)
    }

    pub fn from_pairs(pairs: &[(f64, f64)], bounds: Option<Bounds>) -> Result<Self> {
        let items = pairs.iter().map(|&(value, weight)| Item { value, weight }).collect();
        Instance::new(items, bounds)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn bounds(&self) -> Option<Bounds> {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    /// First `k` arrivals, keeping the bounds.
    pub fn prefix(&self, k: usize) -> Instance {
        Instance { items: self.items[..k.min(self.items.len())].to_vec(), bounds: self.bounds }
    }

    /// Replaces the bounds after re-checking every item against them.
    pub fn with_bounds(self, bounds: Option<Bounds>) -> Result<Self> {
        Instance::new(self.items, bounds)
    }

    /// Appends items from `other`, keeping `self`'s bounds widened to cover both.
    pub fn concat(&self, other: &[Item]) -> Result<Instance> {
        let mut items = self.items.clone();
        items.extend_from_slice(other);
        let bounds = match (self.bounds, observed_bounds(other)) {
            (Some(a), Some(b)) => Some(Bounds::new(a.lo.min(b.lo), a.hi.max(b.hi))?),
            (a, b) => a.or(b),
        };
        Instance::new(items, bounds)
    }
}

pub(crate) fn observed_bounds(items: &[Item]) -> Option<Bounds> {
    let positive = items.iter().map(|it| it.value).filter(|&v| v > 0.0);
    let lo = positive.clone().fold(f64::INFINITY, f64::min);
    let hi = positive.fold(f64::NEG_INFINITY, f64::max);
    (lo.is_finite() && hi.is_finite()).then_some(Bounds { lo, hi })
}

/// Prediction of the critical value; not assumed to be correct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Point(f64),
    Interval { lo: f64, hi: f64 },
}

impl Prediction {
    pub fn point(vhat: f64) -> Result<Self> {
        if !(vhat.is_finite() && vhat >= 0.0) {
            return Err(OkpError::Config(format!("point prediction must be non-negative, got {vhat}")));
        }
        Ok(Prediction::Point(vhat))
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
            return Err(OkpError::Config(format!("invalid interval prediction [{lo}, {hi}]")));
        }
        Ok(Prediction::Interval { lo, hi })
    }

    /// Whether the prediction is correct for a true critical value `vhat`.
    pub fn is_correct_for(&self, vhat: f64) -> bool {
        match *self {
            Prediction::Point(p) => values_equal(p, vhat),
            Prediction::Interval { lo, hi } => {
                (vhat >= lo || values_equal(vhat, lo)) && (vhat <= hi || values_equal(vhat, hi))
            }
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Point(v) => write!(f, "point:{v}"),
            Prediction::Interval { lo, hi } => write!(f, "interval:{lo}:{hi}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fractional,
    Integral,
}

/// Per-item accepted weight plus aggregate profit and utilization.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub decisions: Vec<f64>,
    pub profit: f64,
    pub utilization: f64,
    pub mode: Mode,
}

impl Solution {
    /// Assembles a solution from decisions, computing profit and utilization.
    pub fn from_decisions(instance: &Instance, decisions: Vec<f64>, mode: Mode) -> Self {
        debug_assert_eq!(instance.len(), decisions.len());
        let profit = decisions.iter().zip(instance.items()).map(|(x, it)| x * it.value).sum();
        let utilization = decisions.iter().sum();
        Solution { decisions, profit, utilization, mode }
    }

    /// Checks bounds on each decision, integrality and capacity.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        if self.decisions.len() != instance.len() {
            return Err(OkpError::Infeasible("decision count differs from item count".into()));
        }
        for (i, (&x, it)) in self.decisions.iter().zip(instance.items()).enumerate() {
            if !(x >= -FEASIBILITY_TOL && x <= it.weight + FEASIBILITY_TOL) {
                return Err(OkpError::Infeasible(format!("item {i}: decision {x} outside [0, {}]", it.weight)));
            }
            if self.mode == Mode::Integral && x != 0.0 && x != it.weight {
                return Err(OkpError::Infeasible(format!("item {i}: non-integral decision {x}")));
            }
        }
        if self.utilization > 1.0 + FEASIBILITY_TOL {
            return Err(OkpError::Infeasible(format!("utilization {} exceeds capacity", self.utilization)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_equality_tolerance() {
        assert!(values_equal(1.0, 1.0 + 1e-13));
        assert!(!values_equal(1.0, 1.0 + 1e-10));
        assert!(values_equal(0.0, 1e-16));
        assert!(!values_equal(0.0, 1e-14));
    }

    #[test]
    fn rejects_bad_items() {
        assert!(Item::new(1.0, 0.0).is_err());
        assert!(Item::new(-1.0, 0.5).is_err());
        assert!(Item::new(f64::NAN, 0.5).is_err());
        assert!(Item::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn instance_checks_bounds() {
        let b = Bounds::new(1.0, 10.0).unwrap();
        assert!(Instance::from_pairs(&[(5.0, 0.5)], Some(b)).is_ok());
        assert!(Instance::from_pairs(&[(11.0, 0.5)], Some(b)).is_err());
        assert!(Bounds::new(2.0, 1.0).is_err());
        assert!(Bounds::new(0.0, 1.0).is_err());
    }

    #[test]
    fn observed_bounds_ignore_zero_values() {
        let inst = Instance::with_observed_bounds(vec![
            Item { value: 0.0, weight: 1.0 },
            Item { value: 3.0, weight: 0.1 },
            Item { value: 7.0, weight: 0.1 },
        ])
        .unwrap();
        assert_eq!(inst.bounds(), Some(Bounds { lo: 3.0, hi: 7.0 }));
    }

    #[test]
    fn solution_check_catches_overfill_and_fractional_integral() {
        let inst = Instance::from_pairs(&[(1.0, 0.7), (1.0, 0.7)], None).unwrap();
        let s = Solution::from_decisions(&inst, vec![0.7, 0.7], Mode::Fractional);
        assert!(matches!(s.check(&inst), Err(OkpError::Infeasible(_))));
        let s = Solution::from_decisions(&inst, vec![0.35, 0.0], Mode::Integral);
        assert!(s.check(&inst).is_err());
        let s = Solution::from_decisions(&inst, vec![0.7, 0.0], Mode::Integral);
        assert!(s.check(&inst).is_ok());
    }

    #[test]
    fn interval_prediction_requires_ordered_ends() {
        assert!(Prediction::interval(2.0, 1.0).is_err());
        let p = Prediction::interval(1.0, 2.0).unwrap();
        assert!(p.is_correct_for(1.5));
        assert!(!p.is_correct_for(2.5));
    }
}

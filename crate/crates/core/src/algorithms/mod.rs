//! Fractional online algorithms as step-wise state machines.
//!
//! Every machine owns a virtual knapsack of capacity 1 and reports the weight
//! it admits from each arriving item. Machines never look ahead.

mod ipa;
mod ma;
mod ppa;
mod ppb;
mod ppn;
mod ta;

pub use ipa::Ipa;
pub use ma::Ma;
pub use ppa::Ppa;
pub use ppb::Ppb;
pub use ppn::Ppn;
pub use ta::{ta_threshold, ta_threshold_inverse, Ta, Threshold};

use crate::types::Item;

/// Clamps a proposed admission to `[0, min(w, 1 - z)]`.
///
/// With a correct prediction the update rules never hit this clamp (beyond
/// rounding); with a wrong one it keeps the machine feasible.
pub(crate) fn admit(proposed: f64, item: &Item, utilization: f64) -> f64 {
    let room = (1.0 - utilization).max(0.0);
    proposed.max(0.0).min(item.weight).min(room)
}

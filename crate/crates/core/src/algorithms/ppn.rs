use std::cmp::Ordering;

use crate::error::Result;
use crate::online::OnlineAlgorithm;
use crate::types::{compare_value, Item};

use super::admit;

/// Naive greedy: fully accepts every item at or above the predicted critical
/// value while capacity lasts.
///
/// The strict variant accepts only items strictly above the prediction and is
/// not competitive (it may accept nothing at all).
#[derive(Debug, Clone)]
pub struct Ppn {
    vhat: f64,
    strict: bool,
    z: f64,
}

impl Ppn {
    pub fn new(vhat: f64) -> Self {
        Ppn { vhat, strict: false, z: 0.0 }
    }

    pub fn strict(vhat: f64) -> Self {
        Ppn { vhat, strict: true, z: 0.0 }
    }
}

impl OnlineAlgorithm for Ppn {
    fn step(&mut self, item: &Item) -> Result<f64> {
        let accept = match compare_value(item.value, self.vhat) {
            Ordering::Less => false,
            Ordering::Equal => !self.strict,
            Ordering::Greater => true,
        };
        let x = if accept { admit(item.weight, item, self.z) } else { 0.0 };
        self.z += x;
        Ok(x)
    }

    fn utilization(&self) -> f64 {
        self.z
    }
}

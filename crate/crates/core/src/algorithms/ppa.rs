//! Point-prediction algorithm with prebuying.
//!
//! Items above the prediction are admitted at rate `1 / (1 + omega)`, where
//! `omega` is the weight seen so far at the predicted value (a running lower
//! bound on the true critical weight, capped at 1). Items at the prediction
//! then take `m (1 - s) / (1 + omega')` with `m = min(w, 1 - omega)`, which
//! keeps the cumulative admission at `s = (omega + above) / (1 + omega)`.

use std::cmp::Ordering;

use crate::error::Result;
use crate::online::OnlineAlgorithm;
use crate::types::{compare_value, Item};

use super::admit;

#[derive(Debug, Clone)]
pub struct Ppa {
    vhat: f64,
    omega: f64,
    /// Cumulative admitted weight.
    s: f64,
    /// Weight seen strictly above the prediction.
    above: f64,
}

impl Ppa {
    pub fn new(vhat: f64) -> Self {
        Ppa { vhat, omega: 0.0, s: 0.0, above: 0.0 }
    }

    pub fn vhat(&self) -> f64 {
        self.vhat
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn admitted(&self) -> f64 {
        self.s
    }

    pub fn weight_above(&self) -> f64 {
        self.above
    }

    /// Value `(omega + above) / (1 + omega)` that `admitted()` tracks.
    pub fn expected_admitted(&self) -> f64 {
        (self.omega + self.above) / (1.0 + self.omega)
    }
}

impl OnlineAlgorithm for Ppa {
    fn step(&mut self, item: &Item) -> Result<f64> {
        let proposed = match compare_value(item.value, self.vhat) {
            Ordering::Less => 0.0,
            Ordering::Greater => {
                self.above += item.weight;
                item.weight / (1.0 + self.omega)
            }
            Ordering::Equal => {
                let m = item.weight.min(1.0 - self.omega).max(0.0);
                self.omega += m;
                m / (1.0 + self.omega) - self.s * m / (1.0 + self.omega)
            }
        };
        let x = admit(proposed, item, self.s);
        self.s += x;
        Ok(x)
    }

    fn utilization(&self) -> f64 {
        self.s
    }
}

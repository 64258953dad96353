use std::cmp::Ordering;

use crate::error::Result;
use crate::online::OnlineAlgorithm;
use crate::types::{compare_value, Item};

use super::admit;

/// Basic 2-competitive point-prediction algorithm.
///
/// Half the capacity is reserved for items above the prediction and half for
/// items at the prediction; the latter is metered by the running weight seen at
/// the predicted value.
#[derive(Debug, Clone)]
pub struct Ppb {
    vhat: f64,
    /// Weight seen at the predicted value, capped at 1.
    omega: f64,
    z: f64,
}

impl Ppb {
    pub fn new(vhat: f64) -> Self {
        Ppb { vhat, omega: 0.0, z: 0.0 }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl OnlineAlgorithm for Ppb {
    fn step(&mut self, item: &Item) -> Result<f64> {
        let proposed = match compare_value(item.value, self.vhat) {
            Ordering::Less => 0.0,
            Ordering::Greater => item.weight / 2.0,
            Ordering::Equal => {
                let temp = item.weight.min(1.0 - self.omega).max(0.0);
                self.omega += temp;
                temp / 2.0
            }
        };
        let x = admit(proposed, item, self.z);
        self.z += x;
        Ok(x)
    }

    fn utilization(&self) -> f64 {
        self.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(vhat: f64, items: &[(f64, f64)]) -> Vec<f64> {
        let mut p = Ppb::new(vhat);
        items.iter().map(|&(value, weight)| p.step(&Item { value, weight }).unwrap()).collect()
    }

    #[test]
    fn at_and_above_prediction() {
        assert_eq!(run(1.0, &[(1.0, 0.6), (2.0, 0.5)]), vec![0.3, 0.25]);
    }

    #[test]
    fn total_at_prediction_capped_at_half() {
        let x = run(1.0, &[(1.0, 0.8), (1.0, 0.8)]);
        assert!((x[0] - 0.4).abs() < 1e-15);
        assert!((x[1] - 0.1).abs() < 1e-15);
        assert!((x[0] + x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn below_prediction_rejected() {
        assert_eq!(run(1.0, &[(0.9, 1.0)]), vec![0.0]);
    }
}

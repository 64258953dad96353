use crate::error::{OkpError, Result};
use crate::online::OnlineAlgorithm;
use crate::types::{Bounds, Item};

use super::{admit, Ta};

/// Mixes a prediction-based machine with the robust threshold algorithm:
/// `x = lambda * x_pred + (1 - lambda) * x_robust`.
///
/// Both inner machines run on independent virtual knapsacks.
pub struct Ma {
    lambda: f64,
    prediction: Box<dyn OnlineAlgorithm>,
    robust: Ta,
    z: f64,
}

impl Ma {
    pub fn new(lambda: f64, prediction: Box<dyn OnlineAlgorithm>, bounds: Bounds) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(OkpError::Config(format!("trust parameter must lie in (0, 1), got {lambda}")));
        }
        let robust = Ta::from_bounds(bounds).map_err(|e| OkpError::Config(e.to_string()))?;
        Ok(Ma { lambda, prediction, robust, z: 0.0 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The mixing rule on its own.
    pub fn mix(lambda: f64, x_pred: f64, x_robust: f64) -> f64 {
        lambda * x_pred + (1.0 - lambda) * x_robust
    }
}

impl OnlineAlgorithm for Ma {
    fn step(&mut self, item: &Item) -> Result<f64> {
        let x_pred = self.prediction.step(item)?;
        let x_robust = self.robust.step(item)?;
        let x = admit(Ma::mix(self.lambda, x_pred, x_robust), item, self.z);
        self.z += x;
        Ok(x)
    }

    fn utilization(&self) -> f64 {
        self.z
    }
}

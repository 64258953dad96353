//! Online fractional and integral knapsack with predictions.
//!
//! The library covers the threshold algorithm, the prediction-based
//! algorithms (PP-n, PP-b, PP-a, IPA), the meta-algorithm that mixes a
//! prediction-based machine with the threshold algorithm, the conversion to
//! integral decisions under small weights, offline oracles, instance
//! generators, data ingestion and an experiment harness.

pub mod algorithms;
pub mod conversion;
pub mod csvio;
pub mod error;
pub mod harness;
pub mod ingest;
pub mod instgen;
pub mod offline;
pub mod online;
pub mod rng;
pub mod types;

pub use error::{OkpError, Result};
pub use offline::{critical_value, fractional_opt, integral_opt_bruteforce, CriticalInfo, IntegralMethod};
pub use online::{online_run, run_machine, AlgorithmSpec, MaInner, OnlineAlgorithm};
pub use types::{values_equal, Bounds, Instance, Item, Mode, Prediction, Solution};

//! Seeded synthetic and adversarial instance generators.
//!
//! Every generator is a pure function of its parameters (and seed, where one
//! is taken). Adversarial families follow the lower-bound constructions for
//! point, interval and integral settings.

mod prediction;

pub use prediction::{make_prediction, ErrorModel, PredictionSpec};

use crate::error::{OkpError, Result};
use crate::rng::SplitMix64;
use crate::types::{Bounds, Instance, Item};

/// Parameters of the bounded power-law generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    /// Pareto shape (tail index) of unit values, truncated to `[lo, hi]`.
    pub value_exponent: f64,
    /// Pareto shape of raw weights before normalization.
    pub weight_exponent: f64,
    /// Largest weight after normalization.
    pub weight_scale: f64,
    /// Round values to multiples of this step (kept inside `[lo, hi]`).
    /// `None` keeps continuous values.
    pub value_step: Option<f64>,
    /// Fixed weight for every item instead of Pareto weights.
    pub fixed_weight: Option<f64>,
}

impl Default for PowerLaw {
    fn default() -> Self {
        PowerLaw {
            n: 1000,
            lo: 1.0,
            hi: 1000.0,
            value_exponent: 2.0,
            weight_exponent: 2.0,
            weight_scale: 0.05,
            value_step: Some(1.0),
            fixed_weight: None,
        }
    }
}

impl PowerLaw {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(OkpError::Config(msg));
        if self.n == 0 {
            return bad("power-law generator needs n >= 1".into());
        }
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return bad(format!("power-law bounds need 0 < L < U, got [{}, {}]", self.lo, self.hi));
        }
        if !(self.value_exponent > 1.0 && self.weight_exponent > 1.0) {
            return bad("power-law exponents must exceed 1".into());
        }
        if !(self.weight_scale > 0.0 && self.weight_scale <= 1.0) {
            return bad(format!("weight scale must lie in (0, 1], got {}", self.weight_scale));
        }
        if let Some(step) = self.value_step {
            if !(step > 0.0 && step.is_finite()) {
                return bad(format!("value step must be positive, got {step}"));
            }
        }
        if let Some(w) = self.fixed_weight {
            if !(w > 0.0 && w <= 1.0) {
                return bad(format!("fixed weight must lie in (0, 1], got {w}"));
            }
        }
        Ok(())
    }
}

/// Inverse CDF of the Pareto distribution with shape `a` truncated to `[lo, hi]`.
pub fn bounded_pareto_quantile(u: f64, lo: f64, hi: f64, a: f64) -> f64 {
    let tail = (lo / hi).powf(a);
    let x = lo / (1.0 - u * (1.0 - tail)).powf(1.0 / a);
    x.clamp(lo, hi)
}

/// Power-law instance: bounded-Pareto values on `[L, U]`, Pareto weights
/// rescaled so the largest equals `weight_scale`.
pub fn gen_powerlaw(params: &PowerLaw, seed: u64) -> Result<Instance> {
    params.validate()?;
    let mut rng = SplitMix64::new(seed);
    let mut values = Vec::with_capacity(params.n);
    let mut raw_weights = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let mut v = bounded_pareto_quantile(rng.next_f64(), params.lo, params.hi, params.value_exponent);
        if let Some(step) = params.value_step {
            v = ((v / step).round() * step).clamp(params.lo, params.hi);
        }
        values.push(v);
        let u = rng.next_f64();
        raw_weights.push((1.0 - u).powf(-1.0 / params.weight_exponent));
    }
    let weights: Vec<f64> = match params.fixed_weight {
        Some(w) => vec![w; params.n],
        None => {
            let max = raw_weights.iter().cloned().fold(0.0, f64::max);
            raw_weights.iter().map(|w| w * params.weight_scale / max).collect()
        }
    };
    let items = values.into_iter().zip(weights).map(|(value, weight)| Item { value, weight }).collect();
    Instance::new(items, Some(Bounds::new(params.lo, params.hi)?))
}

/// `I1 = [(1, omega)]`, `I2 = I1 + (U, 1 - eps)`; both have critical value 1.
pub fn gen_thm31_pair(omegahat: f64, upper: f64, epsilon: f64) -> Result<(Instance, Instance)> {
    if !(omegahat > 0.0 && omegahat <= 1.0) {
        return Err(OkpError::Config(format!("omegahat must lie in (0, 1], got {omegahat}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 && upper > 1.0) {
        return Err(OkpError::Config("need 0 < eps < 1 and U > 1".into()));
    }
    let bounds = Some(Bounds::new(1.0, upper)?);
    let first = Instance::from_pairs(&[(1.0, omegahat)], bounds)?;
    let second = Instance::from_pairs(&[(1.0, omegahat), (upper, 1.0 - epsilon)], bounds)?;
    Ok((first, second))
}

/// `x`-continuously non-decreasing instance: batches `i = 1..=N_x` of `m`
/// items with value `L + (i - 1) d` and weight `1/m`, where `d = (U - L)/N`
/// and `N_x = ceil((x - L)/d) + 1`.
pub fn gen_x_nondecreasing(x: f64, lo: f64, hi: f64, batches: usize, per_batch: usize) -> Result<Instance> {
    if !(lo > 0.0 && lo <= x && x <= hi) {
        return Err(OkpError::Config(format!("need 0 < L <= x <= U, got L={lo}, x={x}, U={hi}")));
    }
    if batches == 0 || per_batch == 0 {
        return Err(OkpError::Config("batch counts must be positive".into()));
    }
    let step = (hi - lo) / batches as f64;
    let count = if step == 0.0 {
        1
    } else {
        let r = (x - lo) / step;
        let snapped = if (r - r.round()).abs() < 1e-9 { r.round() } else { r.ceil() };
        snapped as usize + 1
    };
    let weight = 1.0 / per_batch as f64;
    let mut items = Vec::with_capacity(count * per_batch);
    for i in 0..count {
        let value = (lo + i as f64 * step).min(hi);
        items.extend(std::iter::repeat_n(Item { value, weight }, per_batch));
    }
    Instance::new(items, Some(Bounds::new(lo, hi)?))
}

/// Interval lower-bound pair: `I` rises from `lo` to `hi` in `m` batches of
/// `m` items each; `J` appends `(U, 1 - eps)`.
pub fn gen_interval_lb(lo: f64, hi: f64, upper: f64, m: usize, epsilon: f64) -> Result<(Instance, Instance)> {
    if !(lo < hi && hi < upper) {
        return Err(OkpError::Config(format!("need lo < hi < U, got {lo}, {hi}, {upper}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(OkpError::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let rising = gen_x_nondecreasing(hi, lo, hi, m, m)?;
    let appended = rising.concat(&[Item { value: upper, weight: 1.0 - epsilon }])?;
    Ok((rising, appended))
}

/// Prefixes of the three-batch construction.
#[derive(Debug, Clone)]
pub struct ThreeBatch {
    pub first: Instance,
    pub first_two: Instance,
    pub full: Instance,
}

/// Batch 1: `m` items `(L, 1/m)`; batch 2: `m - 1` items `(A L, 1/m)`;
/// batch 3: `2m` items `(B L, 1/m)`.
pub fn gen_three_batch(lo: f64, a: f64, b: f64, upper: f64, m: usize) -> Result<ThreeBatch> {
    if !(1.0 <= a && a < b && b * lo <= upper && lo > 0.0 && m >= 1) {
        return Err(OkpError::Config(format!("need 1 <= A < B, B L <= U, m >= 1 (A={a}, B={b}, L={lo}, U={upper}, m={m})")));
    }
    let w = 1.0 / m as f64;
    let bounds = Some(Bounds::new(lo, upper)?);
    let mut items = vec![Item { value: lo, weight: w }; m];
    let first = Instance::new(items.clone(), bounds)?;
    items.extend(std::iter::repeat_n(Item { value: a * lo, weight: w }, m - 1));
    let first_two = Instance::new(items.clone(), bounds)?;
    items.extend(std::iter::repeat_n(Item { value: b * lo, weight: w }, 2 * m));
    let full = Instance::new(items, bounds)?;
    Ok(ThreeBatch { first, first_two, full })
}

/// Integral lower-bound families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralLb {
    /// Bounded values, arbitrary weights: `[(1, 2k)]` and `[(1, 2k), (U, 1 - k)]`.
    BoundedOnly { kappa: f64, upper: f64 },
    /// Small weights, unbounded values: `1/k` items `(vhat, k)` followed by
    /// items of unit value `c (c + 1)^(j - 1) vhat / k`, `j = 1, 2, ...`.
    SmallWeightOnly { kappa: f64, c: f64, vhat: f64, count: usize },
}

pub fn gen_integral_lb(kind: IntegralLb) -> Result<Vec<Instance>> {
    match kind {
        IntegralLb::BoundedOnly { kappa, upper } => {
            if !(kappa > 0.0 && kappa < 0.25 && upper >= 1.0) {
                return Err(OkpError::Config(format!("bounded-only family needs kappa in (0, 1/4), got {kappa}")));
            }
            let bounds = Some(Bounds::new(1.0, upper)?);
            Ok(vec![
                Instance::from_pairs(&[(1.0, 2.0 * kappa)], bounds)?,
                Instance::from_pairs(&[(1.0, 2.0 * kappa), (upper, 1.0 - kappa)], bounds)?,
            ])
        }
        IntegralLb::SmallWeightOnly { kappa, c, vhat, count } => {
            let n = (1.0 / kappa).round();
            if !(kappa > 0.0 && kappa < 1.0 && (n * kappa - 1.0).abs() < 1e-9) {
                return Err(OkpError::Config(format!("small-weight family needs 1/kappa integral, got kappa = {kappa}")));
            }
            if !(c >= 1.0 && vhat > 0.0 && count >= 1) {
                return Err(OkpError::Config("small-weight family needs c >= 1, vhat > 0, count >= 1".into()));
            }
            let mut items = vec![Item { value: vhat, weight: kappa }; n as usize];
            let mut family = Vec::with_capacity(count);
            family.push(Instance::with_observed_bounds(items.clone())?);
            for j in 1..count {
                let value = c * (c + 1.0).powi(j as i32 - 1) * vhat / kappa;
                items.push(Item { value, weight: kappa });
                family.push(Instance::with_observed_bounds(items.clone())?);
            }
            Ok(family)
        }
    }
}

/// Shuffled instance with a prescribed critical weight `omegahat`.
///
/// The critical value is drawn log-uniformly in `[L (U/L)^0.2, L (U/L)^0.6]`.
/// A quarter of the items sit exactly at it (total weight `omegahat`), a
/// quarter lie strictly above it with total weight in `(1 - omegahat, 1)`, and
/// the rest lie below it with total weight 2.
pub fn gen_omega_family(n: usize, lo: f64, hi: f64, omegahat: f64, seed: u64) -> Result<Instance> {
    if n < 4 {
        return Err(OkpError::Config("omega family needs n >= 4".into()));
    }
    if !(omegahat > 0.0 && omegahat < 1.0) {
        return Err(OkpError::Config(format!("omegahat must lie in (0, 1), got {omegahat}")));
    }
    if !(lo > 0.0 && lo < hi) {
        return Err(OkpError::Config(format!("need 0 < L < U, got [{lo}, {hi}]")));
    }
    let mut rng = SplitMix64::new(seed);
    let span = (hi / lo).ln();
    let vhat = lo * (span * rng.uniform(0.2, 0.6)).exp();

    let n_crit = n / 4;
    let n_above = n / 4;
    let n_below = n - n_crit - n_above;
    let above_total = (1.0 - omegahat) + omegahat * rng.uniform(0.05, 0.95);

    let mut items = Vec::with_capacity(n);
    let mut group = |count: usize, total: f64, rng: &mut SplitMix64, value: &dyn Fn(&mut SplitMix64) -> f64| {
        let raw: Vec<(f64, f64)> = (0..count).map(|_| (value(rng), rng.uniform(0.5, 1.5))).collect();
        let sum: f64 = raw.iter().map(|r| r.1).sum();
        items.extend(raw.into_iter().map(|(v, w)| Item { value: v, weight: w * total / sum }));
    };
    group(n_crit, omegahat, &mut rng, &|_: &mut SplitMix64| vhat);
    group(n_above, above_total, &mut rng, &|r: &mut SplitMix64| {
        let v = bounded_pareto_quantile(r.next_f64(), vhat, hi, 1.5);
        if v > vhat * (1.0 + 1e-9) { v } else { vhat * (1.0 + 1e-6) }
    });
    group(n_below, 2.0, &mut rng, &|r: &mut SplitMix64| r.uniform(lo, vhat * (1.0 - 1e-9)));
    rng.shuffle(&mut items);
    Instance::new(items, Some(Bounds::new(lo, hi)?))
}

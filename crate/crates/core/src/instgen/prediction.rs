use std::fmt;
use std::str::FromStr;

use crate::error::{OkpError, Result};
use crate::offline::critical_value;
use crate::rng::SplitMix64;
use crate::types::{Bounds, Instance, Prediction};

/// What a wrong untrusted prediction looks like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    Point,
    /// Interval of the given width (percent of `U - L`).
    IntervalWidth(f64),
}

/// How to derive a prediction for an instance.
///
/// String forms: `exact`, `point:<v>`, `width:<pct>`, `interval:<lo>:<hi>`,
/// `untrusted:<delta>:point`, `untrusted:<delta>:width:<pct>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionSpec {
    Exact,
    PointFixed(f64),
    IntervalWidth(f64),
    IntervalFixed(f64, f64),
    /// Correct with probability `1 - delta`, otherwise wrong per the error model.
    Untrusted { delta: f64, model: ErrorModel },
}

/// Relative neighbourhood of the true value excluded from wrong point predictions.
const WRONG_POINT_EXCLUSION: f64 = 1e-6;
const MAX_REDRAWS: usize = 10_000;

fn check_pct(pct: f64) -> Result<()> {
    if !(pct > 0.0 && pct <= 100.0) {
        return Err(OkpError::Config(format!("interval width must lie in (0, 100] percent, got {pct}")));
    }
    Ok(())
}

impl PredictionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PredictionSpec::Exact => Ok(()),
            PredictionSpec::PointFixed(v) => Prediction::point(v).map(|_| ()),
            PredictionSpec::IntervalFixed(lo, hi) => Prediction::interval(lo, hi).map(|_| ()),
            PredictionSpec::IntervalWidth(pct) => check_pct(pct),
            PredictionSpec::Untrusted { delta, model } => {
                if !(0.0..=1.0).contains(&delta) {
                    return Err(OkpError::Config(format!("error probability must lie in [0, 1], got {delta}")));
                }
                match model {
                    ErrorModel::Point => Ok(()),
                    ErrorModel::IntervalWidth(pct) => check_pct(pct),
                }
            }
        }
    }
}

fn need_bounds(instance: &Instance) -> Result<Bounds> {
    instance
        .bounds()
        .ok_or_else(|| OkpError::Config("interval and untrusted predictions need instance bounds".into()))
}

/// Random interval of width `pct`% of `[L, U]` containing `v`, inside `[L, U]`.
fn interval_around(v: f64, pct: f64, b: Bounds, rng: &mut SplitMix64) -> Prediction {
    let width = pct / 100.0 * (b.hi - b.lo);
    let v = v.clamp(b.lo, b.hi);
    let lo_min = (v - width).max(b.lo);
    let lo_max = v.min(b.hi - width).max(lo_min);
    let lo = rng.uniform(lo_min, lo_max);
    let hi = (lo + width).min(b.hi).max(v);
    Prediction::Interval { lo: lo.min(v), hi }
}

fn wrong_point(vhat: f64, b: Bounds, rng: &mut SplitMix64) -> Result<Prediction> {
    for _ in 0..MAX_REDRAWS {
        let p = rng.uniform(b.lo, b.hi);
        if (p - vhat).abs() > WRONG_POINT_EXCLUSION * vhat.abs().max(b.lo) {
            return Ok(Prediction::Point(p));
        }
    }
    Err(OkpError::Config(format!("no wrong point prediction available in [{}, {}]", b.lo, b.hi)))
}

fn wrong_interval(vhat: f64, pct: f64, b: Bounds, rng: &mut SplitMix64) -> Result<Prediction> {
    let width = pct / 100.0 * (b.hi - b.lo);
    // Feasible left ends: [L, vhat - width) and (vhat, U - width].
    let left = (vhat - width - b.lo).max(0.0);
    let right = (b.hi - width - vhat.max(b.lo)).max(0.0);
    if left + right <= 0.0 {
        return Err(OkpError::Config(format!("no {pct}% interval in [{}, {}] excludes {vhat}", b.lo, b.hi)));
    }
    for _ in 0..MAX_REDRAWS {
        let t = rng.uniform(0.0, left + right);
        let lo = if t < left { b.lo + t } else { vhat.max(b.lo) + (t - left) };
        let p = Prediction::Interval { lo, hi: lo + width };
        if !p.is_correct_for(vhat) {
            return Ok(p);
        }
    }
    Err(OkpError::Config(format!("could not place a wrong interval around {vhat}")))
}

/// Builds the prediction for `instance`; deterministic in `seed`.
///
/// Interval placements treat a padded critical value of 0 as `L`.
pub fn make_prediction(instance: &Instance, spec: &PredictionSpec, seed: u64) -> Result<Prediction> {
    spec.validate()?;
    if instance.is_empty() {
        return Err(OkpError::Data("cannot derive a prediction for an empty instance".into()));
    }
    let mut rng = SplitMix64::new(seed);
    match *spec {
        PredictionSpec::Exact => Ok(Prediction::Point(critical_value(instance).vhat)),
        PredictionSpec::PointFixed(v) => Prediction::point(v),
        PredictionSpec::IntervalFixed(lo, hi) => Prediction::interval(lo, hi),
        PredictionSpec::IntervalWidth(pct) => {
            let b = need_bounds(instance)?;
            Ok(interval_around(critical_value(instance).vhat, pct, b, &mut rng))
        }
        PredictionSpec::Untrusted { delta, model } => {
            let b = need_bounds(instance)?;
            let vhat = critical_value(instance).vhat;
            let correct = rng.next_f64() >= delta;
            match (model, correct) {
                (ErrorModel::Point, true) => Ok(Prediction::Point(vhat)),
                (ErrorModel::Point, false) => wrong_point(vhat, b, &mut rng),
                (ErrorModel::IntervalWidth(pct), true) => Ok(interval_around(vhat, pct, b, &mut rng)),
                (ErrorModel::IntervalWidth(pct), false) => wrong_interval(vhat, pct, b, &mut rng),
            }
        }
    }
}

impl fmt::Display for PredictionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictionSpec::Exact => write!(f, "exact"),
            PredictionSpec::PointFixed(v) => write!(f, "point:{v}"),
            PredictionSpec::IntervalWidth(p) => write!(f, "width:{p}"),
            PredictionSpec::IntervalFixed(lo, hi) => write!(f, "interval:{lo}:{hi}"),
            PredictionSpec::Untrusted { delta, model: ErrorModel::Point } => write!(f, "untrusted:{delta}:point"),
            PredictionSpec::Untrusted { delta, model: ErrorModel::IntervalWidth(p) } => {
                write!(f, "untrusted:{delta}:width:{p}")
            }
        }
    }
}

impl FromStr for PredictionSpec {
    type Err = OkpError;

    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| {
            x.trim().parse::<f64>().map_err(|_| OkpError::Config(format!("bad number {x:?} in prediction spec {s:?}")))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["exact"] => PredictionSpec::Exact,
            ["point", v] => PredictionSpec::PointFixed(num(v)?),
            ["width", p] => PredictionSpec::IntervalWidth(num(p)?),
            ["interval", lo, hi] => PredictionSpec::IntervalFixed(num(lo)?, num(hi)?),
            ["untrusted", d, "point"] => PredictionSpec::Untrusted { delta: num(d)?, model: ErrorModel::Point },
            ["untrusted", d, "width", p] => {
                PredictionSpec::Untrusted { delta: num(d)?, model: ErrorModel::IntervalWidth(num(p)?) }
            }
            _ => return Err(OkpError::Config(format!("unknown prediction spec {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

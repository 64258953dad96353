//! Instances from external price series and job-duration traces.

use std::io::Read;
use std::path::Path;

use crate::csvio::parse_field;
use crate::error::{OkpError, Result};
use crate::rng::SplitMix64;
use crate::types::{Instance, Item};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    PriceSeries,
    DurationTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSpec {
    pub source: Source,
    pub sample_n: usize,
    pub item_weight: f64,
    /// Durations are multiplied by a uniform draw from this range.
    pub duration_scale_range: (f64, f64),
    /// Durations are multiplied by one factor drawn from this set.
    pub resource_factors: Vec<f64>,
    pub seed: u64,
}

impl IngestSpec {
    pub fn price_series(sample_n: usize, item_weight: f64, seed: u64) -> Self {
        IngestSpec { source: Source::PriceSeries, sample_n, item_weight, seed, ..Self::default() }
    }

    pub fn duration_trace(sample_n: usize, item_weight: f64, seed: u64) -> Self {
        IngestSpec { source: Source::DurationTrace, sample_n, item_weight, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_n == 0 {
            return Err(OkpError::Config("sample size must be at least 1".into()));
        }
        if !(self.item_weight > 0.0 && self.item_weight <= 1.0) {
            return Err(OkpError::Config(format!("item weight must lie in (0, 1], got {}", self.item_weight)));
        }
        let (lo, hi) = self.duration_scale_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(OkpError::Config(format!("bad duration scale range ({lo}, {hi})")));
        }
        if self.resource_factors.is_empty() || self.resource_factors.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
            return Err(OkpError::Config("resource factors must be a non-empty set of positive numbers".into()));
        }
        Ok(())
    }
}

impl Default for IngestSpec {
    fn default() -> Self {
        IngestSpec {
            source: Source::PriceSeries,
            sample_n: 10_000,
            item_weight: 0.001,
            duration_scale_range: (1.0, 250.0),
            resource_factors: vec![0.01, 0.03, 0.05],
            seed: 0,
        }
    }
}

/// Reads one numeric column; rows are numbered from 1 after the header.
fn read_column<R: Read>(input: R, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
    let headers = r.headers()?.clone();
    if headers.is_empty() {
        return Err(OkpError::Data("input file is empty".into()));
    }
    let idx = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(column))
        .ok_or_else(|| OkpError::Data(format!("input CSV lacks a `{column}` column")))?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let v = parse_field(rec.get(idx).unwrap_or(""), column, k + 1)?;
        if !v.is_finite() {
            return Err(OkpError::Data(format!("row {}: non-finite {column}", k + 1)));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(OkpError::Data(format!("no `{column}` rows in input")));
    }
    Ok(out)
}

/// Row indices: without replacement when enough rows exist, else with.
fn sample_rows(rng: &mut SplitMix64, rows: usize, n: usize) -> Vec<usize> {
    if n <= rows {
        rng.sample_without_replacement(rows, n)
    } else {
        (0..n).map(|_| rng.index(rows)).collect()
    }
}

fn finish(items: Vec<Item>) -> Result<Instance> {
    Instance::with_observed_bounds(items)
}

pub fn price_series_from_reader<R: Read>(input: R, spec: &IngestSpec) -> Result<Instance> {
    spec.validate()?;
    let prices = read_column(input, "price")?;
    if let Some((k, p)) = prices.iter().enumerate().find(|(_, p)| **p <= 0.0) {
        return Err(OkpError::Data(format!("row {}: price must be positive, got {p}", k + 1)));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let items = sample_rows(&mut rng, prices.len(), spec.sample_n)
        .into_iter()
        .map(|i| Item::new(prices[i], spec.item_weight))
        .collect::<Result<Vec<_>>>()?;
    finish(items)
}

/// Samples `sample_n` prices as items of weight `item_weight`; bounds are the
/// sampled range.
pub fn load_price_series(path: &Path, spec: &IngestSpec) -> Result<Instance> {
    price_series_from_reader(std::fs::File::open(path)?, spec)
}

pub fn duration_trace_from_reader<R: Read>(input: R, spec: &IngestSpec) -> Result<Instance> {
    spec.validate()?;
    let mut durations = Vec::new();
    for (k, d) in read_column(input, "duration")?.into_iter().enumerate() {
        if d < 0.0 {
            return Err(OkpError::Data(format!("row {}: negative duration {d}", k + 1)));
        }
        if d > 0.0 {
            durations.push(d);
        }
    }
    if durations.is_empty() {
        return Err(OkpError::Data("no positive durations in input".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let (lo, hi) = spec.duration_scale_range;
    let items = sample_rows(&mut rng, durations.len(), spec.sample_n)
        .into_iter()
        .map(|i| {
            let scale = rng.uniform(lo, hi);
            let factor = spec.resource_factors[rng.index(spec.resource_factors.len())];
            Item::new(durations[i] * scale * factor, spec.item_weight)
        })
        .collect::<Result<Vec<_>>>()?;
    finish(items)
}

/// Value of a job is `duration * U(scale range) * factor`; zero durations are
/// skipped.
pub fn load_duration_trace(path: &Path, spec: &IngestSpec) -> Result<Instance> {
    duration_trace_from_reader(std::fs::File::open(path)?, spec)
}

pub fn load(path: &Path, spec: &IngestSpec) -> Result<Instance> {
    match spec.source {
        Source::PriceSeries => load_price_series(path, spec),
        Source::DurationTrace => load_duration_trace(path, spec),
    }
}

//! Experiment grids over (instance, algorithm, prediction), empirical
//! competitive ratios and CDF summaries.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::csvio::load_instance;
use crate::error::{OkpError, Result};
use crate::instgen::{gen_powerlaw, make_prediction, PowerLaw, PredictionSpec};
use crate::offline::{critical_value, fractional_opt};
use crate::online::{online_run, AlgorithmSpec};
use crate::rng::derive_seed;
use crate::types::Instance;

/// `OPT / ALG` with the conventions `0/0 = 1` and `x/0 = +inf`.
pub fn empirical_cr(alg_profit: f64, opt_profit: f64) -> Result<f64> {
    if !(alg_profit >= 0.0 && opt_profit >= 0.0) {
        return Err(OkpError::Domain(format!("profits must be non-negative, got ALG={alg_profit}, OPT={opt_profit}")));
    }
    Ok(if opt_profit == 0.0 {
        1.0
    } else if alg_profit == 0.0 {
        f64::INFINITY
    } else {
        opt_profit / alg_profit
    })
}

/// One cell of a sweep. Failed cells carry `error` and NaN numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance_id: String,
    pub algorithm: String,
    pub prediction: String,
    pub profit: f64,
    pub opt_profit: f64,
    pub ratio: f64,
    pub utilization: f64,
    pub vhat: f64,
    pub omegahat: f64,
    pub error: Option<String>,
}

pub const RUNS_HEADER: [&str; 10] =
    ["instance_id", "algorithm", "prediction", "profit", "opt_profit", "ratio", "utilization", "vhat", "omegahat", "error"];

/// Where sweep instances come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    /// `count` power-law instances; instance `i` uses seed `derive_seed(seed, i)`.
    PowerLaw { params: PowerLaw, count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub instances: InstanceSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub predictions: Vec<PredictionSpec>,
    /// Prediction for instance `i` is drawn with `derive_seed(prediction_seed, i)`.
    pub prediction_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub parallelism: usize,
    pub out_dir: Option<PathBuf>,
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| OkpError::Config(format!("cannot parse `{key}` from {v:?}")))
}

impl SweepConfig {
    /// Parses flat `key = value` lines; lists are comma-separated.
    ///
    /// Keys: `instances` (`powerlaw` or a list of instance CSV paths, relative
    /// paths resolved against `base`), `count`, `n`, `lo`, `hi`,
    /// `value_exponent`, `weight_exponent`, `weight_scale`, `value_step`
    /// (a number or `none`), `seed`, `algorithms`, `predictions`,
    /// `prediction_seed`, `parallelism`, `out`.
    pub fn parse(text: &str, base: &Path) -> Result<SweepConfig> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| OkpError::Config(format!("config line {}: expected key = value", i + 1)))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(OkpError::Config(format!("config key `{}` given twice", k.trim())));
            }
        }
        let mut take = |k: &str| kv.remove(k);

        let seed: u64 = take("seed").map(|v| parse_num("seed", &v)).transpose()?.unwrap_or(0);
        let mut params = PowerLaw::default();
        let count: usize = take("count").map(|v| parse_num("count", &v)).transpose()?.unwrap_or(2000);
        if let Some(v) = take("n") {
            params.n = parse_num("n", &v)?;
        }
        if let Some(v) = take("lo") {
            params.lo = parse_num("lo", &v)?;
        }
        if let Some(v) = take("hi") {
            params.hi = parse_num("hi", &v)?;
        }
        if let Some(v) = take("value_exponent") {
            params.value_exponent = parse_num("value_exponent", &v)?;
        }
        if let Some(v) = take("weight_exponent") {
            params.weight_exponent = parse_num("weight_exponent", &v)?;
        }
        if let Some(v) = take("weight_scale") {
            params.weight_scale = parse_num("weight_scale", &v)?;
        }
        if let Some(v) = take("value_step") {
            params.value_step = if v.eq_ignore_ascii_case("none") { None } else { Some(parse_num("value_step", &v)?) };
        }
        let instances = match take("instances") {
            None => return Err(OkpError::Config("config needs `instances`".into())),
            Some(v) if v == "powerlaw" => InstanceSource::PowerLaw { params, count, seed },
            Some(v) => InstanceSource::Files(split_list(&v).into_iter().map(|p| base.join(p)).collect()),
        };
        let algorithms = split_list(&take("algorithms").unwrap_or_default())
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<AlgorithmSpec>>>()?;
        let predictions = split_list(&take("predictions").unwrap_or_else(|| "exact".into()))
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<PredictionSpec>>>()?;
        let prediction_seed = take("prediction_seed").map(|v| parse_num("prediction_seed", &v)).transpose()?.unwrap_or(seed);
        let parallelism = take("parallelism").map(|v| parse_num("parallelism", &v)).transpose()?.unwrap_or(0);
        let out_dir = take("out").map(|p| base.join(p));
        if let Some(k) = kv.keys().next() {
            return Err(OkpError::Config(format!("unknown config key `{k}`")));
        }
        let config = SweepConfig { instances, algorithms, predictions, prediction_seed, parallelism, out_dir };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<SweepConfig> {
        let text = fs::read_to_string(path)?;
        SweepConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        let no_instances = match &self.instances {
            InstanceSource::Files(f) => f.is_empty(),
            InstanceSource::PowerLaw { count, .. } => *count == 0,
        };
        if no_instances {
            return Err(OkpError::Config("sweep needs at least one instance".into()));
        }
        if self.algorithms.is_empty() {
            return Err(OkpError::Config("sweep needs at least one algorithm".into()));
        }
        if self.predictions.is_empty() {
            return Err(OkpError::Config("sweep needs at least one prediction spec".into()));
        }
        Ok(())
    }

    /// Materializes the instance set as `(id, instance)` pairs in sweep order.
    pub fn instances(&self) -> Result<Vec<(String, Instance)>> {
        match &self.instances {
            InstanceSource::Files(paths) => paths
                .iter()
                .map(|p| Ok((p.display().to_string(), load_instance(p, None)?)))
                .collect(),
            InstanceSource::PowerLaw { params, count, seed } => (0..*count)
                .into_par_iter()
                .map(|i| Ok((format!("powerlaw-{i:05}"), gen_powerlaw(params, derive_seed(*seed, i as u64))?)))
                .collect(),
        }
    }
}

fn error_record(id: &str, alg: &AlgorithmSpec, pred: &PredictionSpec, err: &OkpError) -> RunRecord {
    RunRecord {
        instance_id: id.to_string(),
        algorithm: alg.to_string(),
        prediction: pred.to_string(),
        profit: f64::NAN,
        opt_profit: f64::NAN,
        ratio: f64::NAN,
        utilization: f64::NAN,
        vhat: f64::NAN,
        omegahat: f64::NAN,
        error: Some(err.to_string()),
    }
}

/// All records for one instance, algorithm-major then prediction.
pub fn run_instance(
    id: &str,
    index: usize,
    instance: &Instance,
    algorithms: &[AlgorithmSpec],
    predictions: &[PredictionSpec],
    prediction_seed: u64,
) -> Vec<RunRecord> {
    let crit = critical_value(instance);
    let opt = fractional_opt(instance).profit;
    let seed = derive_seed(prediction_seed, index as u64);
    let preds: Vec<_> = predictions.iter().map(|p| make_prediction(instance, p, seed)).collect();
    let mut out = Vec::with_capacity(algorithms.len() * predictions.len());
    for alg in algorithms {
        for (spec, pred) in predictions.iter().zip(&preds) {
            let result = if alg.uses_prediction() {
                match pred {
                    Ok(p) => online_run(alg, instance, Some(p)),
                    Err(e) => Err(OkpError::Config(e.to_string())),
                }
            } else {
                online_run(alg, instance, None)
            };
            let record = result.and_then(|sol| {
                Ok(RunRecord {
                    instance_id: id.to_string(),
                    algorithm: alg.to_string(),
                    prediction: spec.to_string(),
                    profit: sol.profit,
                    opt_profit: opt,
                    ratio: empirical_cr(sol.profit.max(0.0), opt)?,
                    utilization: sol.utilization,
                    vhat: crit.vhat,
                    omegahat: crit.omegahat,
                    error: None,
                })
            });
            out.push(record.unwrap_or_else(|e| error_record(id, alg, spec, &e)));
        }
    }
    out
}

/// Runs every grid cell over in-memory instances, in parallel across instances.
pub fn run_grid(
    instances: &[(String, Instance)],
    algorithms: &[AlgorithmSpec],
    predictions: &[PredictionSpec],
    prediction_seed: u64,
) -> Vec<RunRecord> {
    instances
        .par_iter()
        .enumerate()
        .map(|(i, (id, inst))| run_instance(id, i, inst, algorithms, predictions, prediction_seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Generates or loads the instances and runs the grid. Output does not depend
/// on `parallelism`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let work = || -> Result<Vec<RunRecord>> {
        let instances = config.instances()?;
        Ok(run_grid(&instances, &config.algorithms, &config.predictions, config.prediction_seed))
    };
    if config.parallelism == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| OkpError::Config(format!("cannot build worker pool: {e}")))?
            .install(work)
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

pub fn write_runs<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in records {
        w.write_record([
            r.instance_id.clone(),
            r.algorithm.clone(),
            r.prediction.clone(),
            fmt_num(r.profit),
            fmt_num(r.opt_profit),
            fmt_num(r.ratio),
            fmt_num(r.utilization),
            fmt_num(r.vhat),
            fmt_num(r.omegahat),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(RUNS_HEADER) {
        return Err(OkpError::Data(format!("unexpected runs header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            let s = &rec[i];
            if s.is_empty() {
                Ok(f64::NAN)
            } else {
                s.parse().map_err(|_| OkpError::Data(format!("row {}: cannot parse {} from {s:?}", k + 1, RUNS_HEADER[i])))
            }
        };
        out.push(RunRecord {
            instance_id: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            prediction: rec[2].to_string(),
            profit: num(3)?,
            opt_profit: num(4)?,
            ratio: num(5)?,
            utilization: num(6)?,
            vhat: num(7)?,
            omegahat: num(8)?,
            error: Some(rec[9].to_string()).filter(|e| !e.is_empty()),
        });
    }
    Ok(out)
}

/// Empirical CDF: ascending distinct ratios with the fraction of samples at or
/// below each. `+inf` sorts last.
pub fn cdf(ratios: &[f64]) -> Result<Vec<(f64, f64)>> {
    if ratios.is_empty() {
        return Err(OkpError::Data("cannot build a CDF from no ratios".into()));
    }
    if ratios.iter().any(|r| r.is_nan()) {
        return Err(OkpError::Data("ratios contain NaN".into()));
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, r) in sorted.iter().enumerate() {
        let frac = (k + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *r => last.1 = frac,
            _ => out.push((*r, frac)),
        }
    }
    Ok(out)
}

/// Per (algorithm, prediction) statistics over successful records.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub algorithm: String,
    pub prediction: String,
    pub runs: usize,
    pub errors: usize,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

/// Groups in first-appearance order.
fn groups(records: &[RunRecord]) -> Vec<((String, String), Vec<&RunRecord>)> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut map: BTreeMap<(String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.algorithm.clone(), r.prediction.clone());
        if !map.contains_key(&key) {
            order.push(key.clone());
        }
        map.entry(key).or_default().push(r);
    }
    order.into_iter().map(|k| {
        let v = map.remove(&k).unwrap_or_default();
        (k, v)
    }).collect()
}

pub fn summarize(records: &[RunRecord]) -> Vec<Summary> {
    groups(records)
        .into_iter()
        .map(|((algorithm, prediction), rs)| {
            let mut ratios: Vec<f64> = rs.iter().filter(|r| r.error.is_none()).map(|r| r.ratio).collect();
            ratios.sort_by(f64::total_cmp);
            let ok = ratios.len();
            let (mean, max, median) = if ok == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (ratios.iter().sum::<f64>() / ok as f64, ratios[ok - 1], ratios[(ok - 1) / 2])
            };
            Summary {
                algorithm,
                prediction,
                runs: rs.len(),
                errors: rs.len() - ok,
                mean_ratio: mean,
                max_ratio: max,
                median_ratio: median,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(out: W, summary: &[Summary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "prediction", "runs", "errors", "mean_ratio", "median_ratio", "max_ratio"])?;
    for s in summary {
        w.write_record([
            s.algorithm.clone(),
            s.prediction.clone(),
            s.runs.to_string(),
            s.errors.to_string(),
            fmt_num(s.mean_ratio),
            fmt_num(s.median_ratio),
            fmt_num(s.max_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CDF rows `algorithm,prediction,ratio,fraction` per group.
pub fn write_cdf<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "prediction", "ratio", "fraction"])?;
    for ((alg, pred), rs) in groups(records) {
        let ratios: Vec<f64> = rs.iter().filter(|r| r.error.is_none()).map(|r| r.ratio).collect();
        if ratios.is_empty() {
            continue;
        }
        for (r, f) in cdf(&ratios)? {
            w.write_record([alg.clone(), pred.clone(), r.to_string(), f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `runs.csv` and `summary.csv` into `dir`.
pub fn write_outputs(dir: &Path, records: &[RunRecord]) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_runs(fs::File::create(dir.join("runs.csv"))?, records)?;
    write_summary(fs::File::create(dir.join("summary.csv"))?, &summarize(records))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert!((empirical_cr(2.75, 3.0).unwrap() - 3.0 / 2.75).abs() < 1e-15);
        assert_eq!(empirical_cr(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_cr(0.0, 5.0).unwrap(), f64::INFINITY);
        assert!(matches!(empirical_cr(-1.0, 5.0), Err(OkpError::Domain(_))));
        assert!(empirical_cr(1.0, -5.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(cdf(&[1.0, 2.0, 2.0, 4.0]).unwrap(), vec![(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]);
        assert_eq!(cdf(&[3.5]).unwrap(), vec![(3.5, 1.0)]);
        let c = cdf(&[f64::INFINITY, 2.0]).unwrap();
        assert_eq!(c, vec![(2.0, 0.5), (f64::INFINITY, 1.0)]);
        assert!(cdf(&[]).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = "instances = powerlaw\ncount = 3 # small\nn = 50\nalgorithms = ta, ppa\npredictions = exact,width:25\nout = res\n";
        let c = SweepConfig::parse(text, Path::new("/tmp")).unwrap();
        assert_eq!(c.algorithms.len(), 2);
        assert_eq!(c.predictions.len(), 2);
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/res")));
        let InstanceSource::PowerLaw { params, count, .. } = &c.instances else { panic!() };
        assert_eq!((params.n, *count), (50, 3));
        assert!(SweepConfig::parse("instances = powerlaw\nbogus = 1\nalgorithms = ta", Path::new(".")).is_err());
        assert!(SweepConfig::parse("instances = powerlaw", Path::new(".")).is_err());
        assert!(SweepConfig::parse("instances = powerlaw\nalgorithms = nope", Path::new(".")).is_err());
    }

    #[test]
    fn grid_cardinality_and_order() {
        let c = SweepConfig::parse(
            "instances = powerlaw\ncount = 2\nn = 40\nalgorithms = ta,ppa,ipa\npredictions = exact,width:25",
            Path::new("."),
        )
        .unwrap();
        let recs = run_sweep(&c).unwrap();
        assert_eq!(recs.len(), 2 * 3 * 2);
        assert_eq!(recs[0].instance_id, "powerlaw-00000");
        assert_eq!((recs[1].algorithm.as_str(), recs[1].prediction.as_str()), ("ta", "width:25"));
        assert_eq!(recs[2].algorithm, "ppa");
        for r in &recs { assert!(r.error.is_none() || r.algorithm == "ppa", "{r:?}"); }
        let mut buf = Vec::new();
        write_runs(&mut buf, &recs).unwrap();
        let back = read_runs(buf.as_slice()).unwrap();
        assert_eq!(back.len(), recs.len());
        assert_eq!(back[0].ratio, recs[0].ratio);
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use okp_core::csvio::{self, Meta};
use okp_core::harness::{self, empirical_cr, SweepConfig};
use okp_core::ingest::{self, IngestSpec, Source};
use okp_core::instgen::{self, IntegralLb, PowerLaw, PredictionSpec};
use okp_core::offline::{critical_value, fractional_opt};
use okp_core::online::{online_run, AlgorithmSpec};
use okp_core::types::{Bounds, Instance};
use okp_core::{OkpError, Result};

#[derive(Parser)]
#[command(name = "okp", version, about = "Online knapsack with predictions: generators, runs and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic or adversarial instance plus a `.meta` sidecar.
    Generate(GenerateArgs),
    /// Build an instance from a price series or a job-duration trace.
    Ingest(IngestArgs),
    /// Run one algorithm on one instance and write the per-item decisions.
    Run(RunArgs),
    /// Run an (instance x algorithm x prediction) grid from a config file.
    Sweep(SweepArgs),
    /// Summaries or CDFs from a sweep output directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Powerlaw,
    Thm31Pair,
    IntervalLb,
    ThreeBatch,
    XNondecreasing,
    IntegralLb,
    OmegaFamily,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Member of a multi-instance family, 1-based; defaults to the last.
    #[arg(long)]
    part: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    lo: f64,
    #[arg(long, default_value_t = 1000.0)]
    hi: f64,
    #[arg(long, default_value_t = 2.0)]
    value_exponent: f64,
    #[arg(long, default_value_t = 2.0)]
    weight_exponent: f64,
    #[arg(long, default_value_t = 0.05)]
    weight_scale: f64,
    /// Round power-law values to multiples of this step; `0` keeps them continuous.
    #[arg(long, default_value_t = 1.0)]
    value_step: f64,
    /// Give every power-law item this weight.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    omegahat: f64,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Upper value bound U for lower-bound constructions.
    #[arg(long)]
    upper: Option<f64>,
    /// Items per batch (and batches, for interval-lb).
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Number of value steps N for x-nondecreasing.
    #[arg(long, default_value_t = 100)]
    batches: usize,
    /// Final value x for x-nondecreasing; defaults to the upper bound.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    /// Integral family: `bounded` or `smallweight`.
    #[arg(long, default_value = "bounded")]
    family: String,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    vhat: f64,
    #[arg(long, default_value_t = 5)]
    count: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Price,
    Trace,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_enum)]
    source: SourceArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.001)]
    weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    scale_lo: f64,
    #[arg(long, default_value_t = 250.0)]
    scale_hi: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.03,0.05")]
    factors: Vec<f64>,
    /// Override the sampled lower bound.
    #[arg(long)]
    lo: Option<f64>,
    /// Override the sampled upper bound.
    #[arg(long)]
    hi: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    alg: String,
    /// Prediction spec (`exact`, `point:v`, `width:pct`, `interval:lo:hi`, `untrusted:...`).
    #[arg(long)]
    pred: Option<String>,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Emit CDF rows instead of the summary table.
    #[arg(long)]
    cdf: bool,
    #[arg(long)]
    out: PathBuf,
}

fn bounds_override(lo: Option<f64>, hi: Option<f64>, inst: &Instance) -> Result<Option<Bounds>> {
    match (lo, hi) {
        (None, None) => Ok(None),
        (lo, hi) => {
            let current = inst.bounds();
            let lo = lo.or(current.map(|b| b.lo)).ok_or_else(|| OkpError::Config("--hi needs --lo".into()))?;
            let hi = hi.or(current.map(|b| b.hi)).ok_or_else(|| OkpError::Config("--lo needs --hi".into()))?;
            Ok(Some(Bounds::new(lo, hi)?))
        }
    }
}

fn pick(mut family: Vec<Instance>, part: Option<usize>) -> Result<Instance> {
    let len = family.len();
    let k = part.unwrap_or(len);
    if k == 0 || k > len {
        return Err(OkpError::Config(format!("--part must lie in 1..={len}")));
    }
    Ok(family.swap_remove(k - 1))
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let upper = a.upper.unwrap_or(a.hi);
    let (name, inst) = match a.kind {
        Kind::Powerlaw => {
            let params = PowerLaw {
                n: a.n,
                lo: a.lo,
                hi: a.hi,
                value_exponent: a.value_exponent,
                weight_exponent: a.weight_exponent,
                weight_scale: a.weight_scale,
                value_step: (a.value_step > 0.0).then_some(a.value_step),
                fixed_weight: a.weight,
            };
            ("powerlaw", instgen::gen_powerlaw(&params, a.seed)?)
        }
        Kind::Thm31Pair => {
            let (i1, i2) = instgen::gen_thm31_pair(a.omegahat, upper, a.epsilon)?;
            ("thm31-pair", pick(vec![i1, i2], a.part)?)
        }
        Kind::IntervalLb => {
            let (i, j) = instgen::gen_interval_lb(a.lo, a.hi, upper, a.m, a.epsilon)?;
            ("interval-lb", pick(vec![i, j], a.part)?)
        }
        Kind::ThreeBatch => {
            let tb = instgen::gen_three_batch(a.lo, a.a, a.b, upper, a.m)?;
            ("three-batch", pick(vec![tb.first, tb.first_two, tb.full], a.part)?)
        }
        Kind::XNondecreasing => {
            ("x-nondecreasing", instgen::gen_x_nondecreasing(a.x.unwrap_or(a.hi), a.lo, a.hi, a.batches, a.m)?)
        }
        Kind::IntegralLb => {
            let kind = match a.family.as_str() {
                "bounded" => IntegralLb::BoundedOnly { kappa: a.kappa, upper },
                "smallweight" => IntegralLb::SmallWeightOnly { kappa: a.kappa, c: a.c, vhat: a.vhat, count: a.count },
                other => return Err(OkpError::Config(format!("unknown integral family {other:?}"))),
            };
            ("integral-lb", pick(instgen::gen_integral_lb(kind)?, a.part)?)
        }
        Kind::OmegaFamily => ("omega-family", instgen::gen_omega_family(a.n, a.lo, a.hi, a.omegahat, a.seed)?),
    };
    let mut params = Vec::new();
    let mut args = std::env::args().skip(2);
    while let Some(arg) = args.next() {
        if arg == "--out" {
            args.next();
        } else if !arg.starts_with("--out=") {
            params.push(arg);
        }
    }
    let params = params.join(" ");
    write_instance_with_meta(&a.out, &inst, name, &params, Some(a.seed))
}

fn write_instance_with_meta(out: &Path, inst: &Instance, kind: &str, params: &str, seed: Option<u64>) -> Result<()> {
    csvio::write_instance(fs::File::create(out)?, inst)?;
    let crit = critical_value(inst);
    let mut meta = Meta::new();
    meta.insert("kind".into(), kind.into());
    meta.insert("params".into(), params.into());
    if let Some(s) = seed {
        meta.insert("seed".into(), s.to_string());
    }
    meta.insert("n".into(), inst.len().to_string());
    meta.insert("vhat".into(), crit.vhat.to_string());
    meta.insert("omegahat".into(), crit.omegahat.to_string());
    meta.insert("opt".into(), crit.opt_profit.to_string());
    if let Some(b) = inst.bounds() {
        meta.insert("lo".into(), b.lo.to_string());
        meta.insert("hi".into(), b.hi.to_string());
    }
    csvio::write_meta(fs::File::create(csvio::meta_path(out))?, &meta)
}

fn ingest_cmd(a: &IngestArgs) -> Result<()> {
    let spec = IngestSpec {
        source: match a.source {
            SourceArg::Price => Source::PriceSeries,
            SourceArg::Trace => Source::DurationTrace,
        },
        sample_n: a.n,
        item_weight: a.weight,
        duration_scale_range: (a.scale_lo, a.scale_hi),
        resource_factors: a.factors.clone(),
        seed: a.seed,
    };
    let inst = ingest::load(&a.input, &spec)?;
    let inst = match bounds_override(a.lo, a.hi, &inst)? {
        Some(b) => inst.with_bounds(Some(b))?,
        None => inst,
    };
    let kind = match a.source {
        SourceArg::Price => "price-series",
        SourceArg::Trace => "duration-trace",
    };
    let params = format!("in={} n={} weight={}", a.input.display(), a.n, a.weight);
    write_instance_with_meta(&a.out, &inst, kind, &params, Some(a.seed))
}

fn run_cmd(a: &RunArgs) -> Result<()> {
    let alg: AlgorithmSpec = a.alg.parse()?;
    let inst = csvio::load_instance(&a.instance, None)?;
    let inst = match bounds_override(a.lo, a.hi, &inst)? {
        Some(b) => inst.with_bounds(Some(b))?,
        None => inst,
    };
    let prediction = match &a.pred {
        Some(p) => Some(instgen::make_prediction(&inst, &p.parse::<PredictionSpec>()?, a.seed)?),
        None => None,
    };
    let sol = online_run(&alg, &inst, prediction.as_ref())?;
    csvio::write_solution(fs::File::create(&a.out)?, &inst, &sol)?;
    let opt = fractional_opt(&inst).profit;
    let pred = prediction.map(|p| p.to_string()).unwrap_or_else(|| "none".into());
    println!(
        "algorithm={alg} prediction={pred} profit={} opt={opt} ratio={} utilization={}",
        sol.profit,
        empirical_cr(sol.profit.max(0.0), opt)?,
        sol.utilization
    );
    Ok(())
}

fn sweep_cmd(a: &SweepArgs) -> Result<()> {
    let mut cfg = SweepConfig::load(&a.config)?;
    if let Some(out) = &a.out {
        cfg.out_dir = Some(out.clone());
    }
    let out = cfg.out_dir.clone().ok_or_else(|| OkpError::Config("sweep needs an output directory (--out or `out`)".into()))?;
    let records = harness::run_sweep(&cfg)?;
    harness::write_outputs(&out, &records)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    println!("{} records ({failed} failed) written to {}", records.len(), out.display());
    Ok(())
}

fn report_cmd(a: &ReportArgs) -> Result<()> {
    let runs = if a.input.is_dir() { a.input.join("runs.csv") } else { a.input.clone() };
    let records = harness::read_runs(fs::File::open(&runs)?)?;
    if records.is_empty() {
        return Err(OkpError::Data(format!("{} holds no records", runs.display())));
    }
    let out = fs::File::create(&a.out)?;
    if a.cdf {
        harness::write_cdf(out, &records)
    } else {
        harness::write_summary(out, &harness::summarize(&records))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Ingest(a) => ingest_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Report(a) => report_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("okp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

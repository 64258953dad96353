//! The online-algorithm contract and the driver that feeds items in order.

use std::fmt;
use std::str::FromStr;

use crate::algorithms::{Ipa, Ma, Ppa, Ppb, Ppn, Ta};
use crate::conversion::{Conv, ValuePartition};
use crate::error::{OkpError, Result};
use crate::types::{Bounds, Instance, Item, Mode, Prediction, Solution, FEASIBILITY_TOL};

/// A step-wise online decision maker over a capacity-1 knapsack.
pub trait OnlineAlgorithm: Send {
    /// Irrevocably decides how much weight of `item` to admit.
    fn step(&mut self, item: &Item) -> Result<f64>;

    /// Weight admitted so far.
    fn utilization(&self) -> f64;

    fn mode(&self) -> Mode {
        Mode::Fractional
    }
}

impl<T: OnlineAlgorithm + ?Sized> OnlineAlgorithm for Box<T> {
    fn step(&mut self, item: &Item) -> Result<f64> {
        (**self).step(item)
    }

    fn utilization(&self) -> f64 {
        (**self).utilization()
    }

    fn mode(&self) -> Mode {
        (**self).mode()
    }
}

/// Feeds `instance` to `machine` one item at a time and assembles the solution.
///
/// Fails with [`OkpError::Infeasible`] as soon as a step overfills the knapsack.
pub fn run_machine(machine: &mut dyn OnlineAlgorithm, instance: &Instance) -> Result<Solution> {
    let mut decisions = Vec::with_capacity(instance.len());
    let mut load = 0.0;
    for (i, item) in instance.items().iter().enumerate() {
        let x = machine.step(item)?;
        load += x;
        if !(x >= 0.0 && x <= item.weight + FEASIBILITY_TOL) || load > 1.0 + FEASIBILITY_TOL {
            return Err(OkpError::Infeasible(format!(
                "step {i}: decision {x} on weight {} brings load to {load}",
                item.weight
            )));
        }
        decisions.push(x);
    }
    let solution = Solution::from_decisions(instance, decisions, machine.mode());
    solution.check(instance)?;
    Ok(solution)
}

/// Builds the algorithm named by `spec` and runs it over `instance`.
pub fn online_run(spec: &AlgorithmSpec, instance: &Instance, prediction: Option<&Prediction>) -> Result<Solution> {
    let mut machine = spec.build(instance.bounds(), prediction)?;
    run_machine(machine.as_mut(), instance)
}

/// Prediction-based machine mixed in by the meta-algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaInner {
    Ppa,
    Ipa,
}

/// Parsed algorithm name with its parameters.
///
/// String forms: `ta`, `ppn`, `ppn-strict`, `ppb`, `ppa`, `ipa`,
/// `ma:<lambda>:<ppa|ipa>`, `conv:<inner>:<delta>:<epsilon>`.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Ta,
    Ppn { strict: bool },
    Ppb,
    Ppa,
    Ipa,
    Ma { lambda: f64, inner: MaInner },
    Conv { inner: Box<AlgorithmSpec>, delta: f64, epsilon: f64 },
}

impl AlgorithmSpec {
    /// Instantiates a fresh machine. Bounds and prediction are checked against
    /// what the algorithm needs.
    pub fn build(&self, bounds: Option<Bounds>, prediction: Option<&Prediction>) -> Result<Box<dyn OnlineAlgorithm>> {
        let need_bounds = || bounds.ok_or_else(|| OkpError::Config(format!("{self} needs value bounds [L, U]")));
        let machine: Box<dyn OnlineAlgorithm> = match self {
            AlgorithmSpec::Ta => Box::new(Ta::from_bounds(need_bounds()?)?),
            AlgorithmSpec::Ppn { strict: false } => Box::new(Ppn::new(self.point(prediction)?)),
            AlgorithmSpec::Ppn { strict: true } => Box::new(Ppn::strict(self.point(prediction)?)),
            AlgorithmSpec::Ppb => Box::new(Ppb::new(self.point(prediction)?)),
            AlgorithmSpec::Ppa => Box::new(Ppa::new(self.point(prediction)?)),
            AlgorithmSpec::Ipa => {
                let (mut lo, mut hi) = self.interval(prediction)?;
                // A critical value of 0 (total weight below capacity) carries no
                // price information; the smallest admissible price is L.
                if let Some(b) = bounds {
                    if lo <= 0.0 {
                        lo = b.lo;
                        hi = hi.max(lo);
                    }
                }
                Box::new(Ipa::new(lo, hi)?)
            }
            AlgorithmSpec::Ma { lambda, inner } => {
                let inner_spec = match inner {
                    MaInner::Ppa => AlgorithmSpec::Ppa,
                    MaInner::Ipa => AlgorithmSpec::Ipa,
                };
                let pred = inner_spec.build(bounds, prediction)?;
                Box::new(Ma::new(*lambda, pred, need_bounds()?)?)
            }
            AlgorithmSpec::Conv { inner, delta, epsilon } => {
                let partition = ValuePartition::new(*delta, need_bounds()?)?;
                Box::new(Conv::new(partition, *epsilon, inner.build(bounds, prediction)?)?)
            }
        };
        Ok(machine)
    }

    /// Whether the algorithm reads a prediction at all.
    pub fn uses_prediction(&self) -> bool {
        match self {
            AlgorithmSpec::Ta => false,
            AlgorithmSpec::Conv { inner, .. } => inner.uses_prediction(),
            _ => true,
        }
    }

    fn point(&self, prediction: Option<&Prediction>) -> Result<f64> {
        match prediction {
            Some(Prediction::Point(v)) => Ok(*v),
            Some(Prediction::Interval { .. }) => {
                Err(OkpError::Config(format!("{self} needs a point prediction, got an interval")))
            }
            None => Err(OkpError::Config(format!("{self} needs a point prediction"))),
        }
    }

    fn interval(&self, prediction: Option<&Prediction>) -> Result<(f64, f64)> {
        match prediction {
            Some(Prediction::Interval { lo, hi }) => Ok((*lo, *hi)),
            // A point is the degenerate interval [v, v].
            Some(Prediction::Point(v)) => Ok((*v, *v)),
            None => Err(OkpError::Config(format!("{self} needs an interval prediction"))),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Ta => write!(f, "ta"),
            AlgorithmSpec::Ppn { strict: false } => write!(f, "ppn"),
            AlgorithmSpec::Ppn { strict: true } => write!(f, "ppn-strict"),
            AlgorithmSpec::Ppb => write!(f, "ppb"),
            AlgorithmSpec::Ppa => write!(f, "ppa"),
            AlgorithmSpec::Ipa => write!(f, "ipa"),
            AlgorithmSpec::Ma { lambda, inner } => {
                let inner = match inner {
                    MaInner::Ppa => "ppa",
                    MaInner::Ipa => "ipa",
                };
                write!(f, "ma:{lambda}:{inner}")
            }
            AlgorithmSpec::Conv { inner, delta, epsilon } => write!(f, "conv:{inner}:{delta}:{epsilon}"),
        }
    }
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| OkpError::Config(format!("cannot parse {what} from {field:?}")))
}

impl FromStr for AlgorithmSpec {
    type Err = OkpError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            ["ta"] => AlgorithmSpec::Ta,
            ["ppn"] => AlgorithmSpec::Ppn { strict: false },
            ["ppn-strict"] => AlgorithmSpec::Ppn { strict: true },
            ["ppb"] => AlgorithmSpec::Ppb,
            ["ppa"] => AlgorithmSpec::Ppa,
            ["ipa"] => AlgorithmSpec::Ipa,
            ["ma", lambda, inner] => {
                let lambda = parse_f64(lambda, "trust parameter")?;
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(OkpError::Config(format!("trust parameter must lie in (0, 1), got {lambda}")));
                }
                let inner = match *inner {
                    "ppa" => MaInner::Ppa,
                    "ipa" => MaInner::Ipa,
                    other => return Err(OkpError::Config(format!("unknown ma inner algorithm {other:?}"))),
                };
                AlgorithmSpec::Ma { lambda, inner }
            }
            ["conv", middle @ .., delta, epsilon] if !middle.is_empty() => {
                let inner: AlgorithmSpec = middle.join(":").parse()?;
                if matches!(inner, AlgorithmSpec::Conv { .. }) {
                    return Err(OkpError::Config("conv cannot wrap another conv".into()));
                }
                AlgorithmSpec::Conv {
                    inner: Box::new(inner),
                    delta: parse_f64(delta, "delta")?,
                    epsilon: parse_f64(epsilon, "epsilon")?,
                }
            }
            _ => return Err(OkpError::Config(format!("unknown algorithm spec {s:?}"))),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings_round_trip() {
        for s in ["ta", "ppn", "ppn-strict", "ppb", "ppa", "ipa", "ma:0.5:ppa", "ma:0.3:ipa", "conv:ppa:0.05:0.001", "conv:ma:0.9:ipa:0.1:0.002"] {
            let spec: AlgorithmSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn bad_specs_rejected() {
        for s in ["", "tta", "ma:1.5:ppa", "ma:0.5:ta", "conv:ppa:0.05", "conv:conv:ppa:1:1:1:1", "ma:x:ppa"] {
            assert!(matches!(s.parse::<AlgorithmSpec>(), Err(OkpError::Config(_))), "{s}");
        }
    }

    #[test]
    fn missing_prediction_is_config_error() {
        let inst = Instance::from_pairs(&[(1.0, 0.5)], Some(Bounds::new(1.0, 2.0).unwrap())).unwrap();
        assert!(matches!(online_run(&AlgorithmSpec::Ppa, &inst, None), Err(OkpError::Config(_))));
        let interval = Prediction::interval(1.0, 2.0).unwrap();
        assert!(matches!(online_run(&AlgorithmSpec::Ppb, &inst, Some(&interval)), Err(OkpError::Config(_))));
    }

    #[test]
    fn missing_bounds_is_config_error() {
        let inst = Instance::from_pairs(&[(1.0, 0.5)], None).unwrap();
        assert!(matches!(online_run(&AlgorithmSpec::Ta, &inst, None), Err(OkpError::Config(_))));
        let spec: AlgorithmSpec = "ma:0.5:ppa".parse().unwrap();
        let p = Prediction::Point(1.0);
        assert!(matches!(online_run(&spec, &inst, Some(&p)), Err(OkpError::Config(_))));
    }

    struct Greedy(f64);

    impl OnlineAlgorithm for Greedy {
        fn step(&mut self, item: &Item) -> Result<f64> {
            self.0 += item.weight;
            Ok(item.weight)
        }

        fn utilization(&self) -> f64 {
            self.0
        }
    }

    #[test]
    fn driver_flags_overfilling_machine() {
        let inst = Instance::from_pairs(&[(1.0, 0.7), (1.0, 0.7)], None).unwrap();
        let err = run_machine(&mut Greedy(0.0), &inst).unwrap_err();
        assert!(matches!(err, OkpError::Infeasible(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::default();
        let s = online_run(&AlgorithmSpec::Ppa, &inst, Some(&Prediction::Point(1.0))).unwrap();
        assert_eq!((s.profit, s.utilization), (0.0, 0.0));
    }
}

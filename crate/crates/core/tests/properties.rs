use okp_core::algorithms::{Ppa, Ta};
use okp_core::conversion::{Conv, ValuePartition};
use okp_core::harness::{cdf, empirical_cr};
use okp_core::offline::{critical_value, fractional_opt, integral_opt_bruteforce, IntegralMethod};
use okp_core::online::{online_run, run_machine, AlgorithmSpec, MaInner, OnlineAlgorithm};
use okp_core::types::{values_equal, Bounds, Instance, Item, Mode, Prediction, FEASIBILITY_TOL};
use proptest::prelude::*;

const LO: f64 = 1.0;
const HI: f64 = 100.0;

fn bounds() -> Bounds {
    Bounds::new(LO, HI).unwrap()
}

/// Values on a coarse grid so ties with the critical value are common.
fn item() -> impl Strategy<Value = Item> {
    (prop_oneof![(1u32..=20).prop_map(|k| k as f64 * 5.0 - 4.0), LO..=HI], 0.001f64..0.6)
        .prop_map(|(value, weight)| Item { value, weight })
}

fn instance(max_len: usize) -> impl Strategy<Value = Instance> {
    prop::collection::vec(item(), 0..max_len).prop_map(|items| Instance::new(items, Some(bounds())).unwrap())
}

fn small_weight_instance() -> impl Strategy<Value = Instance> {
    prop::collection::vec(((1u32..=40).prop_map(|k| k as f64 * 2.5 - 1.5), 1e-4f64..=1e-3), 1..1500).prop_map(|v| {
        let items = v.into_iter().map(|(value, weight)| Item { value, weight }).collect();
        Instance::new(items, Some(bounds())).unwrap()
    })
}

fn prediction() -> impl Strategy<Value = Prediction> {
    prop_oneof![
        (LO..=HI).prop_map(Prediction::Point),
        (LO..=HI, 0.0f64..=1.0).prop_map(|(a, t)| Prediction::Interval { lo: a, hi: a + t * (HI - a) }),
    ]
}

fn all_specs() -> Vec<AlgorithmSpec> {
    ["ta", "ppn", "ppn-strict", "ppb", "ppa", "ipa", "ma:0.3:ppa", "ma:0.7:ipa"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn point_of(p: &Prediction) -> Prediction {
    match *p {
        Prediction::Point(v) => Prediction::Point(v),
        Prediction::Interval { lo, hi } => Prediction::Point(0.5 * (lo + hi)),
    }
}

fn pred_for(spec: &AlgorithmSpec, p: &Prediction) -> Prediction {
    match spec {
        AlgorithmSpec::Ipa | AlgorithmSpec::Ma { inner: MaInner::Ipa, .. } => *p,
        _ => point_of(p),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_algorithm_stays_feasible(inst in instance(40), p in prediction()) {
        for spec in all_specs() {
            let sol = online_run(&spec, &inst, Some(&pred_for(&spec, &p))).unwrap();
            prop_assert!(sol.utilization <= 1.0 + FEASIBILITY_TOL, "{spec}: {}", sol.utilization);
            for (x, it) in sol.decisions.iter().zip(inst.items()) {
                prop_assert!(*x >= 0.0 && *x <= it.weight + FEASIBILITY_TOL);
            }
        }
    }

    #[test]
    fn prefix_runs_match_full_run(inst in instance(30), p in prediction(), k in 0usize..30) {
        let k = k.min(inst.len());
        for spec in all_specs() {
            let pred = pred_for(&spec, &p);
            let full = online_run(&spec, &inst, Some(&pred)).unwrap();
            let part = online_run(&spec, &inst.prefix(k), Some(&pred)).unwrap();
            prop_assert_eq!(&full.decisions[..k], &part.decisions[..]);
        }
    }

    #[test]
    fn runs_are_deterministic(inst in instance(30), p in prediction()) {
        for spec in all_specs() {
            let pred = pred_for(&spec, &p);
            prop_assert_eq!(online_run(&spec, &inst, Some(&pred)).unwrap(), online_run(&spec, &inst, Some(&pred)).unwrap());
        }
    }

    #[test]
    fn opt_ignores_arrival_order(inst in instance(30), seed in any::<u64>()) {
        let mut items = inst.items().to_vec();
        let mut rng = okp_core::rng::SplitMix64::new(seed);
        rng.shuffle(&mut items);
        let shuffled = Instance::new(items, inst.bounds()).unwrap();
        let (a, b) = (critical_value(&inst), critical_value(&shuffled));
        prop_assert!((a.opt_profit - b.opt_profit).abs() <= 1e-9 * a.opt_profit.max(1.0));
        prop_assert_eq!(a.vhat, b.vhat);
        prop_assert!((a.omegahat - b.omegahat).abs() <= 1e-12);
    }

    #[test]
    fn critical_value_definition(inst in instance(30)) {
        let c = critical_value(&inst);
        let above: f64 = inst.items().iter().filter(|i| i.value > c.vhat && !values_equal(i.value, c.vhat)).map(|i| i.weight).sum();
        prop_assert!(above < 1.0);
        if inst.total_weight() >= 1.0 {
            prop_assert!(above + c.omegahat >= 1.0 - 1e-12);
        } else {
            prop_assert_eq!(c.vhat, 0.0);
        }
        let opt = fractional_opt(&inst);
        prop_assert!((opt.profit - c.opt_profit).abs() <= 1e-9 * c.opt_profit.max(1.0));
        prop_assert!(opt.utilization <= 1.0 + FEASIBILITY_TOL);
    }

    #[test]
    fn fractional_dominates_integral(inst in instance(12)) {
        let frac = fractional_opt(&inst).profit;
        let en = integral_opt_bruteforce(&inst, IntegralMethod::Enumerate).unwrap();
        prop_assert!(en <= frac + 1e-9);
    }

    #[test]
    fn grid_dp_matches_enumeration_on_grid(ws in prop::collection::vec((1u32..=16, LO..=HI), 0..12)) {
        let items: Vec<Item> = ws.into_iter().map(|(k, value)| Item { value, weight: k as f64 / 16.0 }).collect();
        let inst = Instance::new(items, Some(bounds())).unwrap();
        let en = integral_opt_bruteforce(&inst, IntegralMethod::Enumerate).unwrap();
        let dp = integral_opt_bruteforce(&inst, IntegralMethod::Grid { denominator: 16 }).unwrap();
        prop_assert!((en - dp).abs() <= 1e-9 * en.max(1.0));
    }

    #[test]
    fn trusted_bounds_hold(inst in instance(40)) {
        let c = critical_value(&inst);
        let opt = c.opt_profit;
        let point = Prediction::Point(c.vhat);
        let ratio = |spec: &str, p: Option<&Prediction>| {
            empirical_cr(online_run(&spec.parse().unwrap(), &inst, p).unwrap().profit.max(0.0), opt).unwrap()
        };
        prop_assert!(ratio("ta", None) <= 1.0 + (HI / LO).ln() + 1e-6);
        prop_assert!(ratio("ppb", Some(&point)) <= 2.0 + 1e-6);
        prop_assert!(ratio("ppa", Some(&point)) <= 1.0 + c.omegahat.min(1.0) + 1e-6);
        let interval = Prediction::Interval { lo: c.vhat.max(LO), hi: (c.vhat.max(LO) * 3.0).min(HI) };
        if let Prediction::Interval { lo, hi } = interval {
            if c.vhat >= LO {
                prop_assert!(ratio("ipa", Some(&interval)) <= 2.0 + (hi / lo).ln() + 1e-6);
            }
        }
    }

    #[test]
    fn ppa_admitted_weight_invariant(inst in instance(40)) {
        let vhat = critical_value(&inst).vhat;
        let mut ppa = Ppa::new(vhat);
        for it in inst.items() {
            ppa.step(it).unwrap();
            prop_assert!((ppa.admitted() - ppa.expected_admitted()).abs() <= 1e-9);
            prop_assert!(ppa.omega() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn utilization_never_decreases(inst in instance(40), p in prediction()) {
        for spec in all_specs() {
            let mut m = spec.build(inst.bounds(), Some(&pred_for(&spec, &p))).unwrap();
            let mut last = 0.0;
            for it in inst.items() {
                m.step(it).unwrap();
                prop_assert!(m.utilization() >= last);
                last = m.utilization();
            }
        }
    }

    #[test]
    fn cdf_is_a_distribution(xs in prop::collection::vec(prop_oneof![1.0f64..50.0, Just(f64::INFINITY), Just(2.0)], 1..60)) {
        let c = cdf(&xs).unwrap();
        prop_assert_eq!(c.last().unwrap().1, 1.0);
        for w in c.windows(2) {
            prop_assert!(w[0].0 < w[1].0 || (w[0].0.is_infinite() && w[1].0.is_infinite()));
            prop_assert!(w[0].1 < w[1].1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conv_tracks_simulated_value(inst in small_weight_instance(), which in 0usize..2) {
        let (delta, eps) = (0.1, 1e-3);
        let partition = ValuePartition::new(delta, bounds()).unwrap();
        let inner: Box<dyn OnlineAlgorithm> = if which == 0 {
            Box::new(Ppa::new(critical_value(&inst).vhat))
        } else {
            Box::new(Ta::from_bounds(bounds()).unwrap())
        };
        let mut conv = Conv::new(partition, eps, inner).unwrap();
        let f = conv.factor();
        let mut inner_profit = 0.0;
        let mut profit = 0.0;
        for it in inst.items() {
            let before: f64 = conv.simulated_values().iter().sum();
            let x = conv.step(it).unwrap();
            prop_assert!(x == 0.0 || x == it.weight);
            profit += x * it.value;
            inner_profit += conv.simulated_values().iter().sum::<f64>() - before;
            let j = conv.partition().bucket_index(it.value).unwrap();
            let (a, r) = (conv.accepted_values()[j], conv.simulated_values()[j]);
            prop_assert!(a >= f * r - 1e-9, "bucket {j}: A={a} < f R={}", f * r);
            prop_assert!(a <= f * r + eps * it.value + 1e-9);
        }
        prop_assert!(conv.utilization() <= 1.0 + FEASIBILITY_TOL);
        prop_assert!(profit >= f * inner_profit - 1e-9);
    }

    #[test]
    fn conv_inherits_ppa_ratio(inst in small_weight_instance()) {
        let (delta, eps) = (0.1, 1e-3);
        let spec = AlgorithmSpec::Conv { inner: Box::new(AlgorithmSpec::Ppa), delta, epsilon: eps };
        let c = critical_value(&inst);
        let sol = online_run(&spec, &inst, Some(&Prediction::Point(c.vhat))).unwrap();
        prop_assert_eq!(sol.mode, Mode::Integral);
        let slack = ValuePartition::new(delta, bounds()).unwrap().slack(eps);
        let r = empirical_cr(sol.profit, c.opt_profit).unwrap();
        prop_assert!(r <= (1.0 + c.omegahat.min(1.0)) * slack + 1e-6, "ratio {r}");
    }
}

#[test]
fn overweight_item_rejected_by_conv() {
    let spec = AlgorithmSpec::Conv { inner: Box::new(AlgorithmSpec::Ta), delta: 0.1, epsilon: 1e-3 };
    let inst = Instance::from_pairs(&[(5.0, 0.01)], Some(bounds())).unwrap();
    let mut m = spec.build(inst.bounds(), None).unwrap();
    assert!(run_machine(m.as_mut(), &inst).is_err());
}

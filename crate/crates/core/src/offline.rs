//! Offline ground truth: greedy fractional optimum, critical value and an
//! exact integral optimum for small instances.

use crate::error::{OkpError, Result};
use crate::types::{values_equal, Instance, Item, Mode, Solution, FEASIBILITY_TOL};

/// Critical value of an instance and the weight sitting exactly at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalInfo {
    pub vhat: f64,
    /// Total weight at `vhat`, uncapped. Consumers use `min(1, omegahat)`.
    pub omegahat: f64,
    pub opt_profit: f64,
}

/// Indices sorted by descending value, ties by arrival order.
fn descending_order(items: &[Item]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[b].value.total_cmp(&items[a].value).then(a.cmp(&b)));
    order
}

/// Greedy fill by descending unit value; the boundary item is taken fractionally.
pub fn fractional_opt(instance: &Instance) -> Solution {
    let items = instance.items();
    let mut decisions = vec![0.0; items.len()];
    let mut room = 1.0;
    for i in descending_order(items) {
        if room <= 0.0 {
            break;
        }
        let x = items[i].weight.min(room);
        decisions[i] = x;
        room -= x;
    }
    Solution::from_decisions(instance, decisions, Mode::Fractional)
}

/// `vhat = min { v_i : sum_{v_j > v_i} w_j < 1 }` over the instance padded with
/// an auxiliary `(0, 1)` item when the total weight is below 1.
pub fn critical_value(instance: &Instance) -> CriticalInfo {
    let opt_profit = fractional_opt(instance).profit;
    let mut items: Vec<Item> = instance.items().to_vec();
    if instance.total_weight() < 1.0 {
        items.push(Item { value: 0.0, weight: 1.0 });
    }
    let order = descending_order(&items);

    let mut above = 0.0;
    let mut best = CriticalInfo { vhat: 0.0, omegahat: 0.0, opt_profit };
    let mut idx = 0;
    while idx < order.len() && above < 1.0 {
        let v = items[order[idx]].value;
        let mut group = 0.0;
        while idx < order.len() && values_equal(items[order[idx]].value, v) {
            group += items[order[idx]].weight;
            idx += 1;
        }
        best.vhat = v;
        best.omegahat = group;
        above += group;
    }
    best
}

/// Method for [`integral_opt_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    /// Depth-first enumeration of all feasible subsets; at most 30 items.
    Enumerate,
    /// 0/1 knapsack DP over weights that are integer multiples of `1 / denominator`.
    Grid { denominator: u32 },
}

pub const ENUMERATION_LIMIT: usize = 30;
pub const GRID_LIMIT: u32 = 1_000_000;

/// Exact 0/1 optimum under `sum x_i <= 1`.
pub fn integral_opt_bruteforce(instance: &Instance, method: IntegralMethod) -> Result<f64> {
    match method {
        IntegralMethod::Enumerate => {
            if instance.len() > ENUMERATION_LIMIT {
                return Err(OkpError::Config(format!(
                    "subset enumeration limited to {ENUMERATION_LIMIT} items, got {}",
                    instance.len()
                )));
            }
            let items = instance.items();
            let mut best = 0.0;
            enumerate(items, 0, 0.0, 0.0, &mut best);
            Ok(best)
        }
        IntegralMethod::Grid { denominator } => grid_dp(instance.items(), denominator),
    }
}

fn enumerate(items: &[Item], i: usize, weight: f64, profit: f64, best: &mut f64) {
    if i == items.len() {
        if profit > *best {
            *best = profit;
        }
        return;
    }
    let item = items[i];
    if weight + item.weight <= 1.0 + FEASIBILITY_TOL {
        enumerate(items, i + 1, weight + item.weight, profit + item.profit(), best);
    }
    enumerate(items, i + 1, weight, profit, best);
}

fn grid_dp(items: &[Item], denominator: u32) -> Result<f64> {
    if denominator == 0 || denominator > GRID_LIMIT {
        return Err(OkpError::Config(format!("grid denominator must lie in 1..={GRID_LIMIT}")));
    }
    let d = denominator as f64;
    let cap = denominator as usize;
    let mut best = vec![0.0f64; cap + 1];
    for (i, item) in items.iter().enumerate() {
        let units = (item.weight * d).round();
        if ((units / d) - item.weight).abs() > 1e-9 {
            return Err(OkpError::Data(format!("item {i}: weight {} is not on the 1/{denominator} grid", item.weight)));
        }
        let units = units as usize;
        if units > cap {
            continue;
        }
        for c in (units..=cap).rev() {
            let cand = best[c - units] + item.profit();
            if cand > best[c] {
                best[c] = cand;
            }
        }
    }
    Ok(best[cap])
}

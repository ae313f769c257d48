//! Brute-force reference implementations over plain `BTreeSet`s.
//!
//! Nothing here calls into the library beyond converting its inputs.

use std::collections::BTreeSet;

pub type Steps = Vec<BTreeSet<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleWindow {
    pub t: usize,
    pub occurs: bool,
    pub coinst: bool,
}

fn window_occurs(trace: &Steps, k: usize, from: usize, to: usize) -> bool {
    (0..k).all(|i| (from..=to).any(|u| trace[u].contains(&i)))
}

fn window_coinst(trace: &Steps, k: usize, from: usize, to: usize) -> bool {
    (from..=to).any(|u| (0..k).all(|i| trace[u].contains(&i)))
}

/// Triple loop over layer times, steps and ingredients.
pub fn oracle_persistence(
    trace: &Steps,
    k: usize,
    delta: usize,
    stride: usize,
    eval: &[usize],
) -> (f64, f64, Vec<OracleWindow>) {
    let mut per_window = Vec::new();
    for &t in eval {
        let from = stride * t;
        let to = from + delta;
        assert!(to < trace.len(), "oracle given an out-of-range window");
        per_window.push(OracleWindow {
            t,
            occurs: window_occurs(trace, k, from, to),
            coinst: window_coinst(trace, k, from, to),
        });
    }
    let n = per_window.len() as f64;
    let weak = per_window.iter().filter(|w| w.occurs).count() as f64 / n;
    let strong = per_window.iter().filter(|w| w.coinst).count() as f64 / n;
    (weak, strong, per_window)
}

/// Every `t` whose window fits.
pub fn oracle_all_valid(len: usize, delta: usize, stride: usize) -> Vec<usize> {
    (0..).take_while(|t| stride * t + delta < len).collect()
}

/// Linear scan over horizons `0..=min(horizon_max, last)`; `None` is unbounded.
pub fn oracle_minimal_horizons(
    trace: &Steps,
    k: usize,
    stride: usize,
    t: usize,
    horizon_max: usize,
) -> (Option<usize>, Option<usize>) {
    let from = stride * t;
    let last = trace.len() - 1 - from;
    let mut weak = None;
    let mut strong = None;
    for h in 0..=horizon_max.min(last) {
        if weak.is_none() && window_occurs(trace, k, from, from + h) {
            weak = Some(h);
        }
        if strong.is_none() && window_coinst(trace, k, from, from + h) {
            strong = Some(h);
        }
    }
    (weak, strong)
}

/// Median of the defined ratios, `f64::INFINITY` standing in for an unbounded strong horizon.
pub fn oracle_gap(terms: &[(Option<usize>, Option<usize>)]) -> Option<f64> {
    let mut ratios: Vec<f64> = terms
        .iter()
        .filter_map(|&(w, s)| {
            let w = w?;
            Some(match s {
                Some(s) => (s + 1) as f64 / (w + 1) as f64,
                None => f64::INFINITY,
            })
        })
        .collect();
    if ratios.is_empty() {
        return None;
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = ratios.len();
    Some(if n % 2 == 1 {
        ratios[n / 2]
    } else {
        (ratios[n / 2 - 1] + ratios[n / 2]) / 2.0
    })
}

pub fn oracle_distance(a: &BTreeSet<usize>, b: &BTreeSet<usize>, k: usize) -> f64 {
    a.symmetric_difference(b).count() as f64 / k as f64
}

pub fn oracle_recovery_bound(
    reference: &BTreeSet<usize>,
    drifted: &BTreeSet<usize>,
    controllable: &BTreeSet<usize>,
    k: usize,
    epsilon: f64,
) -> f64 {
    let diff: BTreeSet<usize> = reference.symmetric_difference(drifted).copied().collect();
    let hit = diff.intersection(controllable).count() as f64;
    let num = hit + epsilon * k as f64;
    let den = diff.len() as f64 + epsilon * k as f64;
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

use std::cmp::Ordering;
use std::fmt;

use crate::activation::ActivationSet;
use crate::error::{Error, Result};
use crate::identity::GroundedIdentity;
use crate::window::{minimal_horizons, Horizon, MinimalHorizons};

/// A finite ratio or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    fn cmp_total(&self, other: &Ratio) -> Ordering {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => a.total_cmp(b),
            (Ratio::Finite(_), Ratio::Infinite) => Ordering::Less,
            (Ratio::Infinite, Ratio::Finite(_)) => Ordering::Greater,
            (Ratio::Infinite, Ratio::Infinite) => Ordering::Equal,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(x) => Some(x),
            Ratio::Infinite => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(x) => write!(f, "{x:.6}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapTerm {
    pub t: usize,
    pub horizons: MinimalHorizons,
    /// `None` when no finite weak horizon exists.
    pub ratio: Option<Ratio>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapResult {
    pub per_t: Vec<GapTerm>,
    pub ratio: Ratio,
    pub undefined_count: usize,
}

fn term_ratio(h: MinimalHorizons) -> Option<Ratio> {
    let weak = h.weak.finite()?;
    Some(match h.strong {
        Horizon::Finite(strong) => Ratio::Finite((strong + 1) as f64 / (weak + 1) as f64),
        Horizon::Infinite => Ratio::Infinite,
    })
}

/// Median with `+inf` sorting above every finite value. For an even count the
/// two middle values are averaged, and the median is `+inf` if either is.
pub fn median(values: &[Ratio]) -> Option<Ratio> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(Ratio::cmp_total);
    let n = sorted.len();
    if n % 2 == 1 {
        return Some(sorted[n / 2]);
    }
    Some(match (sorted[n / 2 - 1], sorted[n / 2]) {
        (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite((a + b) / 2.0),
        _ => Ratio::Infinite,
    })
}

/// Temporal gap ratio: median over `eval_indices` of `(w_strong + 1) / (w_weak + 1)`.
///
/// Layer times with no finite weak horizon are left out of the median and counted.
pub fn gap_ratio(
    activations: &[ActivationSet],
    identity: &GroundedIdentity,
    stride: usize,
    eval_indices: &[usize],
    horizon_max: usize,
) -> Result<GapResult> {
    if eval_indices.is_empty() {
        return Err(Error::parameter("evaluation index set is empty"));
    }
    let per_t = eval_indices
        .iter()
        .map(|&t| {
            let horizons = minimal_horizons(activations, identity, stride, t, horizon_max)?;
            Ok(GapTerm {
                t,
                horizons,
                ratio: term_ratio(horizons),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let defined: Vec<Ratio> = per_t.iter().filter_map(|g| g.ratio).collect();
    let undefined_count = per_t.len() - defined.len();
    let ratio = median(&defined).ok_or_else(|| {
        Error::Metric(format!(
            "gap ratio undefined: no ingredient-wise occurrence within horizon {horizon_max} at any of {} layer times",
            per_t.len()
        ))
    })?;
    Ok(GapResult {
        per_t,
        ratio,
        undefined_count,
    })
}

//! Windowing maps and the Occur / CoInst window predicates.
//!
//! A window at layer time `t` covers objective steps `stride*t ..= stride*t + horizon`.
//! `occurs` asks that each ingredient be active somewhere in the window;
//! `coinstantiated` asks that all of them be active at one step.

use std::fmt;

use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};
use crate::identity::GroundedIdentity;

/// Which layer-time indices to evaluate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalSelector {
    /// Every `t` whose full window lies inside the trace.
    AllValid,
    List(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    pub horizon: usize,
    pub stride: usize,
    /// Sorted, duplicate-free.
    pub eval_indices: Vec<usize>,
    pub horizon_max: usize,
}

impl WindowConfig {
    pub fn new(horizon: usize, stride: usize, eval_indices: Vec<usize>, horizon_max: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::parameter("stride must be at least 1"));
        }
        let mut eval_indices = eval_indices;
        eval_indices.sort_unstable();
        eval_indices.dedup();
        Ok(Self {
            horizon,
            stride,
            eval_indices,
            horizon_max,
        })
    }

    /// Resolves `selector` against a trace of `len` steps.
    ///
    /// An explicit list containing a `t` whose window overruns the trace is a range error.
    pub fn resolve(
        horizon: usize,
        stride: usize,
        selector: &EvalSelector,
        horizon_max: usize,
        len: usize,
    ) -> Result<Self> {
        if stride == 0 {
            return Err(Error::parameter("stride must be at least 1"));
        }
        let indices = match selector {
            EvalSelector::AllValid => (0..valid_count(horizon, stride, len)).collect(),
            EvalSelector::List(list) => list.clone(),
        };
        let cfg = Self::new(horizon, stride, indices, horizon_max)?;
        cfg.validate(len)?;
        Ok(cfg)
    }

    pub fn start(&self, t: usize) -> usize {
        self.stride * t
    }

    /// Every window must fit and `T` must be non-empty.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.eval_indices.is_empty() {
            return Err(Error::parameter("evaluation index set is empty"));
        }
        for &t in &self.eval_indices {
            if !fits(self.horizon, self.stride, t, len) {
                return Err(Error::range(format!(
                    "window at t = {t} (steps {}..={}) overruns a trace of {len} steps",
                    self.stride * t,
                    self.stride * t + self.horizon
                )));
            }
        }
        Ok(())
    }
}

fn fits(horizon: usize, stride: usize, t: usize, len: usize) -> bool {
    stride
        .checked_mul(t)
        .and_then(|s| s.checked_add(horizon))
        .is_some_and(|end| end < len)
}

fn valid_count(horizon: usize, stride: usize, len: usize) -> usize {
    if len <= horizon {
        0
    } else {
        (len - 1 - horizon) / stride + 1
    }
}

/// The windowed segment `σ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSegment<'a> {
    pub start: usize,
    pub sets: &'a [ActivationSet],
}

impl<'a> WindowSegment<'a> {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

pub fn window<'a>(activations: &'a [ActivationSet], cfg: &WindowConfig, t: usize) -> Result<WindowSegment<'a>> {
    segment(activations, cfg.stride, cfg.horizon, t)
}

pub(crate) fn segment(
    activations: &[ActivationSet],
    stride: usize,
    horizon: usize,
    t: usize,
) -> Result<WindowSegment<'_>> {
    if !fits(horizon, stride, t, activations.len()) {
        return Err(Error::range(format!(
            "window at t = {t} with stride {stride} and horizon {horizon} overruns a trace of {} steps",
            activations.len()
        )));
    }
    let start = stride * t;
    Ok(WindowSegment {
        start,
        sets: &activations[start..=start + horizon],
    })
}

/// Each ingredient is active at some step of the window.
pub fn occurs(segment: &WindowSegment<'_>, identity: &GroundedIdentity) -> bool {
    let mut seen = IngredientSet::new();
    for f in segment.sets {
        seen.union_with(&f.active);
    }
    identity.full_set().is_subset(&seen)
}

/// All ingredients are active at a single step of the window.
pub fn coinstantiated(segment: &WindowSegment<'_>, identity: &GroundedIdentity) -> bool {
    let k = identity.k();
    segment.sets.iter().any(|f| f.is_full(k))
}

/// The within-window existential lift of the conjunction `subset`.
pub fn diamond(segment: &WindowSegment<'_>, subset: &IngredientSet) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::structural("diamond over an empty ingredient subset"));
    }
    Ok(segment.sets.iter().any(|f| subset.is_subset(&f.active)))
}

/// A minimal horizon, or `Infinite` when none exists within the search bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Horizon {
    Finite(usize),
    Infinite,
}

impl Horizon {
    pub fn finite(self) -> Option<usize> {
        match self {
            Horizon::Finite(h) => Some(h),
            Horizon::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Horizon::Infinite
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Finite(h) => write!(f, "{h}"),
            Horizon::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalHorizons {
    pub weak: Horizon,
    pub strong: Horizon,
}

/// Least horizons at which Occur and CoInst first hold for the window starting at `stride*t`.
///
/// The search stops at `horizon_max` or at the end of the trace, whichever comes first.
pub fn minimal_horizons(
    activations: &[ActivationSet],
    identity: &GroundedIdentity,
    stride: usize,
    t: usize,
    horizon_max: usize,
) -> Result<MinimalHorizons> {
    let start = stride
        .checked_mul(t)
        .filter(|&s| s < activations.len())
        .ok_or_else(|| Error::range(format!("window start for t = {t} lies beyond the trace")))?;
    let k = identity.k();
    let full = identity.full_set();
    let last = activations.len() - 1 - start;
    let limit = horizon_max.min(last);

    let mut seen = IngredientSet::new();
    let mut weak = Horizon::Infinite;
    let mut strong = Horizon::Infinite;
    for (offset, f) in activations[start..=start + limit].iter().enumerate() {
        if weak.is_infinite() {
            seen.union_with(&f.active);
            if full.is_subset(&seen) {
                weak = Horizon::Finite(offset);
            }
        }
        if f.is_full(k) {
            strong = Horizon::Finite(offset);
            break;
        }
    }
    Ok(MinimalHorizons { weak, strong })
}

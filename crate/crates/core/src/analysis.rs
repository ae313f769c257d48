//! End-to-end analysis of one trace against one identity.

use std::path::Path;

use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};
use crate::format::{parse_identity, read_trace, MetricsReport, WindowRow};
use crate::identity::GroundedIdentity;
use crate::metrics::{
    consistency, continuity, gap_ratio, identifiability, morphospace, persistence_streaming, recovery,
    recovery_bound, MetricParams, TokenJaccard,
};
use crate::window::{minimal_horizons, EvalSelector, WindowConfig};

/// Drift and recovery steps within the analysed trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryInput {
    pub drift_index: usize,
    pub recov_index: usize,
    /// Ingredients an intervention can act on; enables the bound.
    pub controllable: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub horizon: usize,
    pub stride: usize,
    pub eval: EvalSelector,
    pub horizon_max: usize,
    pub params: MetricParams,
    pub ref_index: usize,
    pub recovery: Option<RecoveryInput>,
    /// Model outputs for the consistency score.
    pub outputs: Option<Vec<String>>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            horizon: 1,
            stride: 1,
            eval: EvalSelector::AllValid,
            horizon_max: 64,
            params: MetricParams::default(),
            ref_index: 0,
            recovery: None,
            outputs: None,
        }
    }
}

fn step_at<'a>(acts: &'a [ActivationSet], index: usize, what: &str) -> Result<&'a ActivationSet> {
    acts.get(index)
        .ok_or_else(|| Error::range(format!("{what} {index} is outside a trace of {} steps", acts.len())))
}

pub fn analyze(activations: &[ActivationSet], identity: &GroundedIdentity, cfg: &AnalysisConfig) -> Result<MetricsReport> {
    cfg.params.validate()?;
    if activations.is_empty() {
        return Err(Error::parameter("trace is empty"));
    }
    let k = identity.k();
    let window = WindowConfig::resolve(cfg.horizon, cfg.stride, &cfg.eval, cfg.horizon_max, activations.len())?;
    if window.eval_indices.is_empty() {
        return Err(Error::parameter(format!(
            "no window of horizon {} fits in a trace of {} steps",
            cfg.horizon,
            activations.len()
        )));
    }
    let pers = persistence_streaming(activations, identity, &window)?;

    let (gap, gap_undefined_count, horizons) =
        match gap_ratio(activations, identity, window.stride, &window.eval_indices, window.horizon_max) {
            Ok(g) => (Some(g.ratio), g.undefined_count, g.per_t.iter().map(|t| t.horizons).collect()),
            Err(Error::Metric(_)) => {
                let hs = window
                    .eval_indices
                    .iter()
                    .map(|&t| minimal_horizons(activations, identity, window.stride, t, window.horizon_max))
                    .collect::<Result<Vec<_>>>()?;
                (None, hs.len(), hs)
            }
            Err(e) => return Err(e),
        };

    let reference = step_at(activations, cfg.ref_index, "reference index")?;
    let mut hits = 0usize;
    for &t in &window.eval_indices {
        hits += usize::from(identifiability(&activations[window.start(t)], reference, k, cfg.params.delta_i)?);
    }
    let identifiability_rate = hits as f64 / window.eval_indices.len() as f64;

    let continuity_mean = if activations.len() >= 2 {
        let steps: Vec<usize> = (1..activations.len()).collect();
        Some(continuity(activations, k, &steps)?.mean)
    } else {
        None
    };

    let consistency_score = match &cfg.outputs {
        Some(outputs) => Some(consistency(outputs, &TokenJaccard, cfg.params.delta_cons)?.score),
        None => None,
    };

    let (recovery_score, bound) = match &cfg.recovery {
        Some(r) => {
            let drifted = step_at(activations, r.drift_index, "drift index")?;
            let recovered = step_at(activations, r.recov_index, "recovery index")?;
            let score = recovery(reference, drifted, recovered, k, cfg.params.epsilon)?;
            let bound = match &r.controllable {
                Some(ids) => {
                    let p: IngredientSet = identity.indices_of(ids.iter().map(String::as_str))?;
                    Some(recovery_bound(reference, drifted, &p, k, cfg.params.epsilon)?)
                }
                None => None,
            };
            (Some(score), bound)
        }
        None => (None, None),
    };

    let coherence = match consistency_score {
        Some(c) => Some(morphospace(identifiability_rate, c, pers.p_weak, pers.p_strong, cfg.params.alpha)?.coherence),
        None => None,
    };

    let windows = pers
        .per_window
        .iter()
        .zip(&horizons)
        .map(|(w, h)| WindowRow {
            t: w.t,
            occurs: w.occurs,
            coinst: w.coinst,
            w_weak: h.weak,
            w_strong: h.strong,
        })
        .collect();

    Ok(MetricsReport {
        k,
        steps: activations.len(),
        horizon: window.horizon,
        stride: window.stride,
        horizon_max: window.horizon_max,
        params: cfg.params,
        ref_index: cfg.ref_index,
        p_weak: pers.p_weak,
        p_strong: pers.p_strong,
        gap_ratio: gap,
        gap_undefined_count,
        identifiability_rate,
        continuity_mean,
        consistency: consistency_score,
        recovery: recovery_score,
        recovery_bound: bound,
        coherence,
        windows,
    })
}

pub fn load_identity(path: &Path) -> Result<GroundedIdentity> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_identity(&text)?.identity)
}

/// Outputs file: one model output per line. Blank lines are skipped.
pub fn load_outputs(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string).collect())
}

pub fn analyze_files(trace: &Path, identity: &Path, cfg: &AnalysisConfig) -> Result<MetricsReport> {
    let identity = load_identity(identity)?;
    let activations = read_trace(trace)?.activations(&identity)?;
    analyze(&activations, &identity, cfg)
}

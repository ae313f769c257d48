//! Expected-values sidecar written next to simulated traces.
//!
//! ```json
//! {
//!   "scenario": "noncommutation",
//!   "identity": "identity.json",
//!   "window": {"delta": 1, "stride": 1, "eval": [0], "horizon_max": 1},
//!   "runs": [{"name": "main", "trace": "trace.jsonl"}],
//!   "expectations": [{"check": "window", "run": "main", "t": 0, "occurs": true, "coinst": false}]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricParams;
use crate::window::{EvalSelector, WindowConfig};

pub const SIDECAR_FILE: &str = "expected.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub scenario: String,
    pub identity: String,
    pub window: WindowSpec,
    #[serde(default)]
    pub params: ParamSpec,
    pub runs: Vec<RunSpec>,
    pub expectations: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub delta: usize,
    pub stride: usize,
    pub eval: EvalSpec,
    pub horizon_max: usize,
}

/// `"all"` or an explicit list of layer times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalSpec {
    Keyword(String),
    List(Vec<usize>),
}

impl EvalSpec {
    pub fn selector(&self) -> Result<EvalSelector> {
        match self {
            EvalSpec::Keyword(k) if k == "all" => Ok(EvalSelector::AllValid),
            EvalSpec::Keyword(k) => Err(Error::parameter(format!("unknown eval selector `{k}`"))),
            EvalSpec::List(v) => Ok(EvalSelector::List(v.clone())),
        }
    }
}

impl WindowSpec {
    /// Describes `cfg`, spelling out its evaluation indices.
    pub fn explicit(cfg: &WindowConfig) -> Self {
        Self {
            delta: cfg.horizon,
            stride: cfg.stride,
            eval: EvalSpec::List(cfg.eval_indices.clone()),
            horizon_max: cfg.horizon_max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamSpec {
    pub delta_i: f64,
    pub delta_cons: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for ParamSpec {
    fn default() -> Self {
        MetricParams::default().into()
    }
}

impl From<MetricParams> for ParamSpec {
    fn from(p: MetricParams) -> Self {
        Self {
            delta_i: p.delta_i,
            delta_cons: p.delta_cons,
            epsilon: p.epsilon,
            alpha: p.alpha,
        }
    }
}

impl From<ParamSpec> for MetricParams {
    fn from(p: ParamSpec) -> Self {
        Self {
            delta_i: p.delta_i,
            delta_cons: p.delta_cons,
            epsilon: p.epsilon,
            alpha: p.alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub name: String,
    pub trace: String,
    #[serde(default)]
    pub ref_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoverySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverySpec {
    pub drift_index: usize,
    pub recov_index: usize,
    pub controllable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expectation {
    /// Occur / CoInst verdicts of one window.
    Window {
        run: String,
        t: usize,
        occurs: bool,
        coinst: bool,
    },
    /// Minimal horizons at one layer time, as rendered in reports.
    Horizons {
        run: String,
        t: usize,
        w_weak: String,
        w_strong: String,
    },
    PWeak {
        run: String,
        value: f64,
    },
    PStrong {
        run: String,
        value: f64,
    },
    /// Gap ratio as rendered in reports (`"inf"` or six decimals).
    GapRatio {
        run: String,
        value: String,
    },
    /// `p_strong(augmented) < p_strong(baseline)`.
    StrongDrop {
        baseline: String,
        augmented: String,
    },
    /// `p_weak(augmented) >= p_weak(baseline)`.
    WeakNotLower {
        baseline: String,
        augmented: String,
    },
    /// `p_weak` is non-decreasing along `runs`.
    WeakOrder {
        runs: Vec<String>,
    },
    /// `run` attains the largest `p_strong` of all runs.
    StrongMax {
        run: String,
    },
    /// Measured recovery does not exceed the controllable-set bound.
    RecoveryWithinBound {
        run: String,
    },
    /// Recovery bound as rendered in reports.
    RecoveryBound {
        run: String,
        value: String,
    },
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Window { run, t, occurs, coinst } => {
                write!(f, "{run}: window t={t} occurs={occurs} coinst={coinst}")
            }
            Expectation::Horizons { run, t, w_weak, w_strong } => {
                write!(f, "{run}: t={t} w_weak={w_weak} w_strong={w_strong}")
            }
            Expectation::PWeak { run, value } => write!(f, "{run}: p_weak = {value:.6}"),
            Expectation::PStrong { run, value } => write!(f, "{run}: p_strong = {value:.6}"),
            Expectation::GapRatio { run, value } => write!(f, "{run}: gap ratio = {value}"),
            Expectation::StrongDrop { baseline, augmented } => {
                write!(f, "p_strong({augmented}) < p_strong({baseline})")
            }
            Expectation::WeakNotLower { baseline, augmented } => {
                write!(f, "p_weak({augmented}) >= p_weak({baseline})")
            }
            Expectation::WeakOrder { runs } => write!(f, "p_weak non-decreasing over {}", runs.join(" <= ")),
            Expectation::StrongMax { run } => write!(f, "{run} has the largest p_strong"),
            Expectation::RecoveryWithinBound { run } => write!(f, "{run}: recovery <= bound"),
            Expectation::RecoveryBound { run, value } => write!(f, "{run}: recovery bound = {value}"),
        }
    }
}

pub fn parse_sidecar(text: &str) -> Result<Sidecar> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn write_sidecar(sidecar: &Sidecar) -> String {
    let mut out = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Sidecar {
        Sidecar {
            scenario: "demo".into(),
            identity: "identity.json".into(),
            window: WindowSpec {
                delta: 1,
                stride: 1,
                eval: EvalSpec::Keyword("all".into()),
                horizon_max: 4,
            },
            params: ParamSpec::default(),
            runs: vec![RunSpec {
                name: "main".into(),
                trace: "trace.jsonl".into(),
                ref_index: 0,
                recovery: None,
            }],
            expectations: vec![
                Expectation::PStrong {
                    run: "main".into(),
                    value: 0.0,
                },
                Expectation::StrongDrop {
                    baseline: "a".into(),
                    augmented: "b".into(),
                },
            ],
        }
    }

    #[test]
    fn round_trip() {
        let s = sample();
        let text = write_sidecar(&s);
        assert!(text.contains("\"check\": \"p_strong\""));
        assert!(text.contains("\"check\": \"strong_drop\""));
        assert_eq!(parse_sidecar(&text).unwrap(), s);
    }

    #[test]
    fn eval_keyword() {
        assert_eq!(EvalSpec::Keyword("all".into()).selector().unwrap(), EvalSelector::AllValid);
        assert!(EvalSpec::Keyword("some".into()).selector().is_err());
        assert_eq!(EvalSpec::List(vec![2]).selector().unwrap(), EvalSelector::List(vec![2]));
    }

    #[test]
    fn rejects_unknown_checks() {
        let text = write_sidecar(&sample()).replace("strong_drop", "vibes_ok");
        assert!(parse_sidecar(&text).is_err());
    }
}

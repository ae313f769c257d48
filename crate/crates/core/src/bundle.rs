//! Scenario bundles: simulated traces, their identity spec and an
//! expected-values sidecar, written to one directory and checked by feeding
//! the traces back through [`analyze`](crate::analysis::analyze).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::activation::IngredientSet;
use crate::analysis::{analyze, analyze_files, AnalysisConfig, RecoveryInput};
use crate::error::{Error, Result};
use crate::format::sidecar::{
    parse_sidecar, write_sidecar, EvalSpec, Expectation, ParamSpec, RecoverySpec, RunSpec, Sidecar, WindowSpec,
    SIDECAR_FILE,
};
use crate::format::{write_activations, write_identity, write_states, MetricsReport};
use crate::identity::GroundedIdentity;
use crate::metrics::MetricParams;
use crate::simulator::{self as scenarios, probe_identity, probe_script, probe_window, PresetKind, Scenario, Trajectory};
use crate::window::{EvalSelector, WindowConfig};

pub const IDENTITY_FILE: &str = "identity.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Noncommutation,
    Alternating,
    WorkedExample,
    Capacity,
    RagDisplacement,
    DriftRecover,
    Preset,
    Architectures,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::Noncommutation,
        ScenarioKind::Alternating,
        ScenarioKind::WorkedExample,
        ScenarioKind::Capacity,
        ScenarioKind::RagDisplacement,
        ScenarioKind::DriftRecover,
        ScenarioKind::Preset,
        ScenarioKind::Architectures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Noncommutation => "noncommutation",
            ScenarioKind::Alternating => "alternating",
            ScenarioKind::WorkedExample => "worked-example",
            ScenarioKind::Capacity => "capacity",
            ScenarioKind::RagDisplacement => "rag-displacement",
            ScenarioKind::DriftRecover => "drift-recover",
            ScenarioKind::Preset => "preset",
            ScenarioKind::Architectures => "architectures",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
            Error::Scenario(format!("unknown scenario `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// Numeric knobs; `None` picks the scenario's default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioParams {
    pub length: Option<usize>,
    pub c: Option<usize>,
    pub k: Option<usize>,
    pub block: Option<usize>,
    pub passage: Option<usize>,
    pub capacity: Option<usize>,
    pub turns: Option<usize>,
    pub preset: Option<PresetKind>,
    pub removed: Option<Vec<usize>>,
    pub controllable: Option<Vec<usize>>,
    pub interventions: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    pub sidecar: Sidecar,
    pub identity: String,
    /// `(file name, contents)`.
    pub traces: Vec<(String, String)>,
}

fn run(name: &str) -> RunSpec {
    RunSpec {
        name: name.into(),
        trace: format!("{name}.jsonl"),
        ref_index: 0,
        recovery: None,
    }
}

fn single(kind: ScenarioKind, s: &Scenario, expectations: Vec<Expectation>) -> Bundle {
    Bundle {
        sidecar: Sidecar {
            scenario: kind.name().into(),
            identity: IDENTITY_FILE.into(),
            window: WindowSpec::explicit(&s.window),
            params: ParamSpec::default(),
            runs: vec![run("main")],
            expectations,
        },
        identity: write_identity(&s.identity, None),
        traces: vec![("main.jsonl".into(), write_states(&s.trajectory.states))],
    }
}

fn main_run() -> String {
    "main".into()
}

pub fn build_bundle(kind: ScenarioKind, p: &ScenarioParams) -> Result<Bundle> {
    Ok(match kind {
        ScenarioKind::Noncommutation => single(
            kind,
            &scenarios::noncommutation()?,
            vec![Expectation::Window {
                run: main_run(),
                t: 0,
                occurs: true,
                coinst: false,
            }],
        ),
        ScenarioKind::Alternating => single(
            kind,
            &scenarios::alternating(p.length.unwrap_or(100))?,
            vec![
                Expectation::PWeak {
                    run: main_run(),
                    value: 1.0,
                },
                Expectation::PStrong {
                    run: main_run(),
                    value: 0.0,
                },
            ],
        ),
        ScenarioKind::WorkedExample => single(
            kind,
            &scenarios::worked_example()?,
            vec![
                Expectation::Window {
                    run: main_run(),
                    t: 0,
                    occurs: true,
                    coinst: false,
                },
                Expectation::Horizons {
                    run: main_run(),
                    t: 0,
                    w_weak: "2".into(),
                    w_strong: "inf".into(),
                },
                Expectation::GapRatio {
                    run: main_run(),
                    value: "inf".into(),
                },
            ],
        ),
        ScenarioKind::Capacity => single(
            kind,
            &scenarios::capacity_limited(p.c.unwrap_or(2), p.k.unwrap_or(3), p.length.unwrap_or(100))?,
            vec![
                Expectation::PStrong {
                    run: main_run(),
                    value: 0.0,
                },
                Expectation::PWeak {
                    run: main_run(),
                    value: 1.0,
                },
            ],
        ),
        ScenarioKind::RagDisplacement => rag_bundle(p)?,
        ScenarioKind::DriftRecover => drift_bundle(p)?,
        ScenarioKind::Preset => preset_bundle(p)?,
        ScenarioKind::Architectures => architectures_bundle(p)?,
    })
}

fn rag_bundle(p: &ScenarioParams) -> Result<Bundle> {
    let s = scenarios::rag_displacement(p.block.unwrap_or(3), p.passage.unwrap_or(6), p.capacity.unwrap_or(8))?;
    let mut expectations = vec![Expectation::WeakNotLower {
        baseline: "without".into(),
        augmented: "with".into(),
    }];
    if p.passage != Some(0) {
        expectations.push(Expectation::StrongDrop {
            baseline: "without".into(),
            augmented: "with".into(),
        });
    }
    Ok(Bundle {
        sidecar: Sidecar {
            scenario: ScenarioKind::RagDisplacement.name().into(),
            identity: IDENTITY_FILE.into(),
            window: WindowSpec::explicit(&s.window),
            params: ParamSpec::default(),
            runs: vec![run("without"), run("with")],
            expectations,
        },
        identity: write_identity(&s.identity, None),
        traces: vec![
            ("without.jsonl".into(), write_states(&s.without.states)),
            ("with.jsonl".into(), write_states(&s.with.states)),
        ],
    })
}

fn drift_bundle(p: &ScenarioParams) -> Result<Bundle> {
    let k = p.k.unwrap_or(4);
    let epsilon = p.epsilon.unwrap_or(MetricParams::default().epsilon);
    let removed = p.removed.clone().unwrap_or_else(|| (0..3.min(k)).collect());
    let controllable = p.controllable.clone().unwrap_or_else(|| vec![0]);
    if let Some(&bad) = removed.iter().chain(&controllable).find(|&&i| i >= k) {
        return Err(Error::structural(format!("ingredient index {bad} is outside 0..{k}")));
    }
    let identity = GroundedIdentity::from_tokens((1..=k).map(|i| format!("g{i}")))?;
    let controllable_set = IngredientSet::from_indices(controllable.iter().copied());
    let reference = IngredientSet::full(k);
    let drifted: IngredientSet = reference.iter().filter(|i| !removed.contains(i)).collect();
    let d = scenarios::drift_recover(
        &reference,
        &drifted,
        &controllable_set,
        p.interventions.unwrap_or(5),
    )?;
    let acts = vec![d.reference.clone(), d.drifted.clone(), d.recovered.clone()];
    let window = WindowConfig::new(0, 1, vec![0], 0)?;
    let params = MetricParams {
        epsilon,
        ..MetricParams::default()
    };
    let bound = crate::metrics::recovery_bound(&d.reference, &d.drifted, &controllable_set, k, epsilon)?;
    Ok(Bundle {
        sidecar: Sidecar {
            scenario: ScenarioKind::DriftRecover.name().into(),
            identity: IDENTITY_FILE.into(),
            window: WindowSpec::explicit(&window),
            params: params.into(),
            runs: vec![RunSpec {
                recovery: Some(RecoverySpec {
                    drift_index: 1,
                    recov_index: 2,
                    controllable: identity.ids_of(&controllable_set).map(str::to_string).collect(),
                }),
                ..run("main")
            }],
            expectations: vec![
                Expectation::RecoveryWithinBound { run: main_run() },
                Expectation::RecoveryBound {
                    run: main_run(),
                    value: format!("{bound:.6}"),
                },
            ],
        },
        identity: write_identity(&identity, None),
        traces: vec![("main.jsonl".into(), write_activations(&acts, &identity))],
    })
}

fn probe_trajectory(kind: PresetKind, turns: usize) -> Result<Trajectory> {
    let preset = kind.preset();
    Trajectory::simulate(&preset, &probe_script(turns), preset.initial_state()?)
}

fn preset_bundle(p: &ScenarioParams) -> Result<Bundle> {
    let kind = p.preset.unwrap_or(PresetKind::Rag);
    let traj = probe_trajectory(kind, p.turns.unwrap_or(8))?;
    let identity = probe_identity();
    let window = probe_window(traj.len())?;
    let acts = crate::identity::activation_sequence(&traj.states, &identity, &traj.architecture)?;
    let report = analyze(&acts, &identity, &config_for(&window, MetricParams::default(), &run("main"))?)?;
    Ok(Bundle {
        sidecar: Sidecar {
            scenario: ScenarioKind::Preset.name().into(),
            identity: IDENTITY_FILE.into(),
            window: WindowSpec::explicit(&window),
            params: ParamSpec::default(),
            runs: vec![run(kind.name())],
            expectations: vec![
                Expectation::PWeak {
                    run: kind.name().into(),
                    value: report.p_weak,
                },
                Expectation::PStrong {
                    run: kind.name().into(),
                    value: report.p_strong,
                },
            ],
        },
        identity: write_identity(&identity, None),
        traces: vec![(format!("{}.jsonl", kind.name()), write_states(&traj.states))],
    })
}

fn architectures_bundle(p: &ScenarioParams) -> Result<Bundle> {
    let turns = p.turns.unwrap_or(8);
    let mut traces = Vec::new();
    let mut len = 0;
    for kind in PresetKind::ALL {
        let traj = probe_trajectory(kind, turns)?;
        len = traj.len();
        traces.push((format!("{}.jsonl", kind.name()), write_states(&traj.states)));
    }
    let names: Vec<String> = PresetKind::ALL.iter().map(|k| k.name().to_string()).collect();
    Ok(Bundle {
        sidecar: Sidecar {
            scenario: ScenarioKind::Architectures.name().into(),
            identity: IDENTITY_FILE.into(),
            window: WindowSpec::explicit(&probe_window(len)?),
            params: ParamSpec::default(),
            runs: names.iter().map(|n| run(n)).collect(),
            expectations: vec![
                Expectation::WeakOrder { runs: names },
                Expectation::StrongMax {
                    run: PresetKind::Controller.name().into(),
                },
            ],
        },
        identity: write_identity(&probe_identity(), None),
        traces,
    })
}

pub fn write_bundle(bundle: &Bundle, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![
        (SIDECAR_FILE.to_string(), write_sidecar(&bundle.sidecar)),
        (bundle.sidecar.identity.clone(), bundle.identity.clone()),
    ];
    files.extend(bundle.traces.iter().cloned());
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn config_for(window: &WindowConfig, params: MetricParams, run: &RunSpec) -> Result<AnalysisConfig> {
    config_from_spec(&WindowSpec::explicit(window), params, run)
}

fn config_from_spec(window: &WindowSpec, params: MetricParams, run: &RunSpec) -> Result<AnalysisConfig> {
    Ok(AnalysisConfig {
        horizon: window.delta,
        stride: window.stride,
        eval: window.eval.selector()?,
        horizon_max: window.horizon_max,
        params,
        ref_index: run.ref_index,
        recovery: run.recovery.as_ref().map(|r| RecoveryInput {
            drift_index: r.drift_index,
            recov_index: r.recov_index,
            controllable: Some(r.controllable.clone()),
        }),
        outputs: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub expectation: Expectation,
    pub passed: bool,
    /// Observed value(s).
    pub observed: String,
}

/// Analyses every run in `dir` and evaluates the sidecar's expectations.
pub fn verify_bundle(dir: &Path) -> Result<Vec<CheckOutcome>> {
    let path = dir.join(SIDECAR_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let sidecar = parse_sidecar(&text)?;
    let params: MetricParams = sidecar.params.into();
    let mut reports = BTreeMap::new();
    for r in &sidecar.runs {
        let cfg = config_from_spec(&sidecar.window, params, r)?;
        let report = analyze_files(&dir.join(&r.trace), &dir.join(&sidecar.identity), &cfg)?;
        reports.insert(r.name.clone(), report);
    }
    sidecar
        .expectations
        .iter()
        .map(|e| check(e, &reports).map(|(passed, observed)| CheckOutcome {
            expectation: e.clone(),
            passed,
            observed,
        }))
        .collect()
}

fn check(e: &Expectation, reports: &BTreeMap<String, MetricsReport>) -> Result<(bool, String)> {
    let get = |name: &str| {
        reports
            .get(name)
            .ok_or_else(|| Error::Scenario(format!("expectation refers to unknown run `{name}`")))
    };
    let row = |name: &str, t: usize| -> Result<crate::format::WindowRow> {
        get(name)?
            .windows
            .iter()
            .find(|w| w.t == t)
            .cloned()
            .ok_or_else(|| Error::Scenario(format!("run `{name}` has no window at t = {t}")))
    };
    const TOL: f64 = 1e-12;
    Ok(match e {
        Expectation::Window { run, t, occurs, coinst } => {
            let w = row(run, *t)?;
            (
                w.occurs == *occurs && w.coinst == *coinst,
                format!("occurs={} coinst={}", w.occurs, w.coinst),
            )
        }
        Expectation::Horizons { run, t, w_weak, w_strong } => {
            let w = row(run, *t)?;
            let (ww, ws) = (w.w_weak.to_string(), w.w_strong.to_string());
            (ww == *w_weak && ws == *w_strong, format!("w_weak={ww} w_strong={ws}"))
        }
        Expectation::PWeak { run, value } => {
            let x = get(run)?.p_weak;
            ((x - value).abs() <= TOL, format!("{x:.6}"))
        }
        Expectation::PStrong { run, value } => {
            let x = get(run)?.p_strong;
            ((x - value).abs() <= TOL, format!("{x:.6}"))
        }
        Expectation::GapRatio { run, value } => {
            let g = get(run)?.gap_ratio.map_or_else(|| "undefined".to_string(), |r| r.to_string());
            (g == *value, g)
        }
        Expectation::StrongDrop { baseline, augmented } => {
            let (b, a) = (get(baseline)?.p_strong, get(augmented)?.p_strong);
            (a < b, format!("{a:.6} vs {b:.6}"))
        }
        Expectation::WeakNotLower { baseline, augmented } => {
            let (b, a) = (get(baseline)?.p_weak, get(augmented)?.p_weak);
            (a >= b, format!("{a:.6} vs {b:.6}"))
        }
        Expectation::WeakOrder { runs } => {
            let xs = runs.iter().map(|r| get(r).map(|r| r.p_weak)).collect::<Result<Vec<_>>>()?;
            let shown: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
            (xs.windows(2).all(|w| w[0] <= w[1]), shown.join(" "))
        }
        Expectation::StrongMax { run } => {
            let x = get(run)?.p_strong;
            let max = reports.values().map(|r| r.p_strong).fold(f64::NEG_INFINITY, f64::max);
            (x >= max, format!("{x:.6} (max {max:.6})"))
        }
        Expectation::RecoveryWithinBound { run } => {
            let r = get(run)?;
            match (r.recovery, r.recovery_bound) {
                (Some(x), Some(b)) => (x <= b + 1e-9, format!("{x:.6} <= {b:.6}")),
                _ => (false, "recovery not computed".into()),
            }
        }
        Expectation::RecoveryBound { run, value } => {
            let b = get(run)?.recovery_bound.map_or_else(|| "none".to_string(), |b| format!("{b:.6}"));
            (b == *value, b)
        }
    })
}

/// Evaluation selector parsed from `all` or a comma-separated list.
pub fn parse_eval(text: &str) -> Result<EvalSelector> {
    let spec = if text.trim() == "all" {
        EvalSpec::Keyword("all".into())
    } else {
        EvalSpec::List(parse_index_list(text)?)
    };
    spec.selector()
}

pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::parameter(format!("`{s}` is not a non-negative integer")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_verifies() {
        for kind in ScenarioKind::ALL {
            let dir = std::env::temp_dir().join(format!("idgap-bundle-{}-{}", kind.name(), std::process::id()));
            let bundle = build_bundle(kind, &ScenarioParams::default()).unwrap();
            write_bundle(&bundle, &dir).unwrap();
            let outcomes = verify_bundle(&dir).unwrap();
            assert!(!outcomes.is_empty());
            for o in &outcomes {
                assert!(o.passed, "{}: {} (observed {})", kind.name(), o.expectation, o.observed);
            }
            std::fs::remove_dir_all(&dir).unwrap();
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for kind in ScenarioKind::ALL {
            assert_eq!(kind.name().parse::<ScenarioKind>().unwrap(), kind);
        }
        assert!(matches!("warp".parse::<ScenarioKind>(), Err(Error::Scenario(_))));
    }

    #[test]
    fn index_lists() {
        assert_eq!(parse_index_list("0, 2,5").unwrap(), vec![0, 2, 5]);
        assert!(parse_index_list("1,x").is_err());
        assert_eq!(parse_eval("all").unwrap(), EvalSelector::AllValid);
        assert_eq!(parse_eval("3,1").unwrap(), EvalSelector::List(vec![3, 1]));
    }
}

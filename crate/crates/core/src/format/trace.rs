//! JSON Lines traces.
//!
//! Each line is one step, `u` counting up from 0. A file uses exactly one of
//! two forms:
//!
//! - activation form: `{"u": 0, "F": ["name", "role"]}`
//! - full-state form: `{"u": 0, "C": ["Alice"], "M": {"role": "analyst"}, "pi": [1], "D": ["doc"]}`
//!
//! Full-state traces are projected onto activation sets with the architecture
//! inferred from the states themselves.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};
use crate::identity::{activation_sequence, GroundedIdentity, ScaffoldArchitecture, ScaffoldState};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivationRecord {
    u: usize,
    #[serde(rename = "F")]
    f: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    u: usize,
    #[serde(rename = "C")]
    c: Vec<String>,
    #[serde(rename = "M", default)]
    m: BTreeMap<String, String>,
    #[serde(default)]
    pi: Vec<u8>,
    #[serde(rename = "D", default)]
    d: BTreeSet<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceForm {
    Activation,
    FullState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    /// Active ingredient ids per step, with the line each step came from.
    Activations(Vec<(usize, Vec<String>)>),
    States(Vec<ScaffoldState>),
}

impl Trace {
    pub fn form(&self) -> TraceForm {
        match self {
            Trace::Activations(_) => TraceForm::Activation,
            Trace::States(_) => TraceForm::FullState,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Trace::Activations(v) => v.len(),
            Trace::States(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn activations(&self, identity: &GroundedIdentity) -> Result<Vec<ActivationSet>> {
        match self {
            Trace::Activations(steps) => steps
                .iter()
                .enumerate()
                .map(|(u, (line, ids))| {
                    let mut set = IngredientSet::new();
                    for id in ids {
                        let i = identity.index_of(id).ok_or_else(|| Error::Format {
                            line: *line,
                            message: format!("`{id}` is not an ingredient of the identity"),
                        })?;
                        set.insert(i);
                    }
                    Ok(ActivationSet::new(u, set))
                })
                .collect(),
            Trace::States(states) => {
                let arch = ScaffoldArchitecture::inferred_from(states);
                activation_sequence(states, identity, &arch)
            }
        }
    }
}

pub fn parse_trace(text: &str) -> Result<Trace> {
    let mut form: Option<TraceForm> = None;
    let mut activations = Vec::new();
    let mut states: Vec<ScaffoldState> = Vec::new();
    let mut n_flags: Option<usize> = None;
    let mut expected_u = 0usize;

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |e: serde_json::Error| Error::Parse {
            line: lineno,
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(line).map_err(parse_err)?;
        if !value.is_object() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected a JSON object".into(),
            });
        }
        let this = if value.get("F").is_some() {
            TraceForm::Activation
        } else {
            TraceForm::FullState
        };
        match form {
            None => form = Some(this),
            Some(f) if f != this => {
                return Err(Error::Format {
                    line: lineno,
                    message: "activation-form and full-state records are mixed".into(),
                })
            }
            Some(_) => {}
        }
        let u = match this {
            TraceForm::Activation => {
                let rec: ActivationRecord = serde_json::from_value(value).map_err(parse_err)?;
                activations.push((lineno, rec.f));
                rec.u
            }
            TraceForm::FullState => {
                let rec: StateRecord = serde_json::from_value(value).map_err(parse_err)?;
                if let Some(bad) = rec.pi.iter().find(|&&b| b > 1) {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("policy flag value {bad} is not 0 or 1"),
                    });
                }
                match n_flags {
                    None => n_flags = Some(rec.pi.len()),
                    Some(n) if n != rec.pi.len() => {
                        return Err(Error::Format {
                            line: lineno,
                            message: format!("{} policy flags, earlier steps have {n}", rec.pi.len()),
                        })
                    }
                    Some(_) => {}
                }
                states.push(ScaffoldState {
                    context: rec.c,
                    memory: rec.m,
                    policy_flags: rec.pi.iter().map(|&b| b == 1).collect(),
                    retrieved: rec.d,
                    step: rec.u,
                });
                rec.u
            }
        };
        if u != expected_u {
            return Err(Error::Sequence {
                line: lineno,
                expected: expected_u,
                got: u,
            });
        }
        expected_u += 1;
    }

    match form {
        None => Err(Error::Parse {
            line: 1,
            message: "trace is empty".into(),
        }),
        Some(TraceForm::Activation) => Ok(Trace::Activations(activations)),
        Some(TraceForm::FullState) => Ok(Trace::States(states)),
    }
}

pub fn read_trace(path: &std::path::Path) -> Result<Trace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

/// Activation form, renumbering steps from 0 in sequence order.
pub fn write_activations(activations: &[ActivationSet], identity: &GroundedIdentity) -> String {
    let mut out = String::new();
    for (u, a) in activations.iter().enumerate() {
        let rec = ActivationRecord {
            u,
            f: identity.ids_of(&a.active).map(str::to_string).collect(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Full-state form, renumbering steps from 0 in sequence order.
pub fn write_states(states: &[ScaffoldState]) -> String {
    let mut out = String::new();
    for (u, s) in states.iter().enumerate() {
        let rec = StateRecord {
            u,
            c: s.context.clone(),
            m: s.memory.clone(),
            pi: s.policy_flags.iter().map(|&b| u8::from(b)).collect(),
            d: s.retrieved.clone(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::IngredientSpec;

    fn identity() -> GroundedIdentity {
        GroundedIdentity::new(vec![
            IngredientSpec::context("name", ["Alice"]),
            IngredientSpec::memory("role", "role", "analyst"),
            IngredientSpec::policy("constraint", 0),
        ])
        .unwrap()
    }

    #[test]
    fn activation_form() {
        let t = parse_trace("{\"u\":0,\"F\":[\"name\"]}\n{\"u\":1,\"F\":[\"role\",\"constraint\"]}\n").unwrap();
        assert_eq!(t.form(), TraceForm::Activation);
        let acts = t.activations(&identity()).unwrap();
        assert_eq!(acts[0].active, IngredientSet::from_indices([0]));
        assert_eq!(acts[1].active, IngredientSet::from_indices([1, 2]));
        assert_eq!(acts[1].step, 1);
    }

    #[test]
    fn full_state_form() {
        let text = concat!(
            "{\"u\":0,\"C\":[\"Alice\",\"hi\"],\"M\":{\"role\":\"analyst\"},\"pi\":[1],\"D\":[]}\n",
            "{\"u\":1,\"C\":[\"hi\"],\"M\":{},\"pi\":[0],\"D\":[]}\n",
        );
        let t = parse_trace(text).unwrap();
        let acts = t.activations(&identity()).unwrap();
        assert!(acts[0].is_full(3));
        assert!(acts[1].is_empty());
        assert_eq!(parse_trace(&write_states(match &t {
            Trace::States(s) => s,
            _ => unreachable!(),
        }))
        .unwrap(), t);
    }

    #[test]
    fn unknown_ingredient_is_reported_with_line() {
        let t = parse_trace("{\"u\":0,\"F\":[]}\n{\"u\":1,\"F\":[\"mood\"]}\n").unwrap();
        assert!(matches!(t.activations(&identity()), Err(Error::Format { line: 2, .. })));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_trace(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_trace("\n  \n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_trace("{\"u\":0,\"F\":[]}\nnot json\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_trace("[1,2]"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_trace("{\"u\":0,\"F\":[],\"x\":1}"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_trace("{\"u\":0,\"F\":[]}\n{\"u\":2,\"F\":[]}\n"),
            Err(Error::Sequence { line: 2, expected: 1, got: 2 })
        ));
        assert!(matches!(
            parse_trace("{\"u\":1,\"F\":[]}\n"),
            Err(Error::Sequence { line: 1, expected: 0, got: 1 })
        ));
        assert!(matches!(
            parse_trace("{\"u\":0,\"F\":[]}\n{\"u\":1,\"C\":[]}\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(parse_trace("{\"u\":0,\"C\":[],\"pi\":[2]}"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_trace("{\"u\":0,\"C\":[],\"pi\":[1]}\n{\"u\":1,\"C\":[],\"pi\":[1,0]}\n"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn activation_round_trip() {
        let id = identity();
        let acts = crate::activation::sequence_from_indices(vec![vec![0, 2], vec![], vec![0, 1, 2]]);
        let text = write_activations(&acts, &id);
        assert_eq!(parse_trace(&text).unwrap().activations(&id).unwrap(), acts);
    }
}

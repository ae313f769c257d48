//! Deterministic scaffold simulator.
//!
//! A preset fixes the context capacity, a pinned prefix that is never
//! evicted, the retrieval policy, and whether memory and controller flags
//! persist. [`step`] applies one action; [`run`] folds a script.

mod presets;
mod scenarios;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::identity::{ScaffoldArchitecture, ScaffoldState};

pub use presets::{probe_identity, probe_script, probe_window, PresetKind};
pub use scenarios::{
    alternating, capacity_limited, drift_recover, noncommutation, rag_displacement, worked_example,
    DriftRecovery, RagScenario, Scenario,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// Model call; the query tokens are appended to the context.
    Infer(Vec<String>),
    /// Retrieval by query; matching documents are injected into the context.
    Retrieve(String),
    /// Memory write.
    Store { key: String, value: String },
    /// Tool call. `set_flag i` and `clear_flag i` touch policy flags; other tools have no effect.
    Tool { name: String, args: Vec<String> },
}

impl Action {
    pub fn infer<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Action::Infer(tokens.into_iter().map(Into::into).collect())
    }

    pub fn retrieve(query: impl Into<String>) -> Self {
        Action::Retrieve(query.into())
    }

    pub fn store(key: impl Into<String>, value: impl Into<String>) -> Self {
        Action::Store {
            key: key.into(),
            value: value.into(),
        }
    }

    pub fn tool(name: impl Into<String>, args: &[&str]) -> Self {
        Action::Tool {
            name: name.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn noop() -> Self {
        Action::tool("respond", &[])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetrievalMode {
    None,
    /// The query names an ingredient; its document is retrieved.
    IdentityAware,
    /// Every document containing one of the query's tokens is retrieved.
    QueryDriven,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetrievalPolicy {
    pub mode: RetrievalMode,
    pub ingredient_docs: BTreeMap<String, String>,
    /// Document id to the tokens it injects.
    pub documents: BTreeMap<String, Vec<String>>,
}

impl RetrievalPolicy {
    pub fn none() -> Self {
        Self {
            mode: RetrievalMode::None,
            ingredient_docs: BTreeMap::new(),
            documents: BTreeMap::new(),
        }
    }

    pub fn injected_length(&self, doc: &str) -> Option<usize> {
        self.documents.get(doc).map(Vec::len)
    }

    /// Identity-aware policies must name an existing document for every ingredient.
    pub fn check_covers<'a, I: IntoIterator<Item = &'a str>>(&self, ingredient_ids: I) -> Result<()> {
        if self.mode != RetrievalMode::IdentityAware {
            return Ok(());
        }
        for id in ingredient_ids {
            match self.ingredient_docs.get(id) {
                Some(doc) if self.documents.contains_key(doc) => {}
                _ => {
                    return Err(Error::structural(format!(
                        "identity-aware retrieval has no document for ingredient `{id}`"
                    )))
                }
            }
        }
        Ok(())
    }

    fn retrieve(&self, query: &str) -> Vec<&str> {
        match self.mode {
            RetrievalMode::None => Vec::new(),
            RetrievalMode::IdentityAware => self
                .ingredient_docs
                .get(query)
                .filter(|d| self.documents.contains_key(*d))
                .map(|d| vec![d.as_str()])
                .unwrap_or_default(),
            RetrievalMode::QueryDriven => {
                let terms: BTreeSet<&str> = query.split_whitespace().collect();
                self.documents
                    .iter()
                    .filter(|(_, toks)| toks.iter().any(|t| terms.contains(t.as_str())))
                    .map(|(id, _)| id.as_str())
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryMode {
    /// Writes are rejected.
    Disabled,
    /// Writes are accepted but nothing survives into the next state.
    Volatile,
    Persistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchitecturePreset {
    pub kind: PresetKind,
    pub context_capacity: usize,
    /// Leading context tokens that eviction never touches.
    pub pinned_prefix: Vec<String>,
    /// Evictable tokens present in the initial context after the pinned prefix.
    pub preamble: Vec<String>,
    pub retrieval: RetrievalPolicy,
    pub memory: MemoryMode,
    pub controller_flags_enabled: bool,
    pub n_policy_flags: usize,
}

impl ArchitecturePreset {
    pub fn architecture(&self) -> ScaffoldArchitecture {
        ScaffoldArchitecture {
            token_alphabet_id: "sim".into(),
            memory_key_space_id: "sim".into(),
            n_policy_flags: self.n_policy_flags,
            context_capacity: self.context_capacity.max(1),
            corpus: self.retrieval.documents.keys().cloned().collect(),
        }
    }

    pub fn initial_state(&self) -> Result<ScaffoldState> {
        let context: Vec<String> = self.pinned_prefix.iter().chain(&self.preamble).cloned().collect();
        let state = ScaffoldState {
            context,
            memory: BTreeMap::new(),
            policy_flags: vec![false; self.n_policy_flags],
            retrieved: BTreeSet::new(),
            step: 0,
        };
        self.architecture().check_state(&state)?;
        Ok(state)
    }

    /// Appends tokens, evicting the oldest non-pinned tokens beyond capacity.
    fn append(&self, context: &mut Vec<String>, tokens: impl IntoIterator<Item = String>) -> Result<()> {
        let before = context.len();
        context.extend(tokens);
        if context.len() == before {
            return Ok(());
        }
        let pinned = self.pinned_prefix.len();
        if pinned >= self.context_capacity {
            return Err(Error::Capacity(format!(
                "pinned prefix of {pinned} tokens leaves no room in a context of {}",
                self.context_capacity
            )));
        }
        if context.len() > self.context_capacity {
            let excess = context.len() - self.context_capacity;
            context.drain(pinned..pinned + excess);
        }
        Ok(())
    }
}

/// Applies one action. The result has `step = state.step + 1`.
pub fn step(state: &ScaffoldState, action: &Action, preset: &ArchitecturePreset) -> Result<ScaffoldState> {
    if !state.context.starts_with(&preset.pinned_prefix) {
        return Err(Error::structural("context does not start with the preset's pinned prefix"));
    }
    let mut next = state.clone();
    next.step = state.step + 1;
    if preset.memory == MemoryMode::Volatile {
        next.memory.clear();
    }
    match action {
        Action::Infer(tokens) => preset.append(&mut next.context, tokens.iter().cloned())?,
        Action::Retrieve(query) => {
            let docs = preset.retrieval.retrieve(query);
            next.retrieved = docs.iter().map(|d| d.to_string()).collect();
            let mut injected: Vec<String> = docs
                .iter()
                .flat_map(|d| preset.retrieval.documents[*d].iter().cloned())
                .collect();
            if preset.memory == MemoryMode::Persistent {
                if let Some(value) = next.memory.get(query) {
                    injected.extend(value.split_whitespace().map(str::to_string));
                }
            }
            preset.append(&mut next.context, injected)?;
        }
        Action::Store { key, value } => match preset.memory {
            MemoryMode::Disabled => {
                return Err(Error::Feature(format!("{} preset has no memory store", preset.kind)));
            }
            MemoryMode::Volatile => {}
            MemoryMode::Persistent => {
                next.memory.insert(key.clone(), value.clone());
            }
        },
        Action::Tool { name, args } => {
            let value = match name.as_str() {
                "set_flag" => Some(true),
                "clear_flag" => Some(false),
                _ => None,
            };
            if let Some(value) = value {
                let index: usize = args
                    .first()
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| Error::structural(format!("{name} needs a flag index argument")))?;
                if index >= preset.n_policy_flags {
                    return Err(Error::structural(format!(
                        "flag {index} out of range for {} flags",
                        preset.n_policy_flags
                    )));
                }
                if preset.controller_flags_enabled {
                    next.policy_flags[index] = value;
                }
            }
        }
    }
    Ok(next)
}

/// Folds `step` over `script`, returning every state including `initial`.
pub fn run(preset: &ArchitecturePreset, script: &[Action], initial: ScaffoldState) -> Result<Vec<ScaffoldState>> {
    if script.is_empty() {
        return Err(Error::parameter("script is empty"));
    }
    let arch = preset.architecture();
    arch.check_state(&initial)?;
    let mut states = Vec::with_capacity(script.len() + 1);
    states.push(initial);
    for (index, action) in script.iter().enumerate() {
        let next = step(states.last().expect("non-empty"), action, preset).map_err(|e| Error::Step {
            index,
            source: Box::new(e),
        })?;
        states.push(next);
    }
    Ok(states)
}

/// A simulated run together with the architecture it is consistent with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub architecture: ScaffoldArchitecture,
    pub states: Vec<ScaffoldState>,
}

impl Trajectory {
    pub fn simulate(preset: &ArchitecturePreset, script: &[Action], initial: ScaffoldState) -> Result<Self> {
        Ok(Self {
            architecture: preset.architecture(),
            states: run(preset, script, initial)?,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::parameter(format!("unknown preset `{s}`")))
    }
}

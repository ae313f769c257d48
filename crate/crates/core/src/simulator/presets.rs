//! The five reference architectures and the probe used to compare them.
//!
//! All presets share a context of 8 tokens and the probe identity
//! `name ∧ role ∧ constraint`, realised by the tokens `Alice`, `analyst` and
//! `privacy`. They differ in how those tokens reach the context:
//!
//! | preset     | pinned                   | preamble          | retrieval      | memory     | flags |
//! |------------|--------------------------|-------------------|----------------|------------|-------|
//! | stateless  | none                     | none              | none           | volatile   | off   |
//! | prompted   | `Alice`                  | analyst, privacy  | none           | volatile   | off   |
//! | rag        | `Alice`                  | analyst, privacy  | identity-aware | volatile   | off   |
//! | memory     | `Alice`                  | analyst, privacy  | none           | persistent | off   |
//! | controller | `Alice analyst privacy`  | none              | none           | persistent | on    |

use std::collections::BTreeMap;

use crate::error::Result;
use crate::identity::GroundedIdentity;
use crate::simulator::{Action, ArchitecturePreset, MemoryMode, RetrievalMode, RetrievalPolicy};
use crate::window::{EvalSelector, WindowConfig};

const PROBE_CAPACITY: usize = 8;
const PASSAGE_TOKENS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetKind {
    Stateless,
    Prompted,
    Rag,
    Memory,
    Controller,
}

impl PresetKind {
    pub const ALL: [PresetKind; 5] = [
        PresetKind::Stateless,
        PresetKind::Prompted,
        PresetKind::Rag,
        PresetKind::Memory,
        PresetKind::Controller,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Stateless => "stateless",
            PresetKind::Prompted => "prompted",
            PresetKind::Rag => "rag",
            PresetKind::Memory => "memory",
            PresetKind::Controller => "controller",
        }
    }

    pub fn preset(self) -> ArchitecturePreset {
        let persona = |pinned: &[&str], preamble: &[&str]| {
            (
                pinned.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                preamble.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            )
        };
        let (pinned_prefix, preamble) = match self {
            PresetKind::Stateless => persona(&[], &[]),
            PresetKind::Controller => persona(&["Alice", "analyst", "privacy"], &[]),
            _ => persona(&["Alice"], &["analyst", "privacy"]),
        };
        let retrieval = match self {
            PresetKind::Rag => identity_docs(),
            _ => RetrievalPolicy::none(),
        };
        let memory = match self {
            PresetKind::Memory | PresetKind::Controller => MemoryMode::Persistent,
            _ => MemoryMode::Volatile,
        };
        ArchitecturePreset {
            kind: self,
            context_capacity: PROBE_CAPACITY,
            pinned_prefix,
            preamble,
            retrieval,
            memory,
            controller_flags_enabled: self == PresetKind::Controller,
            n_policy_flags: 1,
        }
    }
}

/// One document per probe ingredient: its token followed by a filler passage.
fn identity_docs() -> RetrievalPolicy {
    let mut ingredient_docs = BTreeMap::new();
    let mut documents = BTreeMap::new();
    for (id, token) in [("name", "Alice"), ("role", "analyst"), ("constraint", "privacy")] {
        let doc = format!("doc-{id}");
        let mut tokens = vec![token.to_string()];
        tokens.extend((0..PASSAGE_TOKENS).map(|i| format!("passage-{id}-{i}")));
        ingredient_docs.insert(id.to_string(), doc.clone());
        documents.insert(doc, tokens);
    }
    RetrievalPolicy {
        mode: RetrievalMode::IdentityAware,
        ingredient_docs,
        documents,
    }
}

pub fn probe_identity() -> GroundedIdentity {
    use crate::identity::IngredientSpec;
    GroundedIdentity::new(vec![
        IngredientSpec::context("name", ["Alice"]),
        IngredientSpec::context("role", ["analyst"]),
        IngredientSpec::context("constraint", ["privacy"]),
    ])
    .expect("probe identity is well-formed")
}

/// Two memory writes and a flag set, then `turns` rounds of
/// user input, role lookup, constraint lookup, and a reply.
pub fn probe_script(turns: usize) -> Vec<Action> {
    let mut script = vec![
        Action::store("role", "analyst"),
        Action::store("constraint", "privacy"),
        Action::tool("set_flag", &["0"]),
    ];
    for j in 0..turns {
        script.push(Action::infer([format!("user-{j}-a"), format!("user-{j}-b")]));
        script.push(Action::retrieve("role"));
        script.push(Action::retrieve("constraint"));
        script.push(Action::infer([format!("reply-{j}")]));
    }
    script
}

/// Horizon 3 covers one full probe turn.
pub fn probe_window(len: usize) -> Result<WindowConfig> {
    WindowConfig::resolve(3, 1, &EvalSelector::AllValid, 16, len)
}

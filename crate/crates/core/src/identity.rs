//! Scaffold architectures, scaffold states, and grounded identities.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};

/// Static description of a scaffold: token and key spaces, flag count,
/// context capacity and the retrievable corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaffoldArchitecture {
    pub token_alphabet_id: String,
    pub memory_key_space_id: String,
    pub n_policy_flags: usize,
    pub context_capacity: usize,
    pub corpus: BTreeSet<String>,
}

impl ScaffoldArchitecture {
    pub fn new(
        n_policy_flags: usize,
        context_capacity: usize,
        corpus: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        if context_capacity == 0 {
            return Err(Error::structural("context capacity must be at least 1"));
        }
        Ok(Self {
            token_alphabet_id: "tokens".into(),
            memory_key_space_id: "keys".into(),
            n_policy_flags,
            context_capacity,
            corpus: corpus.into_iter().collect(),
        })
    }

    /// Smallest architecture every given state is consistent with.
    ///
    /// Used for logged traces that carry no architecture description.
    pub fn inferred_from(states: &[ScaffoldState]) -> Self {
        let n_policy_flags = states.iter().map(|s| s.policy_flags.len()).max().unwrap_or(0);
        let context_capacity = states.iter().map(|s| s.context.len()).max().unwrap_or(0).max(1);
        let corpus = states.iter().flat_map(|s| s.retrieved.iter().cloned()).collect();
        Self {
            token_alphabet_id: "logged".into(),
            memory_key_space_id: "logged".into(),
            n_policy_flags,
            context_capacity,
            corpus,
        }
    }

    pub fn check_state(&self, state: &ScaffoldState) -> Result<()> {
        if state.context.len() > self.context_capacity {
            return Err(Error::structural(format!(
                "step {}: context holds {} tokens, capacity is {}",
                state.step,
                state.context.len(),
                self.context_capacity
            )));
        }
        if state.policy_flags.len() != self.n_policy_flags {
            return Err(Error::structural(format!(
                "step {}: {} policy flags, architecture declares {}",
                state.step,
                state.policy_flags.len(),
                self.n_policy_flags
            )));
        }
        if let Some(doc) = state.retrieved.iter().find(|d| !self.corpus.contains(*d)) {
            return Err(Error::structural(format!(
                "step {}: retrieved document `{doc}` is not in the corpus",
                state.step
            )));
        }
        Ok(())
    }
}

/// One objective-time snapshot of everything visible to the model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScaffoldState {
    pub context: Vec<String>,
    pub memory: BTreeMap<String, String>,
    pub policy_flags: Vec<bool>,
    pub retrieved: BTreeSet<String>,
    pub step: usize,
}

impl ScaffoldState {
    pub fn with_context<I, S>(step: usize, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            context: tokens.into_iter().map(Into::into).collect(),
            step,
            ..Default::default()
        }
    }
}

/// The concrete activation clause of one ingredient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IngredientKind {
    /// Token pattern that must appear contiguously in the context.
    Context { pattern: Vec<String> },
    /// Exact key/value pair in the memory store.
    Memory { key: String, value: String },
    /// Policy flag that must be set.
    Policy { flag: usize },
    /// Document that must be among the retrieved set.
    Retrieval { doc: String },
}

impl IngredientKind {
    pub fn name(&self) -> &'static str {
        match self {
            IngredientKind::Context { .. } => "context",
            IngredientKind::Memory { .. } => "memory",
            IngredientKind::Policy { .. } => "policy",
            IngredientKind::Retrieval { .. } => "retrieval",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngredientSpec {
    pub id: String,
    pub kind: IngredientKind,
}

impl IngredientSpec {
    pub fn context<I, S>(id: impl Into<String>, pattern: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            id: id.into(),
            kind: IngredientKind::Context {
                pattern: pattern.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn memory(id: impl Into<String>, key: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: IngredientKind::Memory {
                key: key.into(),
                value: value.into(),
            },
        }
    }

    pub fn policy(id: impl Into<String>, flag: usize) -> Self {
        Self {
            id: id.into(),
            kind: IngredientKind::Policy { flag },
        }
    }

    pub fn retrieval(id: impl Into<String>, doc: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: IngredientKind::Retrieval { doc: doc.into() },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::structural("ingredient id must be non-empty"));
        }
        if let IngredientKind::Context { pattern } = &self.kind {
            if pattern.is_empty() {
                return Err(Error::structural(format!(
                    "context ingredient `{}` has an empty pattern",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// Decides whether a single ingredient's clause holds in `state`.
pub fn evaluate_ingredient(
    state: &ScaffoldState,
    spec: &IngredientSpec,
    arch: &ScaffoldArchitecture,
) -> Result<bool> {
    Ok(match &spec.kind {
        IngredientKind::Context { pattern } => {
            if pattern.is_empty() {
                return Err(Error::structural(format!(
                    "context ingredient `{}` has an empty pattern",
                    spec.id
                )));
            }
            contains_run(&state.context, pattern)
        }
        IngredientKind::Memory { key, value } => state.memory.get(key) == Some(value),
        IngredientKind::Policy { flag } => {
            if *flag >= arch.n_policy_flags {
                return Err(Error::structural(format!(
                    "ingredient `{}` reads flag {flag}, architecture has {}",
                    spec.id, arch.n_policy_flags
                )));
            }
            state.policy_flags.get(*flag).copied().unwrap_or(false)
        }
        IngredientKind::Retrieval { doc } => state.retrieved.contains(doc),
    })
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    needle.len() <= haystack.len() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// The grounded conjunction `g1 ∧ … ∧ gk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundedIdentity {
    ingredients: Vec<IngredientSpec>,
    index: HashMap<String, usize>,
}

impl GroundedIdentity {
    pub fn new(ingredients: Vec<IngredientSpec>) -> Result<Self> {
        if ingredients.is_empty() {
            return Err(Error::structural("a grounded identity needs at least one ingredient"));
        }
        let mut index = HashMap::with_capacity(ingredients.len());
        for (i, spec) in ingredients.iter().enumerate() {
            spec.validate()?;
            if index.insert(spec.id.clone(), i).is_some() {
                return Err(Error::structural(format!("duplicate ingredient id `{}`", spec.id)));
            }
        }
        Ok(Self { ingredients, index })
    }

    /// Identity of `k` context ingredients, the i-th matching the single token `ids[i]`.
    pub fn from_tokens<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            ids.into_iter()
                .map(|id| {
                    let id = id.into();
                    IngredientSpec::context(id.clone(), [id])
                })
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.ingredients.len()
    }

    pub fn ingredients(&self) -> &[IngredientSpec] {
        &self.ingredients
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id_at(&self, index: usize) -> Option<&str> {
        self.ingredients.get(index).map(|s| s.id.as_str())
    }

    /// Positions for a list of ingredient ids.
    pub fn indices_of<'a, I>(&self, ids: I) -> Result<IngredientSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        ids.into_iter()
            .map(|id| {
                self.index_of(id)
                    .ok_or_else(|| Error::structural(format!("unknown ingredient id `{id}`")))
            })
            .collect()
    }

    pub fn ids_of<'a>(&'a self, set: &'a IngredientSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().filter_map(|i| self.id_at(i))
    }

    pub fn full_set(&self) -> IngredientSet {
        IngredientSet::full(self.k())
    }
}

/// `F(s)`: the set of ingredients active in `state`.
pub fn activation_set(
    state: &ScaffoldState,
    identity: &GroundedIdentity,
    arch: &ScaffoldArchitecture,
) -> Result<ActivationSet> {
    let mut active = IngredientSet::new();
    for (i, spec) in identity.ingredients().iter().enumerate() {
        if evaluate_ingredient(state, spec, arch)? {
            active.insert(i);
        }
    }
    Ok(ActivationSet::new(state.step, active))
}

/// Activation sets for a whole trajectory, in step order.
pub fn activation_sequence(
    states: &[ScaffoldState],
    identity: &GroundedIdentity,
    arch: &ScaffoldArchitecture,
) -> Result<Vec<ActivationSet>> {
    states.iter().map(|s| activation_set(s, identity, arch)).collect()
}

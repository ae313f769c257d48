//! Constructive scenarios: each builds the trajectory used by one of the
//! occurrence / co-instantiation results, together with the window it is
//! evaluated under.

use std::collections::BTreeMap;

use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};
use crate::identity::{activation_sequence, GroundedIdentity};
use crate::metrics::persistence;
use crate::simulator::{
    Action, ArchitecturePreset, MemoryMode, PresetKind, RetrievalMode, RetrievalPolicy, Trajectory,
};
use crate::window::{EvalSelector, WindowConfig};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub trajectory: Trajectory,
    pub identity: GroundedIdentity,
    pub window: WindowConfig,
}

impl Scenario {
    pub fn activations(&self) -> Result<Vec<ActivationSet>> {
        activation_sequence(&self.trajectory.states, &self.identity, &self.trajectory.architecture)
    }
}

/// Context-only preset with no pinned tokens and nothing else enabled.
fn plain(capacity: usize, preamble: Vec<String>) -> ArchitecturePreset {
    ArchitecturePreset {
        kind: PresetKind::Stateless,
        context_capacity: capacity,
        pinned_prefix: vec![],
        preamble,
        retrieval: RetrievalPolicy::none(),
        memory: MemoryMode::Volatile,
        controller_flags_enabled: false,
        n_policy_flags: 0,
    }
}

/// Single-token context whose token at step `u` is `tokens[u]`.
fn token_sequence(tokens: &[String]) -> Result<Trajectory> {
    let preset = plain(1, vec![tokens[0].clone()]);
    let script: Vec<Action> = tokens[1..].iter().map(|t| Action::infer([t.clone()])).collect();
    Trajectory::simulate(&preset, &script, preset.initial_state()?)
}

/// Two steps: `p` alone, then `q` alone; horizon 1, `T = {0}`.
pub fn noncommutation() -> Result<Scenario> {
    let identity = GroundedIdentity::from_tokens(["p", "q"])?;
    Ok(Scenario {
        trajectory: token_sequence(&["p".into(), "q".into()])?,
        identity,
        window: WindowConfig::new(1, 1, vec![0], 1)?,
    })
}

/// `g1` on even steps, `g2` on odd steps; horizon 1 over every valid window.
pub fn alternating(length: usize) -> Result<Scenario> {
    if length < 2 {
        return Err(Error::parameter("alternating trace needs at least 2 steps"));
    }
    let tokens: Vec<String> = (0..length).map(|u| if u % 2 == 0 { "g1" } else { "g2" }.into()).collect();
    Ok(Scenario {
        trajectory: token_sequence(&tokens)?,
        identity: GroundedIdentity::from_tokens(["g1", "g2"])?,
        window: WindowConfig::resolve(1, 1, &EvalSelector::AllValid, 8, length)?,
    })
}

/// Name, role and constraint each active at exactly one of three steps; horizon 2, `T = {0}`.
pub fn worked_example() -> Result<Scenario> {
    let tokens: Vec<String> = ["Alice", "analyst", "privacy"].iter().map(|s| s.to_string()).collect();
    let identity = GroundedIdentity::new(vec![
        crate::identity::IngredientSpec::context("name", ["Alice"]),
        crate::identity::IngredientSpec::context("role", ["analyst"]),
        crate::identity::IngredientSpec::context("constraint", ["privacy"]),
    ])?;
    Ok(Scenario {
        trajectory: token_sequence(&tokens)?,
        identity,
        window: WindowConfig::new(2, 1, vec![0], 8)?,
    })
}

/// A context of `c` tokens cycling through `k > c` single-token ingredients.
///
/// Every state holds exactly `c` consecutive ingredients, so no step can
/// carry the full conjunction. The window horizon `k - c` is the smallest
/// at which every ingredient still occurs.
pub fn capacity_limited(c: usize, k: usize, length: usize) -> Result<Scenario> {
    if c >= k {
        return Err(Error::parameter(format!("capacity {c} must be below ingredient count {k}")));
    }
    if c == 0 {
        return Err(Error::parameter("capacity must be at least 1"));
    }
    if length < 2 {
        return Err(Error::parameter("capacity scenario needs at least 2 steps"));
    }
    let ids: Vec<String> = (0..k).map(|i| format!("g{}", i + 1)).collect();
    let preset = plain(c, ids[..c].to_vec());
    let script: Vec<Action> = (0..length - 1).map(|j| Action::infer([ids[(c + j) % k].clone()])).collect();
    let trajectory = Trajectory::simulate(&preset, &script, preset.initial_state()?)?;
    Ok(Scenario {
        trajectory,
        identity: GroundedIdentity::from_tokens(ids)?,
        window: WindowConfig::resolve(k - c, 1, &EvalSelector::AllValid, 2 * k, length)?,
    })
}

#[derive(Clone, Debug)]
pub struct RagScenario {
    pub without: Trajectory,
    pub with: Trajectory,
    pub identity: GroundedIdentity,
    pub window: WindowConfig,
}

pub const RAG_TURNS: usize = 24;

/// Identity block of `block` tokens held in an unpinned context of `capacity`
/// tokens. The baseline agent answers without retrieval and keeps the block.
/// The augmented agent retrieves, in rotation, one identity-aware document per
/// ingredient: the ingredient's token followed by `passage` filler tokens.
///
/// A passage of 0 is a control with no displacement. Otherwise the passage
/// must overflow the free capacity and the result must show a strict drop
/// in strong persistence, or the parameters are rejected.
pub fn rag_displacement(block: usize, passage: usize, capacity: usize) -> Result<RagScenario> {
    if block < 2 {
        return Err(Error::Scenario("identity block needs at least 2 ingredients".into()));
    }
    if capacity < block {
        return Err(Error::Scenario(format!(
            "identity block of {block} tokens does not fit a context of {capacity}"
        )));
    }
    if passage > 0 && passage <= capacity - block {
        return Err(Error::Scenario(format!(
            "passage of {passage} tokens fits the {} free tokens and cannot displace the block",
            capacity - block
        )));
    }
    if passage + 1 > capacity {
        return Err(Error::Scenario(format!(
            "passage of {passage} tokens evicts its own ingredient token from a context of {capacity}"
        )));
    }

    let ids: Vec<String> = (0..block).map(|i| format!("id{i}")).collect();
    let identity = GroundedIdentity::from_tokens(ids.clone())?;

    let baseline = plain(capacity, ids.clone());
    let without = Trajectory::simulate(&baseline, &vec![Action::noop(); RAG_TURNS], baseline.initial_state()?)?;

    let mut ingredient_docs = BTreeMap::new();
    let mut documents = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let doc = format!("doc-{id}");
        let mut tokens = vec![id.clone()];
        tokens.extend((0..passage).map(|j| format!("passage-{i}-{j}")));
        ingredient_docs.insert(id.clone(), doc.clone());
        documents.insert(doc, tokens);
    }
    let mut augmented = baseline.clone();
    augmented.kind = PresetKind::Rag;
    augmented.retrieval = RetrievalPolicy {
        mode: RetrievalMode::IdentityAware,
        ingredient_docs,
        documents,
    };
    augmented.retrieval.check_covers(ids.iter().map(String::as_str))?;
    let script: Vec<Action> = (0..RAG_TURNS).map(|j| Action::retrieve(ids[j % block].clone())).collect();
    let with = Trajectory::simulate(&augmented, &script, augmented.initial_state()?)?;

    let window = WindowConfig::resolve(block - 1, 1, &EvalSelector::AllValid, 4 * block, RAG_TURNS + 1)?;
    let scenario = RagScenario {
        without,
        with,
        identity,
        window,
    };
    if passage > 0 {
        let strong = |t: &Trajectory| -> Result<f64> {
            let acts = activation_sequence(&t.states, &scenario.identity, &t.architecture)?;
            Ok(persistence(&acts, &scenario.identity, &scenario.window)?.p_strong)
        };
        if strong(&scenario.with)? >= strong(&scenario.without)? {
            return Err(Error::Scenario(format!(
                "block {block}, passage {passage}, capacity {capacity} do not break co-instantiation"
            )));
        }
    }
    Ok(scenario)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftRecovery {
    pub reference: ActivationSet,
    pub drifted: ActivationSet,
    pub recovered: ActivationSet,
    /// Ingredients corrected, one per intervention.
    pub corrected: Vec<usize>,
}

/// Drifts from `reference` to `drifted`, then applies up to `interventions`
/// corrective steps. Each step flips one ingredient of `controllable` that
/// still differs from the reference, in ascending order.
pub fn drift_recover(
    reference: &IngredientSet,
    drifted: &IngredientSet,
    controllable: &IngredientSet,
    interventions: usize,
) -> Result<DriftRecovery> {
    let corrected: Vec<usize> = reference
        .symmetric_difference(drifted)
        .iter()
        .filter(|i| controllable.contains(*i))
        .take(interventions)
        .collect();
    let mut recovered = drifted.clone();
    for &i in &corrected {
        if reference.contains(i) {
            recovered.insert(i);
        } else {
            recovered.remove(i);
        }
    }
    Ok(DriftRecovery {
        reference: ActivationSet::new(0, reference.clone()),
        drifted: ActivationSet::new(1, drifted.clone()),
        recovered: ActivationSet::new(2 + interventions, recovered),
        corrected,
    })
}

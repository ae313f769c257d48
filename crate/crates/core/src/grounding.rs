//! Layered identity statements and their grounding to layer-0 ingredients.
//!
//! Layer 2 holds narrative predicates, layer 1 functional predicates, and
//! layer 0 the ingredient ids of a [`GroundedIdentity`]. A statement is a
//! conjunction of labels at one layer; grounding it yields the union of the
//! ingredient requirements of its conjuncts.

use std::collections::{BTreeMap, BTreeSet};

use crate::activation::ActivationSet;
use crate::error::{Error, Result};
use crate::identity::GroundedIdentity;

pub type Conjunction = BTreeSet<String>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayeredIdentitySpec {
    pub layer2: Vec<String>,
    pub layer1: Vec<String>,
    pub map_2_to_1: BTreeMap<String, Vec<String>>,
    pub map_1_to_0: BTreeMap<String, Vec<String>>,
    pub map_2_to_0: BTreeMap<String, Vec<String>>,
}

impl LayeredIdentitySpec {
    /// Checks every reference against the declared labels and `identity`.
    pub fn validate(&self, identity: &GroundedIdentity) -> Result<()> {
        let layer1: BTreeSet<&str> = self.layer1.iter().map(String::as_str).collect();
        let layer2: BTreeSet<&str> = self.layer2.iter().map(String::as_str).collect();
        for (label, targets) in &self.map_2_to_1 {
            if !layer2.contains(label.as_str()) {
                return Err(Error::Lookup { label: label.clone(), layer: 2 });
            }
            if let Some(t) = targets.iter().find(|t| !layer1.contains(t.as_str())) {
                return Err(Error::Lookup { label: t.clone(), layer: 1 });
            }
        }
        for (label, ids) in &self.map_1_to_0 {
            if !layer1.contains(label.as_str()) {
                return Err(Error::Lookup { label: label.clone(), layer: 1 });
            }
            check_ids(identity, ids)?;
        }
        for (label, ids) in &self.map_2_to_0 {
            if !layer2.contains(label.as_str()) {
                return Err(Error::Lookup { label: label.clone(), layer: 2 });
            }
            check_ids(identity, ids)?;
        }
        Ok(())
    }

    /// Builds `map_2_to_0` by composing the two single-layer maps.
    pub fn compose_2_to_0(&self) -> Result<BTreeMap<String, Vec<String>>> {
        self.layer2
            .iter()
            .map(|label| {
                let composed = self.composed(label)?;
                Ok((label.clone(), composed.into_iter().collect()))
            })
            .collect()
    }

    fn composed(&self, label: &str) -> Result<Conjunction> {
        let mids = self.map_2_to_1.get(label).ok_or_else(|| Error::Lookup {
            label: label.to_string(),
            layer: 2,
        })?;
        let mut out = Conjunction::new();
        for mid in mids {
            out.extend(lookup(&self.map_1_to_0, mid, 1)?.iter().cloned());
        }
        Ok(out)
    }
}

fn check_ids(identity: &GroundedIdentity, ids: &[String]) -> Result<()> {
    match ids.iter().find(|id| identity.index_of(id).is_none()) {
        Some(id) => Err(Error::Lookup { label: id.clone(), layer: 0 }),
        None => Ok(()),
    }
}

fn lookup<'a>(map: &'a BTreeMap<String, Vec<String>>, label: &str, layer: u8) -> Result<&'a [String]> {
    map.get(label).map(Vec::as_slice).ok_or_else(|| Error::Lookup {
        label: label.to_string(),
        layer,
    })
}

/// Grounds a layer-`layer` conjunction to its set of ingredient ids.
///
/// Layer 2 statements use the declared direct map; use
/// [`check_compositionality`] to confirm it agrees with the two-step route.
pub fn ground<S: AsRef<str>>(statement: &[S], spec: &LayeredIdentitySpec, layer: u8) -> Result<Conjunction> {
    let (declared, map) = match layer {
        1 => (&spec.layer1, &spec.map_1_to_0),
        2 => (&spec.layer2, &spec.map_2_to_0),
        _ => return Err(Error::structural(format!("cannot ground from layer {layer}"))),
    };
    let mut out = Conjunction::new();
    for label in statement {
        let label = label.as_ref();
        if !declared.iter().any(|d| d == label) {
            return Err(Error::Lookup { label: label.to_string(), layer });
        }
        out.extend(lookup(map, label, layer)?.iter().cloned());
    }
    Ok(out)
}

/// Layer-2 labels whose declared grounding differs from the composed one.
pub fn check_compositionality(spec: &LayeredIdentitySpec) -> Vec<String> {
    spec.layer2
        .iter()
        .filter(|label| {
            let declared: Option<Conjunction> =
                spec.map_2_to_0.get(label.as_str()).map(|ids| ids.iter().cloned().collect());
            match (declared, spec.composed(label)) {
                (Some(d), Ok(c)) => d != c,
                _ => true,
            }
        })
        .cloned()
        .collect()
}

/// Steps where the layer-`layer` statement is endorsed but its grounded
/// conjunction is not fully active.
///
/// `endorsed[u]` is the externally supplied judgement that the statement holds at step `u`.
pub fn detect_grounding_failures<S: AsRef<str>>(
    activations: &[ActivationSet],
    statement: &[S],
    layer: u8,
    endorsed: &[bool],
    identity: &GroundedIdentity,
    spec: &LayeredIdentitySpec,
) -> Result<Vec<usize>> {
    if endorsed.len() != activations.len() {
        return Err(Error::structural(format!(
            "evaluator series has {} entries, trajectory has {} steps",
            endorsed.len(),
            activations.len()
        )));
    }
    let grounded = ground(statement, spec, layer)?;
    let required = identity.indices_of(grounded.iter().map(String::as_str))?;
    Ok(activations
        .iter()
        .zip(endorsed)
        .filter(|(f, &holds)| holds && !required.is_subset(&f.active))
        .map(|(f, _)| f.step)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::sequence_from_indices;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn identity() -> GroundedIdentity {
        GroundedIdentity::from_tokens(["g1", "g2", "g3", "g4"]).unwrap()
    }

    /// Three layer-2 labels routed through three layer-1 labels.
    fn fixture() -> LayeredIdentitySpec {
        let mut spec = LayeredIdentitySpec {
            layer2: strings(&["analyst", "private", "helpful"]),
            layer1: strings(&["reports", "redacts", "answers"]),
            ..Default::default()
        };
        spec.map_2_to_1.insert("analyst".into(), strings(&["reports", "answers"]));
        spec.map_2_to_1.insert("private".into(), strings(&["redacts"]));
        spec.map_2_to_1.insert("helpful".into(), strings(&["answers"]));
        spec.map_1_to_0.insert("reports".into(), strings(&["g1", "g2"]));
        spec.map_1_to_0.insert("redacts".into(), strings(&["g3"]));
        spec.map_1_to_0.insert("answers".into(), strings(&["g2", "g4"]));
        // Composed by hand: analyst → {g1,g2,g4}, private → {g3}, helpful → {g2,g4}.
        spec.map_2_to_0.insert("analyst".into(), strings(&["g1", "g2", "g4"]));
        spec.map_2_to_0.insert("private".into(), strings(&["g3"]));
        spec.map_2_to_0.insert("helpful".into(), strings(&["g2", "g4"]));
        spec
    }

    fn set(xs: &[&str]) -> Conjunction {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fixture_is_valid() {
        fixture().validate(&identity()).unwrap();
    }

    #[test]
    fn ground_single_layer1_label() {
        assert_eq!(ground(&["reports"], &fixture(), 1).unwrap(), set(&["g1", "g2"]));
    }

    #[test]
    fn ground_conjunction_is_union() {
        assert_eq!(
            ground(&["private", "helpful"], &fixture(), 2).unwrap(),
            set(&["g2", "g3", "g4"])
        );
    }

    #[test]
    fn routed_grounding_matches_direct() {
        let spec = fixture();
        for label in &spec.layer2 {
            let mids = &spec.map_2_to_1[label];
            assert_eq!(ground(mids, &spec, 1).unwrap(), ground(&[label], &spec, 2).unwrap());
        }
    }

    #[test]
    fn undeclared_label_is_lookup_error() {
        assert!(matches!(
            ground(&["pirate"], &fixture(), 2),
            Err(Error::Lookup { layer: 2, .. })
        ));
        assert!(ground(&["reports"], &fixture(), 0).is_err());
    }

    #[test]
    fn compositional_fixture_has_no_violations() {
        assert!(check_compositionality(&fixture()).is_empty());
        let mut spec = fixture();
        spec.map_2_to_0 = spec.compose_2_to_0().unwrap();
        assert!(check_compositionality(&spec).is_empty());
    }

    #[test]
    fn tampered_entry_is_reported() {
        let mut spec = fixture();
        spec.map_2_to_0.insert("analyst".into(), strings(&["g1", "g2"]));
        assert_eq!(check_compositionality(&spec), vec!["analyst".to_string()]);
    }

    #[test]
    fn grounding_failures() {
        let identity = identity();
        let spec = fixture();
        // helpful → {g2, g4}; ten steps, all fully active except step 7.
        let mut sets: Vec<Vec<usize>> = vec![vec![0, 1, 2, 3]; 10];
        sets[7] = vec![0, 1, 2];
        let acts = sequence_from_indices(sets);

        let never = vec![false; 10];
        assert!(detect_grounding_failures(&acts, &["helpful"], 2, &never, &identity, &spec)
            .unwrap()
            .is_empty());

        let mut endorsed = vec![false; 10];
        endorsed[5] = true;
        assert!(detect_grounding_failures(&acts, &["helpful"], 2, &endorsed, &identity, &spec)
            .unwrap()
            .is_empty());

        endorsed[7] = true;
        assert_eq!(
            detect_grounding_failures(&acts, &["helpful"], 2, &endorsed, &identity, &spec).unwrap(),
            vec![7]
        );

        assert!(matches!(
            detect_grounding_failures(&acts, &["helpful"], 2, &endorsed[..9], &identity, &spec),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn validate_catches_unknown_references() {
        let mut spec = fixture();
        spec.map_1_to_0.insert("redacts".into(), strings(&["g9"]));
        assert!(spec.validate(&identity()).is_err());
        let mut spec = fixture();
        spec.map_2_to_1.insert("helpful".into(), strings(&["nothing"]));
        assert!(spec.validate(&identity()).is_err());
    }
}

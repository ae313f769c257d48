//! Identity spec files.
//!
//! Either one JSON document
//!
//! ```json
//! {"ingredients": [{"id": "name", "kind": "context", "context_pattern": ["Alice"]}],
//!  "layers": {"layer2": [], "layer1": [], "map_2_to_1": {}, "map_1_to_0": {}, "map_2_to_0": {}}}
//! ```
//!
//! or one JSON record per line: ingredient records, plus at most one
//! `{"layers": {...}}` line. Unknown fields are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grounding::LayeredIdentitySpec;
use crate::identity::{GroundedIdentity, IngredientKind, IngredientSpec};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdentityDoc {
    ingredients: Vec<RawIngredient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<RawLayers>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayersLine {
    layers: RawLayers,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIngredient {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    context_pattern: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    memory_key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    memory_value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flag_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    doc_id: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayers {
    #[serde(default)]
    layer2: Vec<String>,
    #[serde(default)]
    layer1: Vec<String>,
    #[serde(default)]
    map_2_to_1: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    map_1_to_0: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    map_2_to_0: BTreeMap<String, Vec<String>>,
}

impl RawIngredient {
    fn into_spec(self) -> std::result::Result<IngredientSpec, String> {
        let present = [
            ("context_pattern", self.context_pattern.is_some()),
            ("memory_key", self.memory_key.is_some()),
            ("memory_value", self.memory_value.is_some()),
            ("flag_index", self.flag_index.is_some()),
            ("doc_id", self.doc_id.is_some()),
        ];
        let expected: &[&str] = match self.kind.as_str() {
            "context" => &["context_pattern"],
            "memory" => &["memory_key", "memory_value"],
            "policy" => &["flag_index"],
            "retrieval" => &["doc_id"],
            other => return Err(format!("ingredient `{}` has unknown kind `{other}`", self.id)),
        };
        for (field, is_present) in present {
            if is_present != expected.contains(&field) {
                let verb = if is_present { "must not have" } else { "is missing" };
                return Err(format!("{} ingredient `{}` {verb} `{field}`", self.kind, self.id));
            }
        }
        let kind = match self.kind.as_str() {
            "context" => IngredientKind::Context {
                pattern: self.context_pattern.unwrap_or_default(),
            },
            "memory" => IngredientKind::Memory {
                key: self.memory_key.unwrap_or_default(),
                value: self.memory_value.unwrap_or_default(),
            },
            "policy" => IngredientKind::Policy {
                flag: self.flag_index.unwrap_or_default(),
            },
            _ => IngredientKind::Retrieval {
                doc: self.doc_id.unwrap_or_default(),
            },
        };
        Ok(IngredientSpec { id: self.id, kind })
    }

    fn from_spec(spec: &IngredientSpec) -> Self {
        let mut raw = RawIngredient {
            id: spec.id.clone(),
            kind: spec.kind.name().to_string(),
            ..Default::default()
        };
        match &spec.kind {
            IngredientKind::Context { pattern } => raw.context_pattern = Some(pattern.clone()),
            IngredientKind::Memory { key, value } => {
                raw.memory_key = Some(key.clone());
                raw.memory_value = Some(value.clone());
            }
            IngredientKind::Policy { flag } => raw.flag_index = Some(*flag),
            IngredientKind::Retrieval { doc } => raw.doc_id = Some(doc.clone()),
        }
        raw
    }
}

impl From<RawLayers> for LayeredIdentitySpec {
    fn from(raw: RawLayers) -> Self {
        LayeredIdentitySpec {
            layer2: raw.layer2,
            layer1: raw.layer1,
            map_2_to_1: raw.map_2_to_1,
            map_1_to_0: raw.map_1_to_0,
            map_2_to_0: raw.map_2_to_0,
        }
    }
}

impl From<&LayeredIdentitySpec> for RawLayers {
    fn from(spec: &LayeredIdentitySpec) -> Self {
        RawLayers {
            layer2: spec.layer2.clone(),
            layer1: spec.layer1.clone(),
            map_2_to_1: spec.map_2_to_1.clone(),
            map_1_to_0: spec.map_1_to_0.clone(),
            map_2_to_0: spec.map_2_to_0.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityFile {
    pub identity: GroundedIdentity,
    pub layers: Option<LayeredIdentitySpec>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_identity(text: &str) -> Result<IdentityFile> {
    let whole: Option<serde_json::Value> = serde_json::from_str(text).ok();
    let (raw_ingredients, raw_layers, line_of): (Vec<RawIngredient>, Option<RawLayers>, Vec<usize>) =
        match whole {
            Some(value) if value.get("ingredients").is_some() => {
                let doc: IdentityDoc = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
                let n = doc.ingredients.len();
                (doc.ingredients, doc.layers, vec![1; n])
            }
            _ => {
                let mut ingredients = Vec::new();
                let mut lines = Vec::new();
                let mut layers = None;
                for (i, line) in text.lines().enumerate() {
                    let lineno = i + 1;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let value: serde_json::Value =
                        serde_json::from_str(line).map_err(|e| parse_err(lineno, e.to_string()))?;
                    if value.get("layers").is_some() {
                        if layers.is_some() {
                            return Err(parse_err(lineno, "more than one layers record"));
                        }
                        let rec: LayersLine =
                            serde_json::from_value(value).map_err(|e| parse_err(lineno, e.to_string()))?;
                        layers = Some(rec.layers);
                    } else {
                        let rec: RawIngredient =
                            serde_json::from_value(value).map_err(|e| parse_err(lineno, e.to_string()))?;
                        ingredients.push(rec);
                        lines.push(lineno);
                    }
                }
                (ingredients, layers, lines)
            }
        };
    if raw_ingredients.is_empty() {
        return Err(parse_err(1, "identity spec declares no ingredients"));
    }
    let specs = raw_ingredients
        .into_iter()
        .zip(&line_of)
        .map(|(raw, &line)| raw.into_spec().map_err(|m| parse_err(line, m)))
        .collect::<Result<Vec<_>>>()?;
    let identity = GroundedIdentity::new(specs)?;
    let layers: Option<LayeredIdentitySpec> = raw_layers.map(Into::into);
    if let Some(layers) = &layers {
        layers.validate(&identity)?;
    }
    Ok(IdentityFile { identity, layers })
}

/// Single-document form, pretty-printed.
pub fn write_identity(identity: &GroundedIdentity, layers: Option<&LayeredIdentitySpec>) -> String {
    let doc = IdentityDoc {
        ingredients: identity.ingredients().iter().map(RawIngredient::from_spec).collect(),
        layers: layers.map(Into::into),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("identity serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
  "ingredients": [
    {"id": "name", "kind": "context", "context_pattern": ["Alice"]},
    {"id": "role", "kind": "memory", "memory_key": "role", "memory_value": "analyst"},
    {"id": "guard", "kind": "policy", "flag_index": 0},
    {"id": "policy", "kind": "retrieval", "doc_id": "privacy-policy"}
  ],
  "layers": {
    "layer2": ["careful-analyst"],
    "layer1": ["named", "redacts"],
    "map_2_to_1": {"careful-analyst": ["named", "redacts"]},
    "map_1_to_0": {"named": ["name"], "redacts": ["guard", "policy"]},
    "map_2_to_0": {"careful-analyst": ["name", "guard", "policy"]}
  }
}"#;

    #[test]
    fn parses_document_form() {
        let f = parse_identity(DOC).unwrap();
        assert_eq!(f.identity.k(), 4);
        assert_eq!(f.identity.ingredients()[2].kind, IngredientKind::Policy { flag: 0 });
        let layers = f.layers.unwrap();
        assert!(crate::grounding::check_compositionality(&layers).is_empty());
    }

    #[test]
    fn parses_line_form() {
        let text = "{\"id\": \"p\", \"kind\": \"context\", \"context_pattern\": [\"p\"]}\n\n\
                    {\"id\": \"q\", \"kind\": \"policy\", \"flag_index\": 1}\n";
        let f = parse_identity(text).unwrap();
        assert_eq!(f.identity.k(), 2);
        assert!(f.layers.is_none());
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = r#"{"ingredients": [{"id": "a", "kind": "policy", "flag_index": 0, "weight": 2}]}"#;
        assert!(matches!(parse_identity(text), Err(Error::Parse { .. })));
        let text = r#"{"ingredients": [], "extra": 1}"#;
        assert!(parse_identity(text).is_err());
    }

    #[test]
    fn rejects_fields_of_other_kinds() {
        let text = r#"{"ingredients": [{"id": "a", "kind": "policy", "flag_index": 0, "doc_id": "d"}]}"#;
        let err = parse_identity(text).unwrap_err();
        assert!(err.to_string().contains("must not have `doc_id`"), "{err}");
        let text = r#"{"ingredients": [{"id": "a", "kind": "memory", "memory_key": "k"}]}"#;
        assert!(parse_identity(text).unwrap_err().to_string().contains("memory_value"));
        let text = r#"{"ingredients": [{"id": "a", "kind": "vibes"}]}"#;
        assert!(parse_identity(text).is_err());
    }

    #[test]
    fn reports_line_of_bad_record() {
        let text = "{\"id\": \"p\", \"kind\": \"policy\", \"flag_index\": 0}\n{\"id\": 3}\n";
        assert!(matches!(parse_identity(text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn layers_must_reference_known_ingredients() {
        let text = DOC.replace(r#""named": ["name"]"#, r#""named": ["nickname"]"#);
        assert!(matches!(parse_identity(&text), Err(Error::Lookup { layer: 0, .. })));
    }

    #[test]
    fn write_then_parse() {
        let f = parse_identity(DOC).unwrap();
        let text = write_identity(&f.identity, f.layers.as_ref());
        assert_eq!(parse_identity(&text).unwrap(), f);
    }
}

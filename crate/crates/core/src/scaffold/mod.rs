//! Semantic scaffolds (name, explanation, predicate) and their validation
//! against a dataset.
//!
//! Two kinds of sets exist. Bin sets partition a single field: intervals for
//! quantitative and temporal fields, category groups for nominal ones. Highlight
//! sets annotate subsets of records selected by predicates over any fields.

mod bins;
mod context;
mod highlight;

pub use bins::{category_bins, equal_width_bins, validate_bin_set, BinError, Interval};
pub use context::{scan_explanation_context, schema_information_check};
pub use highlight::validate_highlight;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::diagnostic::{Code, Diagnostic};
use crate::predicate::{parse_predicate_value, ParseError, Predicate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticScaffold {
    pub name: String,
    pub explanation: String,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaffoldKind {
    Bins { field: String },
    Highlights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Provenance {
    Llm { model: String, attempts: u32 },
    Fallback,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScaffoldSetWire", into = "ScaffoldSetWire")]
pub struct ScaffoldSet {
    pub kind: ScaffoldKind,
    pub groups: Vec<SemanticScaffold>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Bins,
    Highlights,
}

#[derive(Serialize, Deserialize)]
struct ScaffoldSetWire {
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    groups: Vec<SemanticScaffold>,
    #[serde(default = "manual")]
    provenance: Provenance,
}

fn manual() -> Provenance {
    Provenance::Manual
}

impl TryFrom<ScaffoldSetWire> for ScaffoldSet {
    type Error = String;

    fn try_from(wire: ScaffoldSetWire) -> Result<Self, Self::Error> {
        let kind = match (wire.kind, wire.field) {
            (KindTag::Bins, Some(field)) => ScaffoldKind::Bins { field },
            (KindTag::Bins, None) => return Err("bin sets need a \"field\"".into()),
            (KindTag::Highlights, None) => ScaffoldKind::Highlights,
            (KindTag::Highlights, Some(_)) => {
                return Err("highlight sets do not take a \"field\"".into())
            }
        };
        if wire.groups.is_empty() {
            return Err("a scaffold set needs at least one group".into());
        }
        Ok(ScaffoldSet {
            kind,
            groups: wire.groups,
            provenance: wire.provenance,
        })
    }
}

impl From<ScaffoldSet> for ScaffoldSetWire {
    fn from(set: ScaffoldSet) -> Self {
        let (kind, field) = match set.kind {
            ScaffoldKind::Bins { field } => (KindTag::Bins, Some(field)),
            ScaffoldKind::Highlights => (KindTag::Highlights, None),
        };
        ScaffoldSetWire {
            kind,
            field,
            groups: set.groups,
            provenance: set.provenance,
        }
    }
}

impl ScaffoldSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scaffold sets always serialize")
    }
}

/// Why a `{"groups": [...]}` document could not be read.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResponseError {
    #[error("response does not match the expected shape: {0}")]
    Shape(String),
    #[error("group {group}: invalid predicate: {source}")]
    Predicate { group: usize, source: ParseError },
}

impl ResponseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let d = Diagnostic::error(Code::SchemaViolation, self.to_string());
        match self {
            ResponseError::Predicate { group, .. } => d.for_group(*group),
            ResponseError::Shape(_) => d,
        }
    }
}

/// Reads the `{"groups": [{name, explanation, predicate}, ...]}` document.
/// Keys outside that shape are rejected. When `require_explanations` is
/// set, names and explanations must be non-empty.
pub fn parse_groups(
    value: &Value,
    require_explanations: bool,
) -> Result<Vec<SemanticScaffold>, ResponseError> {
    let shape = |msg: String| ResponseError::Shape(msg);
    let Value::Object(top) = value else {
        return Err(shape("expected a JSON object with a \"groups\" array".into()));
    };
    if let Some(extra) = top.keys().find(|k| k.as_str() != "groups") {
        return Err(shape(format!("unexpected top-level key {extra:?}")));
    }
    let Some(Value::Array(items)) = top.get("groups") else {
        return Err(shape("missing \"groups\" array".into()));
    };
    if items.is_empty() {
        return Err(shape("\"groups\" is empty".into()));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let Value::Object(obj) = item else {
                return Err(shape(format!("group {i} is not an object")));
            };
            if let Some(extra) = obj
                .keys()
                .find(|k| !["name", "explanation", "predicate"].contains(&k.as_str()))
            {
                return Err(shape(format!("group {i} has unexpected key {extra:?}")));
            }
            let text = |key: &str| -> Result<String, ResponseError> {
                match obj.get(key) {
                    Some(Value::String(s)) if !require_explanations || !s.trim().is_empty() => {
                        Ok(s.clone())
                    }
                    Some(Value::String(_)) => Err(shape(format!("group {i} has an empty {key:?}"))),
                    Some(_) => Err(shape(format!("group {i} field {key:?} must be a string"))),
                    None => Err(shape(format!("group {i} is missing {key:?}"))),
                }
            };
            let name = text("name")?;
            let explanation = text("explanation")?;
            let predicate = obj
                .get("predicate")
                .ok_or_else(|| shape(format!("group {i} is missing \"predicate\"")))?;
            let predicate = parse_predicate_value(predicate)
                .map_err(|source| ResponseError::Predicate { group: i, source })?;
            Ok(SemanticScaffold {
                name,
                explanation,
                predicate,
            })
        })
        .collect()
}

/// Every check that applies to a set: per-group highlight validation or
/// whole-set bin validation, the explanation context scan, and for
/// model-generated sets the schema information check.
pub fn validate_set(set: &ScaffoldSet, d: &Dataset) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    match &set.kind {
        ScaffoldKind::Highlights => {
            for (i, group) in set.groups.iter().enumerate() {
                out.extend(validate_highlight(group, d).into_iter().map(|x| x.for_group(i)));
            }
        }
        ScaffoldKind::Bins { field } => match validate_bin_set(set, d) {
            Ok(diags) => out.extend(diags),
            Err(BinError::UnknownField(f)) => out.push(Diagnostic::error(
                Code::UnknownField,
                format!("bins were requested for unknown field {f:?}"),
            )),
            Err(BinError::NotABinPredicate { group, reason }) => out.push(
                Diagnostic::error(
                    Code::SchemaViolation,
                    format!("group {group} is not a bin of field {field:?}: {reason}"),
                )
                .for_group(group),
            ),
            Err(err) => out.push(Diagnostic::error(Code::SchemaViolation, err.to_string())),
        },
    }
    for (i, group) in set.groups.iter().enumerate() {
        out.extend(
            scan_explanation_context(group, d)
                .into_iter()
                .map(|x| x.for_group(i)),
        );
    }
    if matches!(set.provenance, Provenance::Llm { .. }) {
        out.extend(schema_information_check(d));
    }
    out
}

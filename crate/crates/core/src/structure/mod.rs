//! The navigable text hierarchy: root, then a highlight list and one node per
//! field, then highlights and bins, then pages of records.

mod render;

pub use render::{render_outline, render_predicate_text};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DataValue, Dataset, FieldExtent, FieldSpec};
use crate::diagnostic::{has_errors, Diagnostic};
use crate::predicate::{select, Operator, Predicate};
use crate::scaffold::{
    category_bins, equal_width_bins, validate_set, BinError, ScaffoldKind, ScaffoldSet,
    SemanticScaffold,
};

pub const PAGE_SIZE: usize = 20;
pub const FALLBACK_BIN_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NodeKind {
    Root,
    HighlightList,
    Highlight,
    Field,
    Bin,
    RecordPage,
}

/// Field order here is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub description: String,
    pub predicate: Option<Predicate>,
    pub selection_count: Option<usize>,
    pub diagnostics: Vec<Diagnostic>,
    pub children: Vec<StructureNode>,
}

impl StructureNode {
    fn new(id: String, kind: NodeKind, label: String, description: String) -> Self {
        StructureNode {
            id,
            kind,
            label,
            description,
            predicate: None,
            selection_count: None,
            diagnostics: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Levels in the subtree, counting this node.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(StructureNode::height).max().unwrap_or(0)
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a StructureNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn find(&self, id: &str) -> Option<&StructureNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure nodes always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("invalid scaffold set for {context}: {}", summarize(.diagnostics))]
    InvalidScaffold { context: String, diagnostics: Vec<Diagnostic> },
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn checked(set: &ScaffoldSet, d: &Dataset, context: String) -> Result<Vec<Diagnostic>, StructureError> {
    let diagnostics = validate_set(set, d);
    if has_errors(&diagnostics) {
        return Err(StructureError::InvalidScaffold { context, diagnostics });
    }
    Ok(diagnostics)
}

fn cell_text(v: &DataValue) -> String {
    match v {
        DataValue::Null => "missing".to_string(),
        other => other.to_string(),
    }
}

fn record_pages(parent_id: &str, rows: &[usize], d: &Dataset) -> Vec<StructureNode> {
    rows.chunks(PAGE_SIZE)
        .enumerate()
        .map(|(p, chunk)| {
            let first = p * PAGE_SIZE + 1;
            let last = first + chunk.len() - 1;
            let records: Vec<String> = chunk
                .iter()
                .map(|&i| {
                    let cells: Vec<String> = d
                        .row(i)
                        .iter()
                        .map(|(name, v)| format!("{name} {}", cell_text(v)))
                        .collect();
                    format!("Record {}: {}.", i + 1, cells.join(", "))
                })
                .collect();
            StructureNode::new(
                format!("{parent_id}/page/{p}"),
                NodeKind::RecordPage,
                format!("Records {first} to {last} of {}", rows.len()),
                records.join(" "),
            )
        })
        .collect()
}

fn group_node(
    id: String,
    kind: NodeKind,
    group: &SemanticScaffold,
    diagnostics: Vec<Diagnostic>,
    d: &Dataset,
) -> StructureNode {
    let rows = select(&group.predicate, d, false)
        .map(|s| s.row_indices)
        .unwrap_or_default();
    let summary = format!(
        "{} of {} records. Criteria: {}.",
        rows.len(),
        d.row_count(),
        render_predicate_text(&group.predicate)
    );
    let description = if group.explanation.trim().is_empty() {
        summary
    } else {
        format!("{} {summary}", group.explanation.trim())
    };
    let mut node = StructureNode::new(id, kind, group.name.clone(), description);
    node.children = record_pages(&node.id, &rows, d);
    node.predicate = Some(group.predicate.clone());
    node.selection_count = Some(rows.len());
    node.diagnostics = diagnostics;
    node
}

fn split_by_group(diagnostics: Vec<Diagnostic>, groups: usize) -> (Vec<Diagnostic>, Vec<Vec<Diagnostic>>) {
    let mut set_level = Vec::new();
    let mut per_group = vec![Vec::new(); groups];
    for diag in diagnostics {
        match diag.group_index {
            Some(i) if i < groups => per_group[i].push(diag),
            _ => set_level.push(diag),
        }
    }
    (set_level, per_group)
}

fn field_description(spec: &FieldSpec, d: &Dataset, bins: usize, semantic: bool) -> String {
    let values = match &spec.extent {
        FieldExtent::Nominal(cats) if cats.is_empty() => "with no values".to_string(),
        FieldExtent::Nominal(cats) => format!("with {} categories", cats.len()),
        other => format!("with values from {}", other.describe()),
    };
    let nulls = d.null_count(&spec.name);
    let missing = match nulls {
        0 => String::new(),
        1 => " 1 record has no value.".to_string(),
        n => format!(" {n} records have no value."),
    };
    let grouping = match (bins, semantic) {
        (0, _) => String::new(),
        (1, true) => " Grouped into 1 semantic bin.".to_string(),
        (n, true) => format!(" Grouped into {n} semantic bins."),
        (1, false) => " Grouped into 1 bin.".to_string(),
        (n, false) => format!(" Grouped into {n} bins."),
    };
    format!("{} field {values}.{missing}{grouping}", capitalize(spec.measure.as_str()))
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn fallback_bins(d: &Dataset, spec: &FieldSpec) -> Option<ScaffoldSet> {
    let made = if spec.measure.is_continuous() {
        equal_width_bins(d, &spec.name, FALLBACK_BIN_COUNT)
    } else {
        category_bins(d, &spec.name)
    };
    match made {
        Ok(set) => Some(set),
        Err(BinError::NoCategories(_)) => None,
        Err(e) => unreachable!("fallback bins for an existing field: {e}"),
    }
}

/// Builds the tree. Every supplied set is validated against the dataset
/// first; any error-severity diagnostic rejects the build. Fields without
/// semantic bins get equal-width or per-category bins, and fields with
/// missing values get a trailing "Missing values" bin.
pub fn build_structure(
    d: &Dataset,
    bins: &IndexMap<String, ScaffoldSet>,
    highlights: Option<&ScaffoldSet>,
) -> Result<StructureNode, StructureError> {
    for (field, set) in bins {
        if d.field(field).is_none() {
            return Err(StructureError::UnknownField(field.clone()));
        }
        if set.kind != (ScaffoldKind::Bins { field: field.clone() }) {
            return Err(StructureError::InvalidScaffold {
                context: format!("bins of {field:?}"),
                diagnostics: vec![Diagnostic::error(
                    crate::diagnostic::Code::SchemaViolation,
                    format!("the set stored for {field:?} is not a bin set of that field"),
                )],
            });
        }
    }

    let names: Vec<&str> = d.fields().iter().map(|f| f.name.as_str()).collect();
    let mut root = StructureNode::new(
        "root".into(),
        NodeKind::Root,
        "Dataset".into(),
        format!(
            "Dataset with {} records and {} fields: {}.",
            d.row_count(),
            names.len(),
            names.join(", ")
        ),
    );

    let mut list = StructureNode::new(
        "root/highlights".into(),
        NodeKind::HighlightList,
        "Data highlights".into(),
        "No data highlights.".into(),
    );
    if let Some(set) = highlights {
        if set.kind != ScaffoldKind::Highlights {
            return Err(StructureError::InvalidScaffold {
                context: "highlights".into(),
                diagnostics: vec![Diagnostic::error(
                    crate::diagnostic::Code::SchemaViolation,
                    "the highlight set is a bin set",
                )],
            });
        }
        let (set_level, per_group) = split_by_group(checked(set, d, "highlights".into())?, set.groups.len());
        list.description = match set.groups.len() {
            1 => "1 data highlight.".into(),
            n => format!("{n} data highlights."),
        };
        list.diagnostics = set_level;
        list.children = set
            .groups
            .iter()
            .zip(per_group)
            .enumerate()
            .map(|(i, (g, diags))| {
                group_node(format!("root/highlights/{i}"), NodeKind::Highlight, g, diags, d)
            })
            .collect();
    }
    root.children.push(list);

    for (idx, spec) in d.fields().iter().enumerate() {
        let id = format!("root/field/{idx}");
        let (set, semantic) = match bins.get(&spec.name) {
            Some(set) => (Some(set.clone()), true),
            None => (fallback_bins(d, spec), false),
        };
        let mut node = StructureNode::new(id.clone(), NodeKind::Field, spec.name.clone(), String::new());
        let mut count = 0;
        if let Some(set) = &set {
            let diagnostics = if semantic {
                checked(set, d, format!("bins of {:?}", spec.name))?
            } else {
                Vec::new()
            };
            let (set_level, per_group) = split_by_group(diagnostics, set.groups.len());
            node.diagnostics = set_level;
            node.children = set
                .groups
                .iter()
                .zip(per_group)
                .enumerate()
                .map(|(j, (g, diags))| group_node(format!("{id}/bin/{j}"), NodeKind::Bin, g, diags, d))
                .collect();
            count = set.groups.len();
        }
        if d.null_count(&spec.name) > 0 {
            let missing = SemanticScaffold {
                name: "Missing values".into(),
                explanation: format!("Records with no value for {}.", spec.name),
                predicate: Predicate::leaf(spec.name.clone(), Operator::Valid(false)),
            };
            node.children.push(group_node(format!("{id}/missing"), NodeKind::Bin, &missing, Vec::new(), d));
        }
        node.description = field_description(spec, d, count, semantic);
        root.children.push(node);
    }
    Ok(root)
}

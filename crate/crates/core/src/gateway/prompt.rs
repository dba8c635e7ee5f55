use serde_json::{json, Value};

use super::{GatewayError, GenerationConfig};
use crate::dataset::{sample_rows, DataValue, Dataset, FieldExtent, FieldSpec};
use crate::scaffold::ScaffoldKind;

/// Categories listed per field in the schema overview. Bin prompts for a
/// nominal field always list every category in the task section.
const OVERVIEW_CATEGORIES: usize = 30;

const SYSTEM: &str = "\
You help readers understand a dataset by identifying meaningful groupings of its records, \
using your knowledge of the domain the data comes from.

Each grouping has three parts:
- name: a short title that summarizes the grouping.
- explanation: a longer explanation of the grouping's real-world meaning.
- predicate: a query predicate, in Vega-Lite predicate syntax, that defines which records belong to the grouping.

Predicate syntax:
- A field predicate is an object with \"field\" and exactly one operator: \
{\"field\": F, \"equal\": v}, {\"field\": F, \"lt\": v}, {\"field\": F, \"lte\": v}, \
{\"field\": F, \"gt\": v}, {\"field\": F, \"gte\": v}, {\"field\": F, \"range\": [lower, upper]}, \
{\"field\": F, \"oneOf\": [v1, v2, ...]}, or {\"field\": F, \"valid\": true}.
- \"range\" includes both ends and must list the lower bound first.
- Combine predicates with {\"and\": [...]}, {\"or\": [...]}, and {\"not\": {...}}.
- Use field names exactly as given. Compare quantitative fields with numbers, temporal fields with \
ISO dates such as \"2008-08-31\", and nominal fields with category names exactly as they appear.

Respond with one JSON object of the form {\"groups\": [{\"name\": ..., \"explanation\": ..., \"predicate\": ...}, ...]} \
and nothing else.";

#[derive(Debug, Clone, PartialEq)]
pub struct PromptSpec {
    pub task: ScaffoldKind,
    pub system: String,
    pub user: String,
    pub response_schema: Value,
}

/// JSON schema of the `{"groups": [...]}` response, sent as the structured
/// output format.
pub fn response_schema() -> Value {
    let scalar = json!({"type": ["string", "number", "boolean", "null"]});
    json!({
        "type": "object",
        "properties": {
            "groups": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "name": {"type": "string"},
                        "explanation": {"type": "string"},
                        "predicate": {"$ref": "#/$defs/predicate"}
                    },
                    "required": ["name", "explanation", "predicate"],
                    "additionalProperties": false
                }
            }
        },
        "required": ["groups"],
        "additionalProperties": false,
        "$defs": {
            "predicate": {
                "anyOf": [
                    {
                        "type": "object",
                        "properties": {"and": {"type": "array", "items": {"$ref": "#/$defs/predicate"}}},
                        "required": ["and"],
                        "additionalProperties": false
                    },
                    {
                        "type": "object",
                        "properties": {"or": {"type": "array", "items": {"$ref": "#/$defs/predicate"}}},
                        "required": ["or"],
                        "additionalProperties": false
                    },
                    {
                        "type": "object",
                        "properties": {"not": {"$ref": "#/$defs/predicate"}},
                        "required": ["not"],
                        "additionalProperties": false
                    },
                    {
                        "type": "object",
                        "properties": {
                            "field": {"type": "string"},
                            "equal": scalar,
                            "lt": scalar,
                            "lte": scalar,
                            "gt": scalar,
                            "gte": scalar,
                            "range": {"type": "array", "items": scalar, "minItems": 2, "maxItems": 2},
                            "oneOf": {"type": "array", "items": scalar},
                            "valid": {"type": "boolean"}
                        },
                        "required": ["field"],
                        "additionalProperties": false
                    }
                ]
            }
        }
    })
}

fn field_line(d: &Dataset, f: &FieldSpec) -> String {
    let extent = match &f.extent {
        FieldExtent::Nominal(cats) if cats.is_empty() => "no values".to_string(),
        FieldExtent::Nominal(cats) if cats.len() > OVERVIEW_CATEGORIES => {
            let shown: Vec<&str> = cats[..OVERVIEW_CATEGORIES]
                .iter()
                .map(|c| c.category.as_str())
                .collect();
            format!("{} categories, including {}", cats.len(), shown.join(", "))
        }
        FieldExtent::Nominal(_) => format!("categories {}", f.extent.describe()),
        _ => format!("values from {}", f.extent.describe()),
    };
    let nulls = d.null_count(&f.name);
    let missing = if nulls > 0 {
        format!("; {nulls} missing")
    } else {
        String::new()
    };
    format!("- {} ({}): {extent}{missing}", f.name, f.measure)
}

fn table(d: &Dataset, max_rows: usize) -> (String, usize) {
    let rows = sample_rows(d, max_rows, 0);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(d.fields().iter().map(|f| f.name.as_str()))
        .expect("writing to memory");
    for row in &rows {
        w.write_record(row.cells().iter().map(|v| match v {
            DataValue::Null => String::new(),
            other => other.to_string(),
        }))
        .expect("writing to memory");
    }
    let bytes = w.into_inner().expect("writing to memory");
    (String::from_utf8(bytes).expect("cells are utf-8"), rows.len())
}

fn task_text(d: &Dataset, task: &ScaffoldKind) -> Result<String, GatewayError> {
    Ok(match task {
        ScaffoldKind::Highlights => "\
Task: identify between 3 and 7 data highlights. A data highlight is a grouping of data records along \
criteria that correspond to a real-world interpretation. Its predicate may involve several fields and \
should select some, but not all, of the records. Each explanation should connect the selected records \
to their real-world meaning, drawing only on context that fits the period and scope the data covers."
            .to_string(),
        ScaffoldKind::Bins { field } => {
            let spec = d
                .field(field)
                .ok_or_else(|| GatewayError::UnknownField(field.clone()))?;
            if spec.measure.is_continuous() {
                format!(
                    "\
Task: re-bin the {measure} field \"{field}\" into domain-specific intervals that reflect how people \
in this domain divide it. The bins should be non-overlapping intervals that cover the extent of the \
data, which spans {extent}. Every predicate must refer only to \"{field}\" and describe one interval: \
use \"range\" for a closed interval, or combine a lower bound (\"gte\" or \"gt\") with an upper bound \
(\"lt\" or \"lte\") inside \"and\", so that each boundary value falls in exactly one bin.",
                    measure = spec.measure,
                    extent = spec.extent.describe(),
                )
            } else {
                let all: Vec<String> = spec
                    .extent
                    .categories()
                    .iter()
                    .map(|c| format!("{:?}", c.category))
                    .collect();
                format!(
                    "\
Task: group the categories of the field \"{field}\" into higher-level groupings. The groupings should \
be mutually exclusive and exhaustively cover all categories, so every one of these {n} categories \
belongs to exactly one group: {list}. Every predicate must refer only to \"{field}\" and use \"equal\" \
or \"oneOf\".",
                    n = all.len(),
                    list = all.join(", "),
                )
            }
        }
    })
}

/// Deterministic prompt for a task: schema overview, attached records, then
/// the task's constraints.
pub fn build_prompt(
    d: &Dataset,
    task: &ScaffoldKind,
    cfg: &GenerationConfig,
) -> Result<PromptSpec, GatewayError> {
    let task_section = task_text(d, task)?;
    let fields: Vec<String> = d.fields().iter().map(|f| field_line(d, f)).collect();
    let (records, shown) = table(d, cfg.max_prompt_rows);
    let coverage = if shown == d.row_count() {
        format!("all {shown} records")
    } else {
        format!("a random sample of {shown} of {} records", d.row_count())
    };
    let user = format!(
        "The dataset has {} records and these fields:\n{}\n\nData ({coverage}, as CSV):\n{}\n{}",
        d.row_count(),
        fields.join("\n"),
        records,
        task_section
    );
    Ok(PromptSpec {
        task: task.clone(),
        system: SYSTEM.to_string(),
        user,
        response_schema: response_schema(),
    })
}

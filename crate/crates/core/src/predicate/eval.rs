use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use super::{Literal, Operator, Predicate};
use crate::dataset::{
    format_number, header_allows_bare_year, parse_temporal_millis, DataValue, Dataset,
    FieldLookup, Measure,
};

/// A literal coerced into the value space of a field.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisValue {
    Number(f64),
    Time(i64),
    Text(String),
}

impl AxisValue {
    /// Position on a continuous axis, `None` for text.
    pub fn axis(&self) -> Option<f64> {
        match self {
            AxisValue::Number(x) => Some(*x),
            AxisValue::Time(ms) => Some(*ms as f64),
            AxisValue::Text(_) => None,
        }
    }
}

/// Coerces a literal to the measure of `field`. Quantitative fields take
/// JSON numbers; temporal fields take ISO-8601 strings, or four-digit years
/// (string or integer) when the field name mentions a year or date; nominal
/// fields take strings, with numbers and booleans compared by their text.
pub fn coerce_literal(lit: &Literal, measure: Measure, field: &str) -> Option<AxisValue> {
    match measure {
        Measure::Quantitative => match lit {
            Literal::Number(x) => Some(AxisValue::Number(*x)),
            _ => None,
        },
        Measure::Temporal => {
            let bare_year = header_allows_bare_year(field);
            match lit {
                Literal::Text(s) => parse_temporal_millis(s, bare_year).map(AxisValue::Time),
                Literal::Number(x) if bare_year && x.fract() == 0.0 && (1000.0..10000.0).contains(x) => {
                    parse_temporal_millis(&format_number(*x), true).map(AxisValue::Time)
                }
                _ => None,
            }
        }
        Measure::Nominal => match lit {
            Literal::Text(s) => Some(AxisValue::Text(s.clone())),
            Literal::Number(x) => Some(AxisValue::Text(format_number(*x))),
            Literal::Bool(b) => Some(AxisValue::Text(b.to_string())),
            Literal::Null => None,
        },
    }
}

fn cell_measure(cell: &DataValue) -> Option<Measure> {
    match cell {
        DataValue::Number(_) => Some(Measure::Quantitative),
        DataValue::Timestamp(_) => Some(Measure::Temporal),
        DataValue::Text(_) => Some(Measure::Nominal),
        DataValue::Null => None,
    }
}

fn equals(cell: &DataValue, lit: &Literal, field: &str) -> bool {
    let Some(measure) = cell_measure(cell) else {
        return false;
    };
    match (cell, coerce_literal(lit, measure, field)) {
        (DataValue::Number(x), Some(AxisValue::Number(y))) => *x == y,
        (DataValue::Timestamp(t), Some(AxisValue::Time(ms))) => t.millis == ms,
        (DataValue::Text(s), Some(AxisValue::Text(v))) => *s == v,
        _ => false,
    }
}

/// Ordering of the cell relative to the literal; `None` when either side is
/// null, text, or not coercible.
fn compare(cell: &DataValue, lit: &Literal, field: &str) -> Option<Ordering> {
    match cell {
        DataValue::Number(x) => match coerce_literal(lit, Measure::Quantitative, field)? {
            AxisValue::Number(y) => x.partial_cmp(&y),
            _ => None,
        },
        DataValue::Timestamp(t) => match coerce_literal(lit, Measure::Temporal, field)? {
            AxisValue::Time(ms) => Some(t.millis.cmp(&ms)),
            _ => None,
        },
        DataValue::Text(_) | DataValue::Null => None,
    }
}

/// Membership test. Fields missing from `record` read as null.
pub fn evaluate(p: &Predicate, record: &impl FieldLookup) -> bool {
    match p {
        Predicate::And(children) => children.iter().all(|c| evaluate(c, record)),
        Predicate::Or(children) => children.iter().any(|c| evaluate(c, record)),
        Predicate::Not(inner) => !evaluate(inner, record),
        Predicate::Leaf(leaf) => {
            let cell = record.lookup(&leaf.field).unwrap_or(&DataValue::Null);
            let field = leaf.field.as_str();
            match &leaf.op {
                Operator::Valid(want) => cell.is_null() != *want,
                Operator::Equal(v) => equals(cell, v, field),
                Operator::OneOf(vs) => vs.iter().any(|v| equals(cell, v, field)),
                Operator::Lt(v) => compare(cell, v, field) == Some(Ordering::Less),
                Operator::Lte(v) => matches!(
                    compare(cell, v, field),
                    Some(Ordering::Less | Ordering::Equal)
                ),
                Operator::Gt(v) => compare(cell, v, field) == Some(Ordering::Greater),
                Operator::Gte(v) => matches!(
                    compare(cell, v, field),
                    Some(Ordering::Greater | Ordering::Equal)
                ),
                Operator::Range(lo, hi) => {
                    matches!(
                        compare(cell, lo, field),
                        Some(Ordering::Greater | Ordering::Equal)
                    ) && matches!(
                        compare(cell, hi, field),
                        Some(Ordering::Less | Ordering::Equal)
                    )
                }
            }
        }
    }
}

/// The rows of a dataset satisfying a predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Selection {
    pub dataset_id: String,
    pub row_indices: Vec<usize>,
}

impl Selection {
    pub fn count(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("predicate references unknown field(s): {}", .0.join(", "))]
    UnknownField(Vec<String>),
}

/// Evaluates `p` on every row. With `strict`, references to undeclared
/// fields are an error; otherwise they read as null.
pub fn select(p: &Predicate, d: &Dataset, strict: bool) -> Result<Selection, SelectError> {
    if strict {
        let unknown: Vec<String> = p
            .referenced_fields()
            .into_iter()
            .filter(|f| d.field(f).is_none())
            .collect();
        if !unknown.is_empty() {
            return Err(SelectError::UnknownField(unknown));
        }
    }
    let row_indices = d
        .rows()
        .enumerate()
        .filter(|(_, row)| evaluate(p, row))
        .map(|(i, _)| i)
        .collect();
    Ok(Selection {
        dataset_id: d.id().to_string(),
        row_indices,
    })
}

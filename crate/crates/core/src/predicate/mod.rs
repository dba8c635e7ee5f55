//! The query-predicate language: field predicates composed with `and`, `or`
//! and `not`, using the Vega-Lite field-predicate operator names.
//!
//! Wire format (one JSON object per node):
//!
//! ```text
//! {"and": [P, ...]} | {"or": [P, ...]} | {"not": P}
//! {"field": F, "equal": v} | "lt" | "lte" | "gt" | "gte"
//! {"field": F, "range": [lo, hi]} | {"field": F, "oneOf": [v, ...]}
//! {"field": F, "valid": true|false}
//! ```
//!
//! Parsing is strict: unknown keys are rejected. Evaluation is total:
//! comparisons against null cells are false and literals that cannot be
//! coerced to the cell's type never match.

mod eval;
mod parse;
mod typecheck;

pub use eval::{coerce_literal, evaluate, select, AxisValue, SelectError, Selection};
pub use parse::{canonical_json, parse_predicate, parse_predicate_value, to_json_value, ParseError};
pub use typecheck::typecheck;

use std::collections::BTreeSet;
use std::fmt;

use crate::dataset::format_number;

/// A literal operand as written in the predicate JSON. Its meaning depends
/// on the measure of the field it is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(x) => f.write_str(&format_number(*x)),
            Literal::Text(s) => f.write_str(s),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Null => f.write_str("null"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Equal(Literal),
    Lt(Literal),
    Lte(Literal),
    Gt(Literal),
    Gte(Literal),
    Range(Literal, Literal),
    OneOf(Vec<Literal>),
    Valid(bool),
}

impl Operator {
    pub fn key(&self) -> &'static str {
        match self {
            Operator::Equal(_) => "equal",
            Operator::Lt(_) => "lt",
            Operator::Lte(_) => "lte",
            Operator::Gt(_) => "gt",
            Operator::Gte(_) => "gte",
            Operator::Range(..) => "range",
            Operator::OneOf(_) => "oneOf",
            Operator::Valid(_) => "valid",
        }
    }

    pub fn literals(&self) -> Vec<&Literal> {
        match self {
            Operator::Equal(v)
            | Operator::Lt(v)
            | Operator::Lte(v)
            | Operator::Gt(v)
            | Operator::Gte(v) => vec![v],
            Operator::Range(lo, hi) => vec![lo, hi],
            Operator::OneOf(vs) => vs.iter().collect(),
            Operator::Valid(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPredicate {
    pub field: String,
    pub op: Operator,
}

impl FieldPredicate {
    pub fn new(field: impl Into<String>, op: Operator) -> Self {
        FieldPredicate {
            field: field.into(),
            op,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Leaf(FieldPredicate),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    pub fn leaf(field: impl Into<String>, op: Operator) -> Self {
        Predicate::Leaf(FieldPredicate::new(field, op))
    }

    pub fn negate(inner: Predicate) -> Self {
        Predicate::Not(Box::new(inner))
    }

    /// Field names appearing in the leaves.
    pub fn referenced_fields(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_leaf(&mut |leaf| {
            out.insert(leaf.field.clone());
        });
        out
    }

    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a FieldPredicate)) {
        match self {
            Predicate::Leaf(leaf) => f(leaf),
            Predicate::And(children) | Predicate::Or(children) => {
                for child in children {
                    child.for_each_leaf(f);
                }
            }
            Predicate::Not(inner) => inner.for_each_leaf(f),
        }
    }

    pub fn leaves(&self) -> Vec<&FieldPredicate> {
        let mut out = Vec::new();
        self.for_each_leaf(&mut |leaf| out.push(leaf));
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Predicate::Leaf(_) => 1,
            Predicate::And(c) | Predicate::Or(c) => {
                1 + c.iter().map(Predicate::depth).max().unwrap_or(0)
            }
            Predicate::Not(inner) => 1 + inner.depth(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_json(self))
    }
}

impl serde::Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_json_value(self).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Predicate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        parse_predicate_value(&value).map_err(serde::de::Error::custom)
    }
}

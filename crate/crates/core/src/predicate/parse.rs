use serde_json::{Map, Value};
use thiserror::Error;

use super::{FieldPredicate, Literal, Operator, Predicate};
use crate::dataset::json_number;

const OPERATOR_KEYS: [&str; 8] = ["equal", "lt", "lte", "gt", "gte", "range", "oneOf", "valid"];
const COMPOSITION_KEYS: [&str; 3] = ["and", "or", "not"];

/// `path` locates the offending node, e.g. `$.and[2]`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("{path}: predicate must be a JSON object")]
    NotAnObject { path: String },
    #[error("{path}: unknown operator {key:?}")]
    UnknownOperator { path: String, key: String },
    #[error("{path}: a predicate node must have exactly one operator, found {}", keys.join(", "))]
    MultipleOperators { path: String, keys: Vec<String> },
    #[error("{path}: field predicate is missing \"field\"")]
    MissingField { path: String },
    #[error("{path}: field predicate on {field:?} has no operator")]
    MissingOperator { path: String, field: String },
    #[error("{path}: invalid operand for {key:?}: {reason}")]
    InvalidOperand {
        path: String,
        key: String,
        reason: String,
    },
}

pub fn parse_predicate(json: &str) -> Result<Predicate, ParseError> {
    let value: Value = serde_json::from_str(json).map_err(|e| ParseError::Syntax(e.to_string()))?;
    parse_predicate_value(&value)
}

pub fn parse_predicate_value(value: &Value) -> Result<Predicate, ParseError> {
    parse_node(value, "$")
}

fn parse_node(value: &Value, path: &str) -> Result<Predicate, ParseError> {
    let Value::Object(obj) = value else {
        return Err(ParseError::NotAnObject { path: path.to_string() });
    };

    if let Some(unknown) = obj.keys().find(|k| {
        let k = k.as_str();
        k != "field" && !OPERATOR_KEYS.contains(&k) && !COMPOSITION_KEYS.contains(&k)
    }) {
        return Err(ParseError::UnknownOperator {
            path: path.to_string(),
            key: unknown.clone(),
        });
    }

    let compositions: Vec<&String> = obj
        .keys()
        .filter(|k| COMPOSITION_KEYS.contains(&k.as_str()))
        .collect();
    if !compositions.is_empty() {
        if obj.len() > 1 {
            return Err(ParseError::MultipleOperators {
                path: path.to_string(),
                keys: obj.keys().cloned().collect(),
            });
        }
        let key = compositions[0].as_str();
        let operand = &obj[key];
        return match key {
            "not" => Ok(Predicate::negate(parse_node(operand, &format!("{path}.not"))?)),
            _ => {
                let Value::Array(items) = operand else {
                    return Err(ParseError::InvalidOperand {
                        path: path.to_string(),
                        key: key.to_string(),
                        reason: "expected an array of predicates".into(),
                    });
                };
                let children = items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| parse_node(item, &format!("{path}.{key}[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if key == "and" {
                    Predicate::And(children)
                } else {
                    Predicate::Or(children)
                })
            }
        };
    }

    parse_leaf(obj, path).map(Predicate::Leaf)
}

fn parse_leaf(obj: &Map<String, Value>, path: &str) -> Result<FieldPredicate, ParseError> {
    let field = match obj.get("field") {
        None => return Err(ParseError::MissingField { path: path.to_string() }),
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(ParseError::InvalidOperand {
                path: path.to_string(),
                key: "field".into(),
                reason: "expected a string".into(),
            })
        }
    };
    let ops: Vec<&String> = obj.keys().filter(|k| k.as_str() != "field").collect();
    match ops.len() {
        0 => return Err(ParseError::MissingOperator { path: path.to_string(), field }),
        1 => {}
        _ => {
            return Err(ParseError::MultipleOperators {
                path: path.to_string(),
                keys: ops.into_iter().cloned().collect(),
            })
        }
    }
    let key = ops[0].as_str();
    let operand = &obj[key];
    let invalid = |reason: &str| ParseError::InvalidOperand {
        path: path.to_string(),
        key: key.to_string(),
        reason: reason.to_string(),
    };
    let scalar = |v: &Value| literal(v).ok_or_else(|| invalid("expected a scalar value"));

    let op = match key {
        "equal" => Operator::Equal(scalar(operand)?),
        "lt" => Operator::Lt(scalar(operand)?),
        "lte" => Operator::Lte(scalar(operand)?),
        "gt" => Operator::Gt(scalar(operand)?),
        "gte" => Operator::Gte(scalar(operand)?),
        "range" => match operand {
            Value::Array(items) if items.len() == 2 => {
                Operator::Range(scalar(&items[0])?, scalar(&items[1])?)
            }
            _ => return Err(invalid("expected a two-element array")),
        },
        "oneOf" => match operand {
            Value::Array(items) => {
                Operator::OneOf(items.iter().map(scalar).collect::<Result<_, _>>()?)
            }
            _ => return Err(invalid("expected an array")),
        },
        "valid" => match operand {
            Value::Bool(b) => Operator::Valid(*b),
            _ => return Err(invalid("expected true or false")),
        },
        _ => unreachable!("operator keys are checked above"),
    };
    Ok(FieldPredicate { field, op })
}

fn literal(value: &Value) -> Option<Literal> {
    match value {
        Value::Null => Some(Literal::Null),
        Value::Bool(b) => Some(Literal::Bool(*b)),
        Value::Number(n) => n.as_f64().map(Literal::Number),
        Value::String(s) => Some(Literal::Text(s.clone())),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn literal_json(lit: &Literal) -> Value {
    match lit {
        Literal::Number(x) => json_number(*x),
        Literal::Text(s) => Value::String(s.clone()),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Null => Value::Null,
    }
}

/// JSON value with canonical key order: the composition key alone, or
/// `field` followed by the operator.
pub fn to_json_value(p: &Predicate) -> Value {
    let mut obj = Map::new();
    match p {
        Predicate::And(children) => {
            obj.insert("and".into(), Value::Array(children.iter().map(to_json_value).collect()));
        }
        Predicate::Or(children) => {
            obj.insert("or".into(), Value::Array(children.iter().map(to_json_value).collect()));
        }
        Predicate::Not(inner) => {
            obj.insert("not".into(), to_json_value(inner));
        }
        Predicate::Leaf(leaf) => {
            obj.insert("field".into(), Value::String(leaf.field.clone()));
            let operand = match &leaf.op {
                Operator::Equal(v)
                | Operator::Lt(v)
                | Operator::Lte(v)
                | Operator::Gt(v)
                | Operator::Gte(v) => literal_json(v),
                Operator::Range(lo, hi) => Value::Array(vec![literal_json(lo), literal_json(hi)]),
                Operator::OneOf(vs) => Value::Array(vs.iter().map(literal_json).collect()),
                Operator::Valid(b) => Value::Bool(*b),
            };
            obj.insert(leaf.op.key().into(), operand);
        }
    }
    Value::Object(obj)
}

/// Deterministic compact serialization; the interchange form of predicates.
pub fn canonical_json(p: &Predicate) -> String {
    to_json_value(p).to_string()
}

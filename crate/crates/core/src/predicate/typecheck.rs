use super::{coerce_literal, FieldPredicate, Literal, Operator, Predicate};
use crate::dataset::{FieldSpec, Measure};
use crate::diagnostic::{Code, Diagnostic};

/// Static checks of a predicate against a schema. An empty result means the
/// predicate is well-typed.
pub fn typecheck(p: &Predicate, fields: &[FieldSpec]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    p.for_each_leaf(&mut |leaf| check_leaf(leaf, fields, &mut out));
    out
}

fn expected(measure: Measure, field: &str) -> String {
    match measure {
        Measure::Quantitative => "a number".into(),
        Measure::Temporal if crate::dataset::header_allows_bare_year(field) => {
            "an ISO-8601 date or a four-digit year".into()
        }
        Measure::Temporal => "an ISO-8601 date".into(),
        Measure::Nominal => "a category name".into(),
    }
}

fn show(lit: &Literal) -> String {
    match lit {
        Literal::Text(s) => format!("{s:?}"),
        other => other.to_string(),
    }
}

fn check_leaf(leaf: &FieldPredicate, fields: &[FieldSpec], out: &mut Vec<Diagnostic>) {
    let name = leaf.field.as_str();
    let Some(spec) = fields.iter().find(|f| f.name == name) else {
        let available: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
        out.push(Diagnostic::error(
            Code::UnknownField,
            format!(
                "unknown field {name:?}; the dataset has fields {}",
                available.join(", ")
            ),
        ));
        return;
    };
    let measure = spec.measure;
    let key = leaf.op.key();

    if measure == Measure::Nominal
        && matches!(
            leaf.op,
            Operator::Lt(_) | Operator::Lte(_) | Operator::Gt(_) | Operator::Gte(_) | Operator::Range(..)
        )
    {
        out.push(Diagnostic::error(
            Code::TypeMismatch,
            format!("operator {key:?} cannot be applied to nominal field {name:?}; use equal or oneOf"),
        ));
        return;
    }

    let mut mismatched = false;
    for lit in leaf.op.literals() {
        if coerce_literal(lit, measure, name).is_none() {
            mismatched = true;
            out.push(Diagnostic::error(
                Code::TypeMismatch,
                format!(
                    "{key} on {measure} field {name:?} compares against {}, which is not {}",
                    show(lit),
                    expected(measure, name)
                ),
            ));
        }
    }

    if let (Operator::Range(lo, hi), false) = (&leaf.op, mismatched) {
        let lo_axis = coerce_literal(lo, measure, name).and_then(|v| v.axis());
        let hi_axis = coerce_literal(hi, measure, name).and_then(|v| v.axis());
        if let (Some(a), Some(b)) = (lo_axis, hi_axis) {
            if a > b {
                out.push(Diagnostic::error(
                    Code::MalformedRange,
                    format!(
                        "range on {name:?} has lower bound {lo} greater than upper bound {hi}; \
                         ranges are written [lower, upper]"
                    ),
                ));
            }
        }
    }
}

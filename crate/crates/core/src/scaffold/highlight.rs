use super::SemanticScaffold;
use crate::dataset::{Dataset, Measure};
use crate::diagnostic::{has_errors, Code, Diagnostic};
use crate::predicate::{coerce_literal, select, typecheck, Predicate};

/// Checks a highlight against the dataset. Type errors stop the check
/// early since a mistyped predicate's selection says nothing useful.
pub fn validate_highlight(s: &SemanticScaffold, d: &Dataset) -> Vec<Diagnostic> {
    let mut out = typecheck(&s.predicate, d.fields());
    if has_errors(&out) {
        return out;
    }

    let count = select(&s.predicate, d, false)
        .map(|sel| sel.count())
        .unwrap_or(0);
    if count == 0 {
        out.push(Diagnostic::error(
            Code::EmptySelection,
            format!(
                "highlight {:?} selects no records; its predicate is {}",
                s.name, s.predicate
            ),
        ));
    } else if count == d.row_count() {
        out.push(Diagnostic::warning(
            Code::UniversalSelection,
            format!(
                "highlight {:?} selects all {count} records, so it does not single out a subset",
                s.name
            ),
        ));
    }
    out.extend(out_of_extent(&s.predicate, d));
    out
}

/// Numeric and temporal literals strictly outside their field's extent.
pub(super) fn out_of_extent(p: &Predicate, d: &Dataset) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = Vec::new();
    p.for_each_leaf(&mut |leaf| {
        let Some(spec) = d.field(&leaf.field) else {
            return;
        };
        if spec.measure == Measure::Nominal {
            return;
        }
        let Some((min, max)) = spec.extent.axis_bounds() else {
            return;
        };
        for lit in leaf.op.literals() {
            let Some(v) = coerce_literal(lit, spec.measure, &leaf.field).and_then(|v| v.axis())
            else {
                continue;
            };
            if v < min || v > max {
                let msg = format!(
                    "value {lit} for {:?} lies outside the data, which spans {}",
                    leaf.field,
                    spec.extent.describe()
                );
                if !out.iter().any(|x| x.message == msg) {
                    out.push(Diagnostic::warning(Code::OutOfExtent, msg));
                }
            }
        }
    });
    out
}

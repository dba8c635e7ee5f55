use std::sync::OnceLock;

use regex::Regex;

use super::SemanticScaffold;
use crate::dataset::{Dataset, FieldExtent};
use crate::diagnostic::{Code, Diagnostic};

const GENERIC_NAMES: [&str; 9] = ["category", "value", "field", "data", "x", "y", "a", "b", "c"];

fn generic_prefixed() -> &'static Regex {
    // col, col1, col_2, column3, var, var_1 ... but not "color" or "variety"
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(col|column|var)[ _-]?\d*$").unwrap())
}

fn is_generic(name: &str) -> bool {
    let lower = name.trim().to_lowercase();
    GENERIC_NAMES.contains(&lower.as_str()) || generic_prefixed().is_match(&lower)
}

/// Warns when at least half of the field names carry no domain meaning, in
/// which case any generated explanation is likely to invent one.
pub fn schema_information_check(d: &Dataset) -> Vec<Diagnostic> {
    let generic: Vec<&str> = d
        .fields()
        .iter()
        .map(|f| f.name.as_str())
        .filter(|n| is_generic(n))
        .collect();
    let total = d.fields().len();
    if total == 0 || generic.len() * 2 < total {
        return Vec::new();
    }
    vec![Diagnostic::warning(
        Code::LowInformationSchema,
        format!(
            "{} of {total} field names ({}) are generic, so the dataset says little about \
             what it measures; AI-generated explanations may describe a domain the data \
             does not come from",
            generic.len(),
            generic.join(", ")
        ),
    )]
}

/// Four-digit tokens between 1000 and 2999, deduplicated, in order.
fn year_tokens(text: &str) -> Vec<i32> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"[0-9]+").unwrap());
    let mut out = Vec::new();
    for m in re.find_iter(text) {
        let token = m.as_str();
        if token.len() == 4 && (token.starts_with('1') || token.starts_with('2')) {
            let year: i32 = token.parse().expect("four ascii digits");
            if !out.contains(&year) {
                out.push(year);
            }
        }
    }
    out
}

/// Flags years mentioned in a scaffold's name or explanation that fall
/// outside every temporal field's span. Silent for datasets without
/// temporal fields.
pub fn scan_explanation_context(s: &SemanticScaffold, d: &Dataset) -> Vec<Diagnostic> {
    let spans: Vec<(&str, &FieldExtent, i32, i32)> = d
        .fields()
        .iter()
        .filter_map(|f| match &f.extent {
            e @ FieldExtent::Temporal { min, max } => {
                Some((f.name.as_str(), e, min.year(), max.year()))
            }
            _ => None,
        })
        .collect();
    if spans.is_empty() {
        return Vec::new();
    }
    let text = format!("{} {}", s.name, s.explanation);
    year_tokens(&text)
        .into_iter()
        .filter(|y| !spans.iter().any(|(_, _, lo, hi)| lo <= y && y <= hi))
        .map(|y| {
            let covered: Vec<String> = spans
                .iter()
                .map(|(name, extent, _, _)| format!("{name}: {}", extent.describe()))
                .collect();
            Diagnostic::warning(
                Code::TemporalOutOfScope,
                format!(
                    "{:?} refers to {y}, which is outside the period the data covers ({})",
                    s.name,
                    covered.join("; ")
                ),
            )
        })
        .collect()
}

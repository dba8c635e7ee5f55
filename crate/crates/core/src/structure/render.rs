use super::StructureNode;
use crate::predicate::{Literal, Operator, Predicate};

fn list(items: &[Literal]) -> String {
    let words: Vec<String> = items.iter().map(Literal::to_string).collect();
    match words.as_slice() {
        [] => "nothing".to_string(),
        [one] => one.clone(),
        [a, b] => format!("{a} or {b}"),
        [init @ .., last] => format!("{}, or {last}", init.join(", ")),
    }
}

fn leaf_text(field: &str, op: &Operator) -> String {
    match op {
        Operator::Equal(v) => format!("{field} is {v}"),
        Operator::Lt(v) => format!("{field} is less than {v}"),
        Operator::Lte(v) => format!("{field} is at most {v}"),
        Operator::Gt(v) => format!("{field} is greater than {v}"),
        Operator::Gte(v) => format!("{field} is at least {v}"),
        Operator::Range(lo, hi) => format!("{field} is between {lo} and {hi}"),
        Operator::OneOf(vs) => format!("{field} is one of {}", list(vs)),
        Operator::Valid(true) => format!("{field} is present"),
        Operator::Valid(false) => format!("{field} is missing"),
    }
}

fn is_compound(p: &Predicate) -> bool {
    matches!(p, Predicate::And(c) | Predicate::Or(c) if c.len() >= 2)
}

fn text(p: &Predicate, nested: bool) -> String {
    match p {
        Predicate::Leaf(leaf) => leaf_text(&leaf.field, &leaf.op),
        Predicate::And(c) if c.is_empty() => "all records".to_string(),
        Predicate::Or(c) if c.is_empty() => "no records".to_string(),
        Predicate::And(c) | Predicate::Or(c) if c.len() == 1 => text(&c[0], nested),
        Predicate::And(c) | Predicate::Or(c) => {
            let joiner = if matches!(p, Predicate::And(_)) { " and " } else { " or " };
            let parts: Vec<String> = c.iter().map(|x| text(x, true)).collect();
            let joined = parts.join(joiner);
            if nested {
                format!("({joined})")
            } else {
                joined
            }
        }
        Predicate::Not(inner) => format!("not {}", text(inner, is_compound(inner))),
    }
}

/// Plain-English criteria, e.g. `Miles_per_Gallon is at least 25 and Origin
/// is Japan`. Nested compound terms are parenthesized.
pub fn render_predicate_text(p: &Predicate) -> String {
    text(p, false)
}

/// Indented outline, one line per node holding label and description. Nodes at
/// `max_depth` that still have children note how many levels are hidden.
pub fn render_outline(root: &StructureNode, max_depth: usize) -> String {
    let mut out = String::new();
    outline(root, 1, max_depth.max(1), &mut out);
    out
}

fn outline(node: &StructureNode, depth: usize, max_depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth - 1));
    out.push_str(&node.label);
    out.push_str(" — ");
    out.push_str(&node.description);
    if depth == max_depth && !node.children.is_empty() {
        let hidden = node.height() - 1;
        let unit = if hidden == 1 { "level" } else { "levels" };
        out.push_str(&format!(" … {hidden} more {unit}"));
    }
    out.push('\n');
    if depth < max_depth {
        for child in &node.children {
            outline(child, depth + 1, max_depth, out);
        }
    }
}

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use super::highlight::out_of_extent;
use super::{Provenance, ScaffoldKind, ScaffoldSet, SemanticScaffold};
use crate::dataset::{
    display_number, format_millis, format_number, Dataset, FieldSpec, Measure,
};
use crate::diagnostic::{has_errors, Code, Diagnostic};
use crate::predicate::{coerce_literal, typecheck, AxisValue, Literal, Operator, Predicate};

/// Points of the extent grid used when deciding whether a gap matters.
const GRID_STEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinError {
    #[error("scaffold set is not a bin set")]
    NotBins,
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("group {group} is not a bin predicate: {reason}")]
    NotABinPredicate { group: usize, reason: String },
    #[error("field {0:?} is not quantitative or temporal")]
    FieldNotContinuous(String),
    #[error("field {0:?} has no categories")]
    NoCategories(String),
    #[error("bin count must be at least 1")]
    ZeroBins,
}

/// A real interval with open or closed ends. Unbounded ends are infinite
/// and open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, lo_closed: true, hi, hi_closed: true }
    }

    pub fn everything() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            lo_closed: false,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval { lo, lo_closed, hi, hi_closed }
    }

    fn render(&self, measure: Measure) -> String {
        let point = |x: f64| -> String {
            if x == f64::NEG_INFINITY {
                "-infinity".into()
            } else if x == f64::INFINITY {
                "infinity".into()
            } else if measure == Measure::Temporal {
                format_millis(x as i64)
            } else {
                format_number(x)
            }
        };
        format!(
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            point(self.lo),
            point(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Measure::Quantitative))
    }
}

fn axis_of(lit: &Literal, spec: &FieldSpec) -> Result<f64, String> {
    coerce_literal(lit, spec.measure, &spec.name)
        .and_then(|v| v.axis())
        .ok_or_else(|| format!("{lit} is not a {} value", spec.measure))
}

/// The interval a bin predicate denotes: a range, a single bound, an
/// equality, or a conjunction of those.
fn interval_of(p: &Predicate, spec: &FieldSpec) -> Result<Interval, String> {
    match p {
        Predicate::Leaf(leaf) => {
            let unbounded = Interval::everything();
            Ok(match &leaf.op {
                Operator::Range(lo, hi) => Interval::closed(axis_of(lo, spec)?, axis_of(hi, spec)?),
                Operator::Equal(v) => {
                    let x = axis_of(v, spec)?;
                    Interval::closed(x, x)
                }
                Operator::Gte(v) => Interval { lo: axis_of(v, spec)?, lo_closed: true, ..unbounded },
                Operator::Gt(v) => Interval { lo: axis_of(v, spec)?, lo_closed: false, ..unbounded },
                Operator::Lte(v) => Interval { hi: axis_of(v, spec)?, hi_closed: true, ..unbounded },
                Operator::Lt(v) => Interval { hi: axis_of(v, spec)?, hi_closed: false, ..unbounded },
                Operator::OneOf(_) | Operator::Valid(_) => {
                    return Err(format!("{:?} does not describe an interval", leaf.op.key()))
                }
            })
        }
        Predicate::And(children) => children.iter().try_fold(Interval::everything(), |acc, c| {
            Ok(acc.intersect(&interval_of(c, spec)?))
        }),
        Predicate::Or(_) => Err("a disjunction does not describe a single interval".into()),
        Predicate::Not(_) => Err("a negation does not describe a single interval".into()),
    }
}

fn categories_of(p: &Predicate, spec: &FieldSpec) -> Result<Vec<String>, String> {
    let text = |lit: &Literal| match coerce_literal(lit, Measure::Nominal, &spec.name) {
        Some(AxisValue::Text(s)) => Ok(s),
        _ => Err(format!("{lit} is not a category")),
    };
    match p {
        Predicate::Leaf(leaf) => match &leaf.op {
            Operator::Equal(v) => Ok(vec![text(v)?]),
            Operator::OneOf(vs) => vs.iter().map(text).collect(),
            _ => Err(format!(
                "{:?} cannot group categories; use equal or oneOf",
                leaf.op.key()
            )),
        },
        Predicate::Or(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(categories_of(c, spec)?);
            }
            Ok(out)
        }
        _ => Err("category groups must be equal, oneOf, or a disjunction of those".into()),
    }
}

/// Parts of `[min, max]` that no interval covers.
pub(crate) fn uncovered(intervals: &[Interval], min: f64, max: f64) -> Vec<Interval> {
    let mut sorted: Vec<&Interval> = intervals.iter().filter(|i| !i.is_empty()).collect();
    sorted.sort_by(|a, b| {
        a.lo.partial_cmp(&b.lo)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.lo_closed.cmp(&a.lo_closed))
    });

    let mut gaps = Vec::new();
    // everything below `reach` is covered; `reach` itself iff `reach_closed`
    let (mut reach, mut reach_closed) = (min, false);
    let done = |reach: f64, closed: bool| reach > max || (reach == max && closed);
    for iv in sorted {
        if done(reach, reach_closed) {
            break;
        }
        let starts_later = iv.lo > reach || (iv.lo == reach && !reach_closed && !iv.lo_closed);
        if starts_later {
            let gap = if iv.lo > max {
                Interval { lo: reach, lo_closed: !reach_closed, hi: max, hi_closed: true }
            } else {
                Interval { lo: reach, lo_closed: !reach_closed, hi: iv.lo, hi_closed: !iv.lo_closed }
            };
            if !gap.is_empty() {
                gaps.push(gap);
            }
        }
        if starts_later || iv.hi > reach || (iv.hi == reach && iv.hi_closed) {
            reach_closed = iv.hi_closed || (iv.hi == reach && reach_closed);
            reach = iv.hi;
        }
    }
    if !done(reach, reach_closed) {
        let gap = Interval { lo: reach, lo_closed: !reach_closed, hi: max, hi_closed: true };
        if !gap.is_empty() {
            gaps.push(gap);
        }
    }
    gaps
}

fn grid(min: f64, max: f64) -> impl Iterator<Item = f64> {
    (0..=GRID_STEPS).map(move |i| {
        if i == GRID_STEPS {
            max
        } else {
            min + (max - min) * (i as f64) / (GRID_STEPS as f64)
        }
    })
}

/// Validates a bin set: continuous fields need pairwise-disjoint intervals
/// covering the data extent, nominal fields need category groups that are
/// mutually exclusive and exhaustive.
pub fn validate_bin_set(set: &ScaffoldSet, d: &Dataset) -> Result<Vec<Diagnostic>, BinError> {
    let ScaffoldKind::Bins { field } = &set.kind else {
        return Err(BinError::NotBins);
    };
    let spec = d
        .field(field)
        .ok_or_else(|| BinError::UnknownField(field.clone()))?;

    for (i, group) in set.groups.iter().enumerate() {
        let refs = group.predicate.referenced_fields();
        if refs.len() != 1 || !refs.contains(field) {
            let listed: Vec<&str> = refs.iter().map(String::as_str).collect();
            return Err(BinError::NotABinPredicate {
                group: i,
                reason: if listed.is_empty() {
                    "its predicate references no field".into()
                } else {
                    format!("its predicate references {}, not only {field:?}", listed.join(", "))
                },
            });
        }
    }

    let mut out: Vec<Diagnostic> = Vec::new();
    for (i, group) in set.groups.iter().enumerate() {
        out.extend(
            typecheck(&group.predicate, d.fields())
                .into_iter()
                .map(|x| x.for_group(i)),
        );
    }
    if has_errors(&out) {
        return Ok(out);
    }

    if spec.measure.is_continuous() {
        check_intervals(set, spec, d, &mut out)?;
    } else {
        check_categories(set, spec, &mut out)?;
    }
    Ok(out)
}

fn check_intervals(
    set: &ScaffoldSet,
    spec: &FieldSpec,
    d: &Dataset,
    out: &mut Vec<Diagnostic>,
) -> Result<(), BinError> {
    let intervals: Vec<Interval> = set
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            interval_of(&g.predicate, spec)
                .map_err(|reason| BinError::NotABinPredicate { group: i, reason })
        })
        .collect::<Result<_, _>>()?;

    for i in 0..intervals.len() {
        for j in i + 1..intervals.len() {
            let shared = intervals[i].intersect(&intervals[j]);
            if !shared.is_empty() {
                out.push(
                    Diagnostic::error(
                        Code::OverlappingBins,
                        format!(
                            "bins {i} ({:?}) and {j} ({:?}) overlap on {}",
                            set.groups[i].name,
                            set.groups[j].name,
                            shared.render(spec.measure)
                        ),
                    )
                    .for_group(j),
                );
            }
        }
    }

    let (min, max) = spec
        .extent
        .axis_bounds()
        .expect("continuous fields have axis bounds");
    let values: Vec<f64> = d
        .column(&spec.name)
        .into_iter()
        .flatten()
        .filter_map(|v| v.as_axis())
        .collect();
    for gap in uncovered(&intervals, min, max) {
        let matters = grid(min, max).any(|g| gap.contains(g)) || values.iter().any(|v| gap.contains(*v));
        if matters {
            out.push(Diagnostic::error(
                Code::CoverageGap,
                format!(
                    "no bin covers {} of {:?}; the bins must cover the data, which spans {}",
                    gap.render(spec.measure),
                    spec.name,
                    spec.extent.describe()
                ),
            ));
        }
    }

    for (i, group) in set.groups.iter().enumerate() {
        out.extend(out_of_extent(&group.predicate, d).into_iter().map(|x| x.for_group(i)));
    }
    Ok(())
}

fn check_categories(
    set: &ScaffoldSet,
    spec: &FieldSpec,
    out: &mut Vec<Diagnostic>,
) -> Result<(), BinError> {
    let mut membership: IndexMap<String, BTreeSet<usize>> = IndexMap::new();
    for (i, group) in set.groups.iter().enumerate() {
        let cats = categories_of(&group.predicate, spec)
            .map_err(|reason| BinError::NotABinPredicate { group: i, reason })?;
        for c in cats {
            membership.entry(c).or_default().insert(i);
        }
    }
    let describe = |i: usize| format!("{i} ({:?})", set.groups[i].name);

    for (category, groups) in &membership {
        if groups.len() > 1 {
            let listed: Vec<String> = groups.iter().map(|&g| describe(g)).collect();
            out.push(
                Diagnostic::error(
                    Code::NonExclusiveGroups,
                    format!(
                        "category {category:?} of {:?} appears in more than one group: {}",
                        spec.name,
                        listed.join(", ")
                    ),
                )
                .for_group(*groups.iter().nth(1).expect("len > 1")),
            );
        }
    }
    for cat in spec.extent.categories() {
        if !membership.contains_key(&cat.category) {
            out.push(Diagnostic::error(
                Code::NonExhaustiveGroups,
                format!(
                    "category {:?} of {:?} ({} records) is not in any group",
                    cat.category, spec.name, cat.count
                ),
            ));
        }
    }
    for (category, groups) in &membership {
        if !spec.extent.categories().iter().any(|c| &c.category == category) {
            for &g in groups {
                out.push(
                    Diagnostic::warning(
                        Code::OutOfExtent,
                        format!(
                            "group {} lists {category:?}, which does not occur in {:?}",
                            describe(g),
                            spec.name
                        ),
                    )
                    .for_group(g),
                );
            }
        }
    }
    Ok(())
}

/// Conventional binning: `k` equal-width intervals over the extent, each
/// lower-inclusive, the last also upper-inclusive. A zero-width extent
/// yields a single point bin.
/// Drops float noise such as `26.200000000000003`.
fn tidy(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

pub fn equal_width_bins(d: &Dataset, field: &str, k: usize) -> Result<ScaffoldSet, BinError> {
    let spec = d
        .field(field)
        .ok_or_else(|| BinError::UnknownField(field.to_string()))?;
    if !spec.measure.is_continuous() {
        return Err(BinError::FieldNotContinuous(field.to_string()));
    }
    if k == 0 {
        return Err(BinError::ZeroBins);
    }
    let (min, max) = spec
        .extent
        .axis_bounds()
        .expect("continuous fields have axis bounds");
    let temporal = spec.measure == Measure::Temporal;

    let k = if min == max { 1 } else { k };
    let width = (max - min) / k as f64;
    // whole days once bins span two or more, so edges read as dates
    let day = 86_400_000.0;
    let snap_days = temporal && width >= 2.0 * day;
    let bounds: Vec<f64> = (0..=k)
        .map(|i| match i {
            0 => min,
            i if i == k => max,
            i if snap_days => ((min + width * i as f64) / day).round() * day,
            i if temporal => (min + width * i as f64).round(),
            i => tidy(min + width * i as f64),
        })
        .collect();

    let literal = |x: f64| {
        if temporal {
            Literal::Text(format_millis(x as i64))
        } else {
            Literal::Number(x)
        }
    };
    let label = |x: f64| {
        if temporal {
            format_millis(x as i64)
        } else {
            display_number(x)
        }
    };

    let groups = (0..k)
        .map(|i| {
            let (lo, hi) = (bounds[i], bounds[i + 1]);
            let predicate = if i + 1 == k {
                Predicate::leaf(field, Operator::Range(literal(lo), literal(hi)))
            } else {
                Predicate::And(vec![
                    Predicate::leaf(field, Operator::Gte(literal(lo))),
                    Predicate::leaf(field, Operator::Lt(literal(hi))),
                ])
            };
            SemanticScaffold {
                name: format!("{} to {}", label(lo), label(hi)),
                explanation: String::new(),
                predicate,
            }
        })
        .collect();

    Ok(ScaffoldSet {
        kind: ScaffoldKind::Bins { field: field.to_string() },
        groups,
        provenance: Provenance::Fallback,
    })
}

/// One bin per category of a nominal field, in order of first appearance.
pub fn category_bins(d: &Dataset, field: &str) -> Result<ScaffoldSet, BinError> {
    let spec = d
        .field(field)
        .ok_or_else(|| BinError::UnknownField(field.to_string()))?;
    let cats = spec.extent.categories();
    if cats.is_empty() {
        return Err(BinError::NoCategories(field.to_string()));
    }
    Ok(ScaffoldSet {
        kind: ScaffoldKind::Bins { field: field.to_string() },
        groups: cats
            .iter()
            .map(|c| SemanticScaffold {
                name: c.category.clone(),
                explanation: String::new(),
                predicate: Predicate::leaf(field, Operator::Equal(Literal::Text(c.category.clone()))),
            })
            .collect(),
        provenance: Provenance::Fallback,
    })
}

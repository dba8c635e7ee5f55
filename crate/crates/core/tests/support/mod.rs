//! Shared test support: an independent brute-force predicate interpreter that
//! works on raw JSON, plus generators for predicates, datasets and bin sets.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use serde_json::{json, Map, Value};

use scaffold_core::dataset::{ingest, Dataset, Format};

pub static FIELDS: [&str; 5] = ["num", "price", "cat", "date", "ghost"];
pub static CATEGORIES: [&str; 5] = ["a", "b", "c", "d", "1"];
pub static OPERATORS: [&str; 8] = ["equal", "lt", "lte", "gt", "gte", "range", "oneOf", "valid"];

/// The core fixture tree. This module is also compiled into the cli crate's
/// acceptance harness, hence the lookup relative to either manifest.
pub fn fixtures_dir() -> std::path::PathBuf {
    let here = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    if here.ends_with("core") {
        here.join("fixtures")
    } else {
        here.join("../core/fixtures")
    }
}

pub fn load(name: &str) -> Dataset {
    let path = fixtures_dir().join("data").join(name);
    let bytes = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ingest(&bytes, Format::from_path(&path)).unwrap()
}

/// Records of a JSON fixture, or of a CSV fixture where numeric-looking cells
/// become numbers and empty cells become null.
pub fn raw_records(name: &str) -> Vec<Map<String, Value>> {
    let path = fixtures_dir().join("data").join(name);
    if name.ends_with(".json") {
        return serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    }
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    reader
        .records()
        .map(|row| {
            let row = row.unwrap();
            header
                .iter()
                .zip(row.iter())
                .map(|(h, cell)| {
                    let v = match cell.parse::<f64>() {
                        _ if cell.is_empty() => Value::Null,
                        Ok(x) => json!(x),
                        Err(_) => json!(cell),
                    };
                    (h.clone(), v)
                })
                .collect()
        })
        .collect()
}

/// Draws `n` values from a strategy with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

// ---- the oracle -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, PartialOrd)]
enum Cmp {
    Num(f64),
    Day(String),
    Text(String),
}

fn is_iso_day(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && s.chars().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit())
        && (1..=12).contains(&s[5..7].parse::<u32>().unwrap())
        && (1..=31).contains(&s[8..10].parse::<u32>().unwrap())
}

/// Day or `YYYY-MM-DDTHH:MM:SS.sssZ` instant as a sortable string.
fn instant(s: &str) -> Option<String> {
    match s.len() {
        10 if is_iso_day(s) => Some(format!("{s}T00:00:00.000")),
        24 if is_iso_day(&s[..10]) && s.ends_with('Z') => {
            let time = &s[11..23];
            let shape = time.char_indices().all(|(i, c)| match i {
                2 | 5 => c == ':',
                8 => c == '.',
                _ => c.is_ascii_digit(),
            });
            shape.then(|| s[..23].to_string())
        }
        _ => None,
    }
}

fn kind_of(field: &str) -> &'static str {
    match field {
        "num" | "price" | "x" | "Miles_per_Gallon" | "Horsepower" | "fertility" | "rate" | "value" => {
            "quantitative"
        }
        "cat" | "v" | "symbol" | "Origin" | "variety" | "country" | "category" => "nominal",
        "date" => "temporal",
        _ => "unknown",
    }
}

fn literal(field: &str, lit: &Value) -> Option<Cmp> {
    match (kind_of(field), lit) {
        ("quantitative", Value::Number(n)) => n.as_f64().map(Cmp::Num),
        ("nominal", Value::String(s)) => Some(Cmp::Text(s.clone())),
        ("nominal", Value::Number(n)) => {
            let x = n.as_f64()?;
            assert!(x.fract() == 0.0, "generators only use integral nominal literals");
            Some(Cmp::Text(format!("{}", x as i64)))
        }
        ("nominal", Value::Bool(b)) => Some(Cmp::Text(b.to_string())),
        ("temporal", Value::String(s)) if instant(s).is_some() => instant(s).map(Cmp::Day),
        ("temporal", Value::String(s)) if s.len() == 4 && s.chars().all(|c| c.is_ascii_digit()) => {
            Some(Cmp::Day(format!("{s}-01-01T00:00:00.000")))
        }
        ("temporal", Value::Number(n)) => match n.as_i64() {
            Some(y) if (1000..=9999).contains(&y) => Some(Cmp::Day(format!("{y}-01-01T00:00:00.000"))),
            _ => None,
        },
        _ => None,
    }
}

fn cell(field: &str, record: &Map<String, Value>) -> Option<Cmp> {
    match (kind_of(field), record.get(field)?) {
        (_, Value::Null) => None,
        ("quantitative", Value::Number(n)) => n.as_f64().map(Cmp::Num),
        ("nominal", Value::String(s)) => Some(Cmp::Text(s.clone())),
        ("temporal", Value::String(s)) => instant(s).map(Cmp::Day),
        _ => None,
    }
}

/// Brute-force reading of a JSON predicate against one JSON record.
pub fn oracle(p: &Value, record: &Map<String, Value>) -> bool {
    let obj = p.as_object().expect("predicate object");
    if let Some(Value::Array(items)) = obj.get("and") {
        return items.iter().all(|q| oracle(q, record));
    }
    if let Some(Value::Array(items)) = obj.get("or") {
        return items.iter().any(|q| oracle(q, record));
    }
    if let Some(inner) = obj.get("not") {
        return !oracle(inner, record);
    }
    let field = obj["field"].as_str().unwrap();
    let (op, operand) = obj.iter().find(|(k, _)| k.as_str() != "field").unwrap();
    let c = cell(field, record);
    if op == "valid" {
        return c.is_some() == operand.as_bool().unwrap();
    }
    let Some(c) = c else { return false };
    let ordered = kind_of(field) != "nominal";
    let same = |l: &Option<Cmp>| matches!(l, Some(l) if std::mem::discriminant(l) == std::mem::discriminant(&c));
    let lit = |v: &Value| literal(field, v);
    match op.as_str() {
        "equal" => lit(operand).map_or(false, |l| l == c),
        "oneOf" => operand.as_array().unwrap().iter().any(|v| lit(v).map_or(false, |l| l == c)),
        "lt" | "lte" | "gt" | "gte" => {
            let l = lit(operand);
            if !ordered || !same(&l) {
                return false;
            }
            let l = l.unwrap();
            match op.as_str() {
                "lt" => c < l,
                "lte" => c <= l,
                "gt" => c > l,
                _ => c >= l,
            }
        }
        "range" => {
            let pair = operand.as_array().unwrap();
            let (lo, hi) = (lit(&pair[0]), lit(&pair[1]));
            if !ordered || !same(&lo) || !same(&hi) {
                return false;
            }
            lo.unwrap() <= c && c <= hi.unwrap()
        }
        other => panic!("unexpected operator {other}"),
    }
}

pub fn oracle_selection(p: &Value, records: &[Map<String, Value>]) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| oracle(p, r))
        .map(|(i, _)| i)
        .collect()
}

// ---- synthetic records ----------------------------------------------------

fn quarter(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo * 4..=hi * 4).prop_map(|q| q as f64 / 4.0)
}

fn day() -> impl Strategy<Value = String> {
    (2000..=2010u32, 1..=12u32, prop_oneof![Just(1u32), Just(15u32), Just(28u32)])
        .prop_map(|(y, m, d)| format!("{y}-{m:02}-{d:02}"))
}

fn nullable(v: BoxedStrategy<Value>) -> BoxedStrategy<Value> {
    prop_oneof![1 => Just(Value::Null), 6 => v].boxed()
}

fn record() -> impl Strategy<Value = Map<String, Value>> {
    (
        nullable(quarter(0, 100).prop_map(|x| json!(x)).boxed()),
        nullable((0..=50i64).prop_map(|x| json!(x)).boxed()),
        nullable(proptest::sample::select(&CATEGORIES[..]).prop_map(|c| json!(c)).boxed()),
        nullable(day().prop_map(|d| json!(d)).boxed()),
    )
        .prop_map(|(num, price, cat, date)| {
            let mut m = Map::new();
            m.insert("num".into(), num);
            m.insert("price".into(), price);
            m.insert("cat".into(), cat);
            m.insert("date".into(), date);
            m
        })
}

/// Records whose first row is fully populated, so every column infers the
/// intended measure.
pub fn records(rows: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Map<String, Value>>> {
    proptest::collection::vec(record(), rows).prop_map(|mut rs| {
        let first = &mut rs[0];
        first.insert("num".into(), json!(50));
        first.insert("price".into(), json!(10));
        first.insert("cat".into(), json!("a"));
        first.insert("date".into(), json!("2005-06-15"));
        rs
    })
}

pub fn dataset_of(records: &[Map<String, Value>]) -> Dataset {
    let text = serde_json::to_string(records).unwrap();
    ingest(text.as_bytes(), Format::JsonRecords).unwrap()
}

// ---- predicates -----------------------------------------------------------

fn literal_for(field: &'static str) -> BoxedStrategy<Value> {
    let own: BoxedStrategy<Value> = match field {
        "num" | "price" => quarter(-5, 105).prop_map(|x| json!(x)).boxed(),
        "cat" => prop_oneof![
            proptest::sample::select(&CATEGORIES[..]).prop_map(|c| json!(c)),
            Just(json!("zz")),
            (0..3i64).prop_map(|x| json!(x)),
        ]
        .boxed(),
        "date" => prop_oneof![
            4 => day().prop_map(|d| json!(d)),
            1 => (1999..=2011i64).prop_map(|y| json!(y.to_string())),
            1 => (1999..=2011i64).prop_map(|y| json!(y)),
            1 => Just(json!("someday")),
            1 => Just(json!(12.5)),
        ]
        .boxed(),
        _ => prop_oneof![quarter(0, 100).prop_map(|x| json!(x)), Just(json!("a"))].boxed(),
    };
    let stray = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        Just(json!("x")),
        Just(json!(7)),
    ];
    prop_oneof![6 => own, 1 => stray].boxed()
}

fn leaf() -> impl Strategy<Value = Value> {
    (proptest::sample::select(&FIELDS[..]), 0..OPERATORS.len()).prop_flat_map(|(field, op)| {
        let lit = literal_for(field);
        let operand: BoxedStrategy<Value> = match OPERATORS[op] {
            "range" => (lit.clone(), lit).prop_map(|(a, b)| json!([a, b])).boxed(),
            "oneOf" => proptest::collection::vec(lit, 0..4).prop_map(Value::Array).boxed(),
            "valid" => any::<bool>().prop_map(Value::Bool).boxed(),
            _ => lit,
        };
        operand.prop_map(move |v| {
            let mut m = Map::new();
            m.insert("field".into(), json!(field));
            m.insert(OPERATORS[op].into(), v);
            Value::Object(m)
        })
    })
}

/// Random predicates with up to three levels of and/or/not above the leaves.
pub fn predicate() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(3, 48, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..4).prop_map(|v| json!({ "and": v })),
            proptest::collection::vec(inner.clone(), 0..4).prop_map(|v| json!({ "or": v })),
            inner.prop_map(|p| json!({ "not": p })),
        ]
    })
}

pub fn operators_used(p: &Value, out: &mut std::collections::BTreeSet<String>) {
    let obj = p.as_object().unwrap();
    for (k, v) in obj {
        match k.as_str() {
            "and" | "or" => v.as_array().unwrap().iter().for_each(|q| operators_used(q, out)),
            "not" => operators_used(v, out),
            "field" => {}
            op => {
                out.insert(op.to_string());
            }
        }
    }
}

// ---- bin sets -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinClass {
    Partition,
    Overlapping,
    Gapped,
}

#[derive(Debug, Clone)]
pub struct IntervalCase {
    pub class: BinClass,
    pub values: Vec<f64>,
    pub predicates: Vec<Value>,
}

fn ge(x: f64) -> Value {
    json!({"field": "x", "gte": x})
}
fn gt(x: f64) -> Value {
    json!({"field": "x", "gt": x})
}
fn le(x: f64) -> Value {
    json!({"field": "x", "lte": x})
}
fn lt(x: f64) -> Value {
    json!({"field": "x", "lt": x})
}

/// Bins over `[0, 100]` built from cut points. `lower_closed` picks the
/// `[a, b)` convention, otherwise `(a, b]`. `tweak` is (bin, amount) applied
/// to one upper edge; positive widens, negative narrows.
fn interval_bins(cuts: &[f64], lower_closed: bool, loose_ends: bool, tweak: Option<(usize, f64)>) -> Vec<Value> {
    let mut edges = vec![0.0];
    edges.extend_from_slice(cuts);
    edges.push(100.0);
    let k = edges.len() - 1;
    (0..k)
        .map(|i| {
            let (lo, mut hi) = (edges[i], edges[i + 1]);
            if let Some((j, amount)) = tweak {
                if j == i {
                    hi += amount;
                }
            }
            let first = i == 0;
            let last = i + 1 == k;
            if lower_closed {
                match (first && loose_ends, last) {
                    (_, true) if loose_ends && hi >= 100.0 => ge(lo),
                    (_, true) => json!({"field": "x", "range": [lo, hi]}),
                    (true, false) => lt(hi),
                    (false, false) => json!({"and": [ge(lo), lt(hi)]}),
                }
            } else {
                match (first, last && loose_ends) {
                    (true, _) if !loose_ends => json!({"field": "x", "range": [lo, hi]}),
                    (true, _) => le(hi),
                    (false, true) if hi >= 100.0 => gt(lo),
                    _ => json!({"and": [gt(lo), le(hi)]}),
                }
            }
        })
        .collect()
}

pub fn interval_case(class: BinClass) -> impl Strategy<Value = IntervalCase> {
    let cuts = proptest::collection::btree_set(4..396u32, 1..6)
        .prop_map(|s| s.into_iter().map(|q| q as f64 / 4.0).collect::<Vec<f64>>());
    let values = proptest::collection::vec(quarter(0, 100), 0..30);
    (cuts, values, any::<bool>(), any::<bool>(), any::<u32>(), 1..40u32).prop_map(
        move |(cuts, mut values, lower_closed, loose_ends, pick, amount)| {
            values.push(0.0);
            values.push(100.0);
            let k = cuts.len() + 1;
            let bin = pick as usize % k;
            let predicates = match class {
                BinClass::Partition => interval_bins(&cuts, lower_closed, loose_ends, None),
                BinClass::Overlapping => {
                    // widen one bin into its neighbour, or repeat one bin
                    if bin + 1 < k && pick % 3 != 0 {
                        let edges: Vec<f64> = std::iter::once(0.0).chain(cuts.iter().copied()).chain([100.0]).collect();
                        let room = edges[bin + 2] - edges[bin + 1];
                        let widen = (amount as f64 / 40.0 * room).max(0.25).min(room);
                        interval_bins(&cuts, lower_closed, loose_ends, Some((bin, widen)))
                    } else {
                        let mut p = interval_bins(&cuts, lower_closed, loose_ends, None);
                        p.push(p[bin].clone());
                        p
                    }
                }
                BinClass::Gapped => {
                    let edges: Vec<f64> = std::iter::once(0.0).chain(cuts.iter().copied()).chain([100.0]).collect();
                    let width = edges[bin + 1] - edges[bin];
                    if width > 0.5 && pick % 4 != 0 {
                        let shrink = (amount as f64 / 40.0 * width).clamp(0.25, width - 0.25);
                        interval_bins(&cuts, lower_closed, loose_ends, Some((bin, -shrink)))
                    } else {
                        let mut p = interval_bins(&cuts, lower_closed, loose_ends, None);
                        p.remove(bin);
                        if p.is_empty() {
                            p.push(json!({"field": "x", "range": [0.0, 50.0]}));
                        }
                        p
                    }
                }
            };
            IntervalCase { class, values, predicates }
        },
    )
}

fn x_record(x: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("x".into(), json!(x));
    m
}

/// Points where membership of any interval can change, plus one point inside
/// each stretch between them.
fn probe_points(predicates: &[Value]) -> Vec<f64> {
    let mut edges: Vec<f64> = Vec::new();
    fn collect(p: &Value, out: &mut Vec<f64>) {
        match p {
            Value::Number(n) => out.push(n.as_f64().unwrap()),
            Value::Array(items) => items.iter().for_each(|q| collect(q, out)),
            Value::Object(obj) => obj.values().for_each(|q| collect(q, out)),
            _ => {}
        }
    }
    predicates.iter().for_each(|p| collect(p, &mut edges));
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let mut points = edges.clone();
    for w in edges.windows(2) {
        points.push((w[0] + w[1]) / 2.0);
    }
    if let (Some(first), Some(last)) = (edges.first(), edges.last()) {
        points.push(first - 1.0);
        points.push(last + 1.0);
    }
    points
}

/// Some point of the line lies in two bins.
pub fn oracle_overlaps(predicates: &[Value]) -> bool {
    probe_points(predicates).into_iter().any(|x| {
        let r = x_record(x);
        predicates.iter().filter(|p| oracle(p, &r)).count() >= 2
    })
}

/// Some grid point of the extent, or some data value, lies in no bin.
pub fn oracle_gap(predicates: &[Value], values: &[f64]) -> bool {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid = (0..=1000).map(|i| if i == 1000 { max } else { min + (max - min) * i as f64 / 1000.0 });
    grid.chain(values.iter().copied()).any(|x| {
        let r = x_record(x);
        !predicates.iter().any(|p| oracle(p, &r))
    })
}

pub fn interval_dataset(values: &[f64]) -> Dataset {
    let records: Vec<Value> = values.iter().map(|x| json!({ "x": x })).collect();
    ingest(serde_json::to_string(&records).unwrap().as_bytes(), Format::JsonRecords).unwrap()
}

#[derive(Debug, Clone)]
pub struct CategoryCase {
    pub data: Vec<String>,
    pub extra: Vec<String>,
    pub predicates: Vec<Value>,
}

static LETTERS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"];

/// Each category goes to zero, one or two of `groups` groups; sometimes a
/// category absent from the data is mentioned as well.
pub fn category_case() -> impl Strategy<Value = CategoryCase> {
    (2..=6usize, 1..=4usize, proptest::collection::vec((0..8usize, 0..12u32), 8), any::<bool>(), any::<u8>())
        .prop_map(|(n_data, groups, picks, with_extra, shape)| {
            let data: Vec<String> = LETTERS[..n_data].iter().map(|s| s.to_string()).collect();
            let extra: Vec<String> = if with_extra { vec!["omega".to_string()] } else { Vec::new() };
            let mut members: Vec<Vec<String>> = vec![Vec::new(); groups];
            for (i, cat) in data.iter().chain(&extra).enumerate() {
                let (g, roll) = picks[i % picks.len()];
                match roll {
                    0 => {}
                    1 => {
                        members[g % groups].push(cat.clone());
                        members[(g + 1) % groups].push(cat.clone());
                    }
                    _ => members[g % groups].push(cat.clone()),
                }
            }
            let predicates = members
                .into_iter()
                .enumerate()
                .map(|(i, cats)| match (cats.len(), (shape as usize + i) % 3) {
                    (1, 0) => json!({"field": "v", "equal": cats[0]}),
                    (n, 1) if n > 0 => {
                        json!({"or": cats.iter().map(|c| json!({"field": "v", "equal": c})).collect::<Vec<_>>()})
                    }
                    _ => json!({"field": "v", "oneOf": cats}),
                })
                .collect();
            CategoryCase { data, extra, predicates }
        })
}

pub fn category_dataset(case: &CategoryCase) -> Dataset {
    let records: Vec<Value> = case.data.iter().map(|c| json!({ "v": c })).collect();
    ingest(serde_json::to_string(&records).unwrap().as_bytes(), Format::JsonRecords).unwrap()
}

fn v_record(c: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("v".into(), json!(c));
    m
}

/// Some mentioned or present category falls in two groups.
pub fn oracle_non_exclusive(case: &CategoryCase) -> bool {
    case.data.iter().chain(&case.extra).any(|c| {
        let r = v_record(c);
        case.predicates.iter().filter(|p| oracle(p, &r)).count() >= 2
    })
}

/// Some category present in the data falls in no group.
pub fn oracle_non_exhaustive(case: &CategoryCase) -> bool {
    case.data.iter().any(|c| {
        let r = v_record(c);
        !case.predicates.iter().any(|p| oracle(p, &r))
    })
}

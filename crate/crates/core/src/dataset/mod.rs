//! Tabular datasets: ingest, measure inference, extents and sampling.
//!
//! A [`Dataset`] is immutable once built. Columns keep their source order and
//! nominal categories keep their order of first appearance, so everything
//! derived from a dataset (prompts, outlines, summaries) is deterministic.

mod value;

pub use value::{
    display_number, format_millis, format_number, header_allows_bare_year, json_number,
    parse_number, parse_temporal_millis, parse_timestamp, DataValue, Timestamp,
};

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Rows accepted by [`ingest`] unless overridden.
pub const DEFAULT_MAX_ROWS: usize = 50_000;

/// Share of non-null cells that must parse for a column to take a type.
const INFERENCE_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Nominal,
    Quantitative,
    Temporal,
}

impl Measure {
    pub fn is_continuous(self) -> bool {
        !matches!(self, Measure::Nominal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Nominal => "nominal",
            Measure::Quantitative => "quantitative",
            Measure::Temporal => "temporal",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldExtent {
    Quantitative { min: f64, max: f64 },
    Temporal { min: Timestamp, max: Timestamp },
    Nominal(Vec<CategoryCount>),
}

impl FieldExtent {
    pub fn measure(&self) -> Measure {
        match self {
            FieldExtent::Quantitative { .. } => Measure::Quantitative,
            FieldExtent::Temporal { .. } => Measure::Temporal,
            FieldExtent::Nominal(_) => Measure::Nominal,
        }
    }

    /// `(min, max)` on the continuous axis (timestamps as epoch millis).
    pub fn axis_bounds(&self) -> Option<(f64, f64)> {
        match self {
            FieldExtent::Quantitative { min, max } => Some((*min, *max)),
            FieldExtent::Temporal { min, max } => Some((min.millis as f64, max.millis as f64)),
            FieldExtent::Nominal(_) => None,
        }
    }

    pub fn categories(&self) -> &[CategoryCount] {
        match self {
            FieldExtent::Nominal(c) => c,
            _ => &[],
        }
    }

    /// Human-readable extent, e.g. `9 to 46.6` or `USA, Europe, Japan`.
    pub fn describe(&self) -> String {
        match self {
            FieldExtent::Quantitative { min, max } => {
                format!("{} to {}", format_number(*min), format_number(*max))
            }
            FieldExtent::Temporal { min, max } => format!("{min} to {max}"),
            FieldExtent::Nominal(cats) => cats
                .iter()
                .map(|c| c.category.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FieldExtent::Quantitative { min, max } => {
                serde_json::json!({ "min": json_number(*min), "max": json_number(*max) })
            }
            FieldExtent::Temporal { min, max } => {
                serde_json::json!({ "min": min.lexical, "max": max.lexical })
            }
            FieldExtent::Nominal(cats) => serde_json::json!({
                "categories": cats
                    .iter()
                    .map(|c| serde_json::json!({ "category": c.category, "count": c.count }))
                    .collect::<Vec<_>>()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub measure: Measure,
    pub extent: FieldExtent,
}

impl FieldSpec {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "measure": self.measure,
            "extent": self.extent.to_json(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonRecords,
}

impl Format {
    /// Guesses the format from a file name; anything not ending in `.json`
    /// is read as CSV.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::JsonRecords,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "json-records" => Ok(Format::JsonRecords),
            other => Err(format!("unknown format {other:?} (expected csv or json-records)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("decode error: {0}")]
    Decode(String),
    #[error("inconsistent columns: {0}")]
    InconsistentColumns(String),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("non-finite number {text:?} in field {field:?} at row {row}")]
    NonFiniteNumber { field: String, row: usize, text: String },
    #[error("dataset has {rows} rows, more than the limit of {limit}")]
    TooManyRows { rows: usize, limit: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub max_rows: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            max_rows: DEFAULT_MAX_ROWS,
        }
    }
}

/// Lookup of a cell by field name. Implemented for dataset rows and for
/// plain maps, so predicates can be evaluated against either.
pub trait FieldLookup {
    fn lookup(&self, field: &str) -> Option<&DataValue>;
}

impl FieldLookup for IndexMap<String, DataValue> {
    fn lookup(&self, field: &str) -> Option<&DataValue> {
        self.get(field)
    }
}

impl FieldLookup for HashMap<String, DataValue> {
    fn lookup(&self, field: &str) -> Option<&DataValue> {
        self.get(field)
    }
}

impl FieldLookup for std::collections::BTreeMap<String, DataValue> {
    fn lookup(&self, field: &str) -> Option<&DataValue> {
        self.get(field)
    }
}

/// Borrowed view of one dataset row.
#[derive(Debug, Clone, Copy)]
pub struct Row<'a> {
    fields: &'a [FieldSpec],
    cells: &'a [DataValue],
}

impl<'a> Row<'a> {
    pub fn get(&self, field: &str) -> Option<&'a DataValue> {
        self.fields
            .iter()
            .position(|f| f.name == field)
            .map(|i| &self.cells[i])
    }

    pub fn cells(&self) -> &'a [DataValue] {
        self.cells
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a str, &'a DataValue)> + 'a {
        self.fields
            .iter()
            .map(|f| f.name.as_str())
            .zip(self.cells.iter())
    }

    pub fn to_map(&self) -> IndexMap<String, DataValue> {
        self.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.iter()
                .map(|(k, v)| (k.to_string(), v.to_json()))
                .collect(),
        )
    }
}

impl FieldLookup for Row<'_> {
    fn lookup(&self, field: &str) -> Option<&DataValue> {
        self.get(field)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    id: String,
    fields: Vec<FieldSpec>,
    rows: Vec<Vec<DataValue>>,
}

impl Dataset {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn field(&self, name: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, index: usize) -> Row<'_> {
        Row {
            fields: &self.fields,
            cells: &self.rows[index],
        }
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = Row<'_>> + '_ {
        self.rows.iter().map(|cells| Row {
            fields: &self.fields,
            cells,
        })
    }

    /// All values of one column, in row order.
    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = &DataValue> + '_> {
        let i = self.field_index(name)?;
        Some(self.rows.iter().map(move |r| &r[i]))
    }

    pub fn null_count(&self, name: &str) -> usize {
        self.column(name)
            .map(|c| c.filter(|v| v.is_null()).count())
            .unwrap_or(0)
    }

    pub fn to_json_records(&self) -> serde_json::Value {
        serde_json::Value::Array(self.rows().map(|r| r.to_json()).collect())
    }

    /// Field summary used by the CLI and HTTP service.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "datasetId": self.id,
            "rowCount": self.row_count(),
            "fields": self.fields.iter().map(FieldSpec::summary_json).collect::<Vec<_>>(),
        })
    }
}

/// Parses `bytes` into a dataset with inferred measures and extents.
pub fn ingest(bytes: &[u8], format: Format) -> Result<Dataset, IngestError> {
    ingest_with(bytes, format, IngestOptions::default())
}

pub fn ingest_with(
    bytes: &[u8],
    format: Format,
    options: IngestOptions,
) -> Result<Dataset, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::Decode(e.to_string()))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (names, raw_rows) = match format {
        Format::Csv => read_csv(text)?,
        Format::JsonRecords => read_json_records(text)?,
    };
    if raw_rows.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    if raw_rows.len() > options.max_rows {
        return Err(IngestError::TooManyRows {
            rows: raw_rows.len(),
            limit: options.max_rows,
        });
    }

    let mut fields = Vec::with_capacity(names.len());
    let mut columns: Vec<Vec<DataValue>> = Vec::with_capacity(names.len());
    for (c, name) in names.iter().enumerate() {
        let raw: Vec<Option<&str>> = raw_rows.iter().map(|r| r[c].as_deref()).collect();
        let measure = infer_measure(name, &raw);
        let values = convert_column(name, measure, &raw)?;
        let extent = compute_extent(measure, &values);
        // An all-null column has no continuous extent; it is kept as an
        // empty nominal field.
        let (measure, extent) = match extent {
            Some(e) => (measure, e),
            None => (Measure::Nominal, FieldExtent::Nominal(Vec::new())),
        };
        fields.push(FieldSpec {
            name: name.clone(),
            measure,
            extent,
        });
        columns.push(values);
    }

    let row_count = raw_rows.len();
    let mut rows = vec![Vec::with_capacity(fields.len()); row_count];
    for column in columns {
        for (row, value) in rows.iter_mut().zip(column) {
            row.push(value);
        }
    }

    let mut hasher = Sha256::new();
    hasher.update(match format {
        Format::Csv => b"csv:".as_slice(),
        Format::JsonRecords => b"json:".as_slice(),
    });
    hasher.update(bytes);
    let digest = hasher.finalize();
    let id: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();

    Ok(Dataset {
        id: format!("ds-{id}"),
        fields,
        rows,
    })
}

type RawTable = (Vec<String>, Vec<Vec<Option<String>>>);

fn check_names(names: &[String]) -> Result<(), IngestError> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if name.is_empty() {
            return Err(IngestError::Decode("empty column name".into()));
        }
        if !seen.insert(name.as_str()) {
            return Err(IngestError::Decode(format!("duplicate column name {name:?}")));
        }
    }
    Ok(())
}

fn cell(text: &str) -> Option<String> {
    if text.trim().is_empty() {
        None
    } else {
        Some(text.to_string())
    }
}

fn read_csv(text: &str) -> Result<RawTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Decode(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(IngestError::Decode("missing header row".into()));
    }
    check_names(&names)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::Decode(e.to_string()))?;
        if record.len() > names.len() {
            return Err(IngestError::InconsistentColumns(format!(
                "row {} has {} cells but the header declares {}",
                i + 1,
                record.len(),
                names.len()
            )));
        }
        let mut row: Vec<Option<String>> = record.iter().map(cell).collect();
        row.resize(names.len(), None);
        rows.push(row);
    }
    Ok((names, rows))
}

fn read_json_records(text: &str) -> Result<RawTable, IngestError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IngestError::Decode(e.to_string()))?;
    let serde_json::Value::Array(items) = value else {
        return Err(IngestError::Decode("expected a top-level array of objects".into()));
    };
    let mut names: Vec<String> = Vec::new();
    let mut rows = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let serde_json::Value::Object(obj) = item else {
            return Err(IngestError::Decode(format!("record {i} is not an object")));
        };
        if i == 0 {
            names = obj.keys().cloned().collect();
            check_names(&names)?;
        } else if let Some(extra) = obj.keys().find(|k| !names.contains(k)) {
            return Err(IngestError::InconsistentColumns(format!(
                "record {i} has key {extra:?} that the first record does not declare"
            )));
        }
        let mut row = Vec::with_capacity(names.len());
        for name in &names {
            let raw = match obj.get(name) {
                None | Some(serde_json::Value::Null) => None,
                Some(serde_json::Value::String(s)) => cell(s),
                Some(serde_json::Value::Number(n)) => Some(n.to_string()),
                Some(serde_json::Value::Bool(b)) => Some(b.to_string()),
                Some(_) => {
                    return Err(IngestError::Decode(format!(
                        "record {i} field {name:?} holds a nested value"
                    )))
                }
            };
            row.push(raw);
        }
        rows.push(row);
    }
    Ok((names, rows))
}

/// Classifies a column from its raw cell texts. `None` cells are nulls and
/// are excluded from the percentage base.
pub fn infer_measure(header: &str, cells: &[Option<&str>]) -> Measure {
    let present: Vec<&str> = cells.iter().flatten().copied().collect();
    if present.is_empty() {
        return Measure::Nominal;
    }
    let bare_year = header_allows_bare_year(header);
    let total = present.len() as f64;
    let temporal = present
        .iter()
        .filter(|t| parse_temporal_millis(t, bare_year).is_some())
        .count();
    if temporal as f64 / total >= INFERENCE_THRESHOLD {
        return Measure::Temporal;
    }
    let numeric = present.iter().filter(|t| parse_number(t).is_some()).count();
    if numeric as f64 / total >= INFERENCE_THRESHOLD {
        return Measure::Quantitative;
    }
    Measure::Nominal
}

fn convert_column(
    name: &str,
    measure: Measure,
    raw: &[Option<&str>],
) -> Result<Vec<DataValue>, IngestError> {
    let bare_year = header_allows_bare_year(name);
    raw.iter()
        .enumerate()
        .map(|(row, cell)| {
            let Some(text) = cell else {
                return Ok(DataValue::Null);
            };
            Ok(match measure {
                Measure::Nominal => DataValue::Text(text.to_string()),
                Measure::Temporal => parse_timestamp(text.trim(), bare_year)
                    .map(DataValue::Timestamp)
                    .unwrap_or(DataValue::Null),
                Measure::Quantitative => match parse_number(text) {
                    Some(x) if x.is_finite() => DataValue::Number(x),
                    Some(_) => {
                        return Err(IngestError::NonFiniteNumber {
                            field: name.to_string(),
                            row,
                            text: text.to_string(),
                        })
                    }
                    None => DataValue::Null,
                },
            })
        })
        .collect()
}

fn compute_extent(measure: Measure, values: &[DataValue]) -> Option<FieldExtent> {
    match measure {
        Measure::Quantitative => {
            let mut nums = values.iter().filter_map(|v| match v {
                DataValue::Number(x) => Some(*x),
                _ => None,
            });
            let first = nums.next()?;
            let (min, max) = nums.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
            Some(FieldExtent::Quantitative { min, max })
        }
        Measure::Temporal => {
            let mut stamps = values.iter().filter_map(|v| match v {
                DataValue::Timestamp(t) => Some(t),
                _ => None,
            });
            let first = stamps.next()?;
            let (min, max) = stamps.fold((first, first), |(lo, hi), t| {
                (
                    if t.millis < lo.millis { t } else { lo },
                    if t.millis > hi.millis { t } else { hi },
                )
            });
            Some(FieldExtent::Temporal {
                min: min.clone(),
                max: max.clone(),
            })
        }
        Measure::Nominal => {
            let mut counts: IndexMap<&str, usize> = IndexMap::new();
            for v in values {
                if let DataValue::Text(s) = v {
                    *counts.entry(s.as_str()).or_default() += 1;
                }
            }
            Some(FieldExtent::Nominal(
                counts
                    .into_iter()
                    .map(|(category, count)| CategoryCount {
                        category: category.to_string(),
                        count,
                    })
                    .collect(),
            ))
        }
    }
}

/// Rows for prompt attachment: everything when the dataset is small enough,
/// otherwise a seeded uniform sample without replacement, in row order.
pub fn sample_rows(dataset: &Dataset, max_rows: usize, seed: u64) -> Vec<Row<'_>> {
    let max_rows = max_rows.max(1);
    let n = dataset.row_count();
    if n <= max_rows {
        return dataset.rows().collect();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, max_rows).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| dataset.row(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> Dataset {
        ingest(text.as_bytes(), Format::Csv).unwrap()
    }

    #[test]
    fn small_csv_infers_types_and_extents() {
        let d = csv("a,b\n1,x\n2,y");
        assert_eq!(d.row_count(), 2);
        assert_eq!(d.fields()[0].measure, Measure::Quantitative);
        assert_eq!(d.fields()[0].extent, FieldExtent::Quantitative { min: 1.0, max: 2.0 });
        assert_eq!(d.fields()[1].measure, Measure::Nominal);
        assert_eq!(
            d.fields()[1].extent.categories(),
            &[
                CategoryCount { category: "x".into(), count: 1 },
                CategoryCount { category: "y".into(), count: 1 },
            ]
        );
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(ingest(b"a\n", Format::Csv), Err(IngestError::EmptyDataset));
        assert_eq!(ingest(b"[]", Format::JsonRecords), Err(IngestError::EmptyDataset));
    }

    #[test]
    fn measure_inference_examples() {
        let infer = |h: &str, cells: &[&str]| {
            let cells: Vec<Option<&str>> = cells.iter().map(|c| Some(*c)).collect();
            infer_measure(h, &cells)
        };
        assert_eq!(infer("date", &["2008-08-31", "2012-12-31"]), Measure::Temporal);
        assert_eq!(infer("hp", &["130", "165", "150"]), Measure::Quantitative);
        assert_eq!(infer("Origin", &["USA", "Japan", "Europe"]), Measure::Nominal);
        assert_eq!(infer("year", &["1931", "1932"]), Measure::Temporal);
        assert_eq!(infer("count", &["1931", "1932"]), Measure::Quantitative);
        assert_eq!(infer("x", &[]), Measure::Nominal);
    }

    #[test]
    fn ninety_five_percent_threshold() {
        let mut cells: Vec<Option<&str>> = vec![Some("1"); 19];
        cells.push(Some("n/a"));
        assert_eq!(infer_measure("v", &cells), Measure::Quantitative);
        cells.push(Some("n/a"));
        assert_eq!(infer_measure("v", &cells), Measure::Nominal);
        // nulls are not part of the base
        let mut sparse: Vec<Option<&str>> = vec![None; 100];
        sparse.push(Some("3"));
        assert_eq!(infer_measure("v", &sparse), Measure::Quantitative);
    }

    #[test]
    fn dirty_cells_become_null() {
        let mut text = String::from("v\n");
        for i in 0..39 {
            text.push_str(&format!("{i}\n"));
        }
        text.push_str("oops\n");
        let d = csv(&text);
        assert_eq!(d.fields()[0].measure, Measure::Quantitative);
        assert_eq!(d.null_count("v"), 1);
    }

    #[test]
    fn non_finite_numbers_are_rejected() {
        let err = ingest(b"v\n1\ninf\n", Format::Csv).unwrap_err();
        assert!(matches!(err, IngestError::NonFiniteNumber { row: 1, .. }), "{err:?}");
    }

    #[test]
    fn ragged_rows_null_fill_and_overlong_rows_fail() {
        let d = csv("a,b\n1\n2,y\n");
        assert_eq!(d.row(0).get("b"), Some(&DataValue::Null));
        assert!(matches!(
            ingest(b"a,b\n1,2,3\n", Format::Csv),
            Err(IngestError::InconsistentColumns(_))
        ));
    }

    #[test]
    fn json_records_null_fill_missing_keys_but_reject_new_ones() {
        let d = ingest(br#"[{"a":1,"b":"x"},{"a":2}]"#, Format::JsonRecords).unwrap();
        assert_eq!(d.row(1).get("b"), Some(&DataValue::Null));
        assert!(matches!(
            ingest(br#"[{"a":1},{"a":2,"c":3}]"#, Format::JsonRecords),
            Err(IngestError::InconsistentColumns(_))
        ));
        assert!(matches!(
            ingest(br#"[{"a":[1]}]"#, Format::JsonRecords),
            Err(IngestError::Decode(_))
        ));
        assert!(matches!(ingest(b"{}", Format::JsonRecords), Err(IngestError::Decode(_))));
    }

    #[test]
    fn invalid_utf8_and_duplicate_headers() {
        assert!(matches!(ingest(&[0xff, 0xfe], Format::Csv), Err(IngestError::Decode(_))));
        assert!(matches!(ingest(b"a,a\n1,2\n", Format::Csv), Err(IngestError::Decode(_))));
    }

    #[test]
    fn row_limit_is_enforced() {
        let err = ingest_with(b"a\n1\n2\n3\n", Format::Csv, IngestOptions { max_rows: 2 });
        assert_eq!(err, Err(IngestError::TooManyRows { rows: 3, limit: 2 }));
    }

    #[test]
    fn timestamps_keep_lexical_form() {
        let d = csv("year,v\n1931,1\n1932,2\n");
        let Some(DataValue::Timestamp(t)) = d.row(0).get("year") else {
            panic!("expected a timestamp");
        };
        assert_eq!(t.lexical, "1931");
        assert_eq!(d.to_json_records()[0]["year"], serde_json::json!("1931"));
    }

    #[test]
    fn sampling() {
        let mut text = String::from("i\n");
        for i in 0..1000 {
            text.push_str(&format!("{i}\n"));
        }
        let d = csv(&text);
        let small = csv("i\n1\n2\n3\n");
        assert_eq!(sample_rows(&small, 20, 7).len(), 3);

        let pick = |seed| -> Vec<f64> {
            sample_rows(&d, 100, seed)
                .iter()
                .map(|r| r.get("i").unwrap().as_axis().unwrap())
                .collect()
        };
        let a = pick(7);
        assert_eq!(a.len(), 100);
        assert_eq!(a, pick(7));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(a, pick(8));
    }
}

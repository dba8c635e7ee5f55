//! Cell values and the lexical grammars shared by ingest and predicate literals.

use std::fmt;
use std::sync::OnceLock;

use chrono::{DateTime, NaiveDate, NaiveTime, Timelike, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};

/// An instant stored as epoch milliseconds, together with the text it was
/// parsed from so that serialization reproduces the source byte-for-byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Timestamp {
    pub millis: i64,
    pub lexical: String,
}

impl Timestamp {
    /// Builds a timestamp from epoch milliseconds, rendering a canonical
    /// ISO-8601 lexical form.
    pub fn from_millis(millis: i64) -> Self {
        Timestamp {
            millis,
            lexical: format_millis(millis),
        }
    }

    pub fn year(&self) -> i32 {
        use chrono::Datelike;
        DateTime::<Utc>::from_timestamp_millis(self.millis)
            .map(|dt| dt.year())
            .unwrap_or(1970)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataValue {
    Number(f64),
    Text(String),
    Timestamp(Timestamp),
    Null,
}

impl DataValue {
    pub fn is_null(&self) -> bool {
        matches!(self, DataValue::Null)
    }

    /// Numeric position on a continuous axis: the number itself, or epoch
    /// milliseconds for timestamps.
    pub fn as_axis(&self) -> Option<f64> {
        match self {
            DataValue::Number(x) => Some(*x),
            DataValue::Timestamp(t) => Some(t.millis as f64),
            _ => None,
        }
    }

    /// JSON form used by json-records output: timestamps keep their lexical form.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DataValue::Number(x) => json_number(*x),
            DataValue::Text(s) => serde_json::Value::String(s.clone()),
            DataValue::Timestamp(t) => serde_json::Value::String(t.lexical.clone()),
            DataValue::Null => serde_json::Value::Null,
        }
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Number(x) => f.write_str(&format_number(*x)),
            DataValue::Text(s) => f.write_str(s),
            DataValue::Timestamp(t) => f.write_str(&t.lexical),
            DataValue::Null => f.write_str("null"),
        }
    }
}

const MAX_SAFE_INTEGER: f64 = 9_007_199_254_740_992.0;

/// Shortest round-trip JSON number: integral values print without a
/// fractional part.
pub fn json_number(x: f64) -> serde_json::Value {
    if x.fract() == 0.0 && x.abs() < MAX_SAFE_INTEGER {
        serde_json::Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

pub fn format_number(x: f64) -> String {
    json_number(x).to_string()
}

/// Human-oriented rendering with at most four decimals, for labels only.
pub fn display_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < MAX_SAFE_INTEGER {
        return format!("{}", x as i64);
    }
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Parses a finite or non-finite number. Callers decide what to do with
/// non-finite results.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    t.parse::<f64>().ok()
}

/// Whether a field name enables the bare four-digit year form.
pub fn header_allows_bare_year(name: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)year|date").unwrap())
        .is_match(name)
}

fn datetime_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.(\d{1,9}))?)?(Z|[+-]\d{2}:?\d{2})?)?$",
        )
        .unwrap()
    })
}

fn year_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d{4}$").unwrap())
}

/// Accepted date grammar: `YYYY-MM-DD`, ISO-8601 datetimes with optional
/// seconds, fraction and offset (naive times are UTC), and a bare `YYYY`
/// when `allow_bare_year` is set. Returns epoch milliseconds.
pub fn parse_temporal_millis(text: &str, allow_bare_year: bool) -> Option<i64> {
    let t = text.trim();
    if allow_bare_year && year_re().is_match(t) {
        let year: i32 = t.parse().ok()?;
        let date = NaiveDate::from_ymd_opt(year, 1, 1)?;
        return Some(date.and_time(NaiveTime::MIN).and_utc().timestamp_millis());
    }
    let caps = datetime_re().captures(t)?;
    let num = |i: usize| caps.get(i).map(|m| m.as_str().parse::<u32>().unwrap_or(0));
    let date = NaiveDate::from_ymd_opt(
        caps[1].parse().ok()?,
        caps[2].parse().ok()?,
        caps[3].parse().ok()?,
    )?;
    let nanos = match caps.get(7) {
        Some(m) => {
            let digits = m.as_str();
            let padded = format!("{digits:0<9}");
            padded.parse::<u32>().ok()?
        }
        None => 0,
    };
    let time = NaiveTime::from_hms_nano_opt(
        num(4).unwrap_or(0),
        num(5).unwrap_or(0),
        num(6).unwrap_or(0),
        nanos,
    )?;
    let mut millis = date.and_time(time).and_utc().timestamp_millis();
    if let Some(offset) = caps.get(8) {
        let o = offset.as_str();
        if o != "Z" {
            let sign = if o.starts_with('-') { -1 } else { 1 };
            let digits: String = o[1..].chars().filter(|c| c.is_ascii_digit()).collect();
            let hours: i64 = digits[..2].parse().ok()?;
            let minutes: i64 = digits[2..].parse().ok()?;
            if hours > 23 || minutes > 59 {
                return None;
            }
            millis -= sign * (hours * 60 + minutes) * 60_000;
        }
    }
    Some(millis)
}

pub fn parse_timestamp(text: &str, allow_bare_year: bool) -> Option<Timestamp> {
    parse_temporal_millis(text, allow_bare_year).map(|millis| Timestamp {
        millis,
        lexical: text.to_string(),
    })
}

/// Canonical ISO-8601 rendering: a plain date at midnight UTC, otherwise a
/// full datetime with millisecond precision.
pub fn format_millis(millis: i64) -> String {
    match DateTime::<Utc>::from_timestamp_millis(millis) {
        Some(dt) => {
            if dt.num_seconds_from_midnight() == 0 && dt.nanosecond() == 0 {
                dt.format("%Y-%m-%d").to_string()
            } else {
                dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
            }
        }
        None => millis.to_string(),
    }
}

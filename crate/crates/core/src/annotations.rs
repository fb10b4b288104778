//! Annotation records on disk and model-output parsing.
//!
//! Records are UTF-8, one JSON object per line:
//!
//! ```text
//! {"id":"d1-s1","sentence":"...","dct":"1998-02-13","items":[{"time_text":"recent years","scate":"..."}]}
//! ```
//!
//! `dct` is optional and informational only; anchors are always explicit in
//! the expressions.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{self, DslError, ErrorCategory};
use crate::operators::NormalizedValue;
use crate::temporal::Timestamp;

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("no JSON list of annotations found in model output")]
    UnparseableOutput,
}

impl AnnotationError {
    fn io(path: &Path, source: io::Error) -> Self {
        AnnotationError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub time_text: String,
    pub scate: String,
}

impl AnnotationItem {
    pub fn new(time_text: impl Into<String>, scate: impl Into<String>) -> Self {
        AnnotationItem {
            time_text: time_text.into(),
            scate: scate.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dct: Option<String>,
    pub items: Vec<AnnotationItem>,
}

/// Serialized form of a [`NormalizedValue`]: intervals as `"<start> <end>"`
/// with `...` for unbounded ends, shifts as canonical expression text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ValueRecord {
    Interval(String),
    Intervals(Vec<String>),
    Period(String),
    Repeating(String),
}

impl From<&NormalizedValue> for ValueRecord {
    fn from(v: &NormalizedValue) -> Self {
        match v {
            NormalizedValue::Interval(i) => ValueRecord::Interval(i.to_string()),
            NormalizedValue::Intervals(list) => {
                ValueRecord::Intervals(list.iter().map(ToString::to_string).collect())
            }
            NormalizedValue::Period(s) => ValueRecord::Period(s.to_string()),
            NormalizedValue::Repeating(s) => ValueRecord::Repeating(s.to_string()),
        }
    }
}

impl ValueRecord {
    /// Human-readable rendering: intervals one per line, shifts as text.
    pub fn human(&self) -> String {
        match self {
            ValueRecord::Interval(s) | ValueRecord::Period(s) | ValueRecord::Repeating(s) => s.clone(),
            ValueRecord::Intervals(list) => list.join("\n"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemError {
    pub category: ErrorCategory,
    pub message: String,
}

impl From<&DslError> for ItemError {
    fn from(e: &DslError) -> Self {
        ItemError {
            category: e.category,
            message: e.to_string(),
        }
    }
}

/// An item together with the outcome of executing its expression. Exactly one
/// of `value` and `error` is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedItem {
    pub time_text: String,
    pub scate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ValueRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ItemError>,
}

impl NormalizedItem {
    pub fn execute(item: &AnnotationItem) -> Self {
        let (value, error) = match dsl::execute(&item.scate) {
            Ok(v) => (Some(ValueRecord::from(&v)), None),
            Err(e) => (None, Some(ItemError::from(&e))),
        };
        NormalizedItem {
            time_text: item.time_text.clone(),
            scate: item.scate.clone(),
            value,
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedRecord {
    pub id: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dct: Option<String>,
    pub items: Vec<NormalizedItem>,
}

impl NormalizedRecord {
    pub fn execute(record: &AnnotationRecord) -> Self {
        NormalizedRecord {
            id: record.id.clone(),
            sentence: record.sentence.clone(),
            dct: record.dct.clone(),
            items: record.items.iter().map(NormalizedItem::execute).collect(),
        }
    }
}

fn check_record(record: &AnnotationRecord, line: usize) -> Result<(), AnnotationError> {
    let schema = |message: String| AnnotationError::Schema { line, message };
    if let Some(dct) = &record.dct {
        dct.parse::<Timestamp>()
            .map_err(|e| schema(format!("field `dct`: {e}")))?;
    }
    for (i, item) in record.items.iter().enumerate() {
        if item.time_text.trim().is_empty() {
            return Err(schema(format!("items[{i}]: empty `time_text`")));
        }
        if item.scate.trim().is_empty() {
            return Err(schema(format!("items[{i}]: empty `scate`")));
        }
    }
    Ok(())
}

/// Reads line-delimited records. Blank lines are skipped.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| AnnotationError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(&line).map_err(|e| AnnotationError::Schema {
                line: line_no,
                message: e.to_string(),
            })?;
        check_record(&record, line_no)?;
        out.push(record);
    }
    Ok(out)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnnotationError::io(path, e))?;
    read_records(BufReader::new(file))
}

/// Writes any serializable records, one per line.
pub fn write_lines<W: Write, T: Serialize>(mut writer: W, records: &[T]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn save_lines<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<(), AnnotationError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| AnnotationError::io(path, e))?;
    write_lines(BufWriter::new(file), records).map_err(|e| AnnotationError::io(path, e))
}

pub fn save_records(records: &[AnnotationRecord], path: impl AsRef<Path>) -> Result<(), AnnotationError> {
    save_lines(records, path)
}

pub fn ensure_unique_ids(records: &[AnnotationRecord]) -> Result<(), AnnotationError> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(AnnotationError::DuplicateId(r.id.clone()));
        }
    }
    Ok(())
}

/// Items recovered from a model completion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelOutput {
    pub items: Vec<AnnotationItem>,
    /// List entries lacking a non-empty `time_text` or `scate`.
    pub dropped: usize,
}

/// Byte range of the bracketed list opening at `open`, honouring JSON strings.
fn balanced_list(text: &str, open: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Extracts `{time_text, scate}` pairs from a possibly chatty completion: the
/// first balanced bracketed list that parses as a JSON array of objects wins.
pub fn parse_model_output(text: &str) -> Result<ModelOutput, AnnotationError> {
    let entries = text
        .match_indices('[')
        .filter_map(|(open, _)| {
            let end = balanced_list(text, open)?;
            serde_json::from_str::<Vec<serde_json::Value>>(&text[open..end])
                .ok()
                .filter(|list| list.iter().all(serde_json::Value::is_object))
        })
        .next()
        .ok_or(AnnotationError::UnparseableOutput)?;
    let mut out = ModelOutput::default();
    for entry in entries {
        let field = |key: &str| {
            entry
                .get(key)
                .and_then(serde_json::Value::as_str)
                .filter(|s| !s.trim().is_empty())
                .map(str::to_string)
        };
        match (field("time_text"), field("scate")) {
            (Some(time_text), Some(scate)) => out.items.push(AnnotationItem { time_text, scate }),
            _ => out.dropped += 1,
        }
    }
    Ok(out)
}

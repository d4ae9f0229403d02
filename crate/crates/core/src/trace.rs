//! Object lifecycle events and the comma-separated log format they are stored in.
//!
//! A log document has eight columns:
//!
//! ```text
//! Status,thread,datetime,objectName,Type,Class,Method,linenum
//! 1,main,9/13/2011 17:48,ab014ef2-9672-4638-a856-80,java.util.Vector,org.git.sp.<clinit>,,3091
//! ```
//!
//! Fields are separated by bare commas. Quoting is not supported and any row
//! containing a `"` is rejected. Timestamps are accepted either as
//! `M/D/YYYY H:mm` (month first, UTC) or ISO 8601 and are always written
//! back as ISO 8601.

use std::collections::HashMap;
use std::fmt;

use chrono::{DateTime, NaiveDateTime};
use serde::Serialize;
use thiserror::Error;

/// Canonical header line written by [`emit_csv`].
pub const CSV_HEADER: &str = "Status,thread,datetime,objectName,Type,Class,Method,linenum";

const COLUMNS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Created,
    MethodEntry,
    Destroyed,
}

impl EventKind {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Self::Created),
            2 => Some(Self::MethodEntry),
            3 => Some(Self::Destroyed),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Self::Created => 1,
            Self::MethodEntry => 2,
            Self::Destroyed => 3,
        }
    }
}

/// One record of the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectEvent {
    pub kind: EventKind,
    pub thread: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub object_id: String,
    pub type_name: String,
    pub site_class: String,
    /// May be empty.
    pub site_method: String,
    pub line: u64,
}

/// An ordered, immutable sequence of events in source order.
///
/// Every downstream view (sorting, grids, tables) works on indices into this
/// sequence; the events themselves are never reordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    source_name: String,
    events: Vec<ObjectEvent>,
}

impl EventLog {
    pub fn new(source_name: impl Into<String>, events: Vec<ObjectEvent>) -> Self {
        Self {
            source_name: source_name.into(),
            events,
        }
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn events(&self) -> &[ObjectEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ObjectEvent> {
        self.events.iter()
    }

    /// Number of events of the given kind.
    pub fn count_kind(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

impl<'a> IntoIterator for &'a EventLog {
    type Item = &'a ObjectEvent;
    type IntoIter = std::slice::Iter<'a, ObjectEvent>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

/// Why a row was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowFault {
    ColumnCount(usize),
    QuotedField,
    InvalidStatus(String),
    UnknownStatus(u64),
    Timestamp(String),
    NegativeLine(String),
    InvalidLine(String),
}

impl fmt::Display for RowFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ColumnCount(n) => write!(f, "wrong column count: expected {COLUMNS}, found {n}"),
            Self::QuotedField => f.write_str("quoted fields are not supported"),
            Self::InvalidStatus(s) => write!(f, "invalid status {s:?}"),
            Self::UnknownStatus(code) => write!(f, "unknown status {code}"),
            Self::Timestamp(s) => write!(f, "unparseable timestamp {s:?}"),
            Self::NegativeLine(s) => write!(f, "negative line number {s}"),
            Self::InvalidLine(s) => write!(f, "invalid line number {s:?}"),
        }
    }
}

/// A rejected row, identified by its 1-based physical line in the document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed row at line {line}: {fault}")]
pub struct MalformedRow {
    pub line: usize,
    pub fault: RowFault,
}

/// Parses a whole log document.
///
/// The first line is treated as a header when its first field is not an
/// integer. Trailing blank lines are ignored; blank lines elsewhere are
/// rejected as having the wrong column count.
pub fn parse_csv(text: &str, source_name: impl Into<String>) -> Result<EventLog, MalformedRow> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    let end = lines
        .iter()
        .rposition(|l| !l.is_empty())
        .map_or(0, |i| i + 1);

    let mut events = Vec::with_capacity(end);
    for (idx, raw) in lines[..end].iter().enumerate() {
        if idx == 0 && is_header(raw) {
            continue;
        }
        let event = parse_row(raw).map_err(|fault| MalformedRow {
            line: idx + 1,
            fault,
        })?;
        events.push(event);
    }
    Ok(EventLog::new(source_name, events))
}

fn is_header(line: &str) -> bool {
    let first = line.split(',').next().unwrap_or("");
    first.parse::<i64>().is_err()
}

fn parse_row(raw: &str) -> Result<ObjectEvent, RowFault> {
    if raw.contains('"') {
        return Err(RowFault::QuotedField);
    }
    let fields: Vec<&str> = raw.split(',').collect();
    if fields.len() != COLUMNS {
        return Err(RowFault::ColumnCount(fields.len()));
    }

    let status = fields[0];
    let code: u64 = status
        .parse()
        .map_err(|_| RowFault::InvalidStatus(status.to_owned()))?;
    let kind = u8::try_from(code)
        .ok()
        .and_then(EventKind::from_code)
        .ok_or(RowFault::UnknownStatus(code))?;

    let timestamp = parse_timestamp(fields[2])?;

    let line_text = fields[7];
    let line = match line_text.parse::<u64>() {
        Ok(n) => n,
        Err(_) if line_text.starts_with('-') && line_text[1..].parse::<u64>().is_ok() => {
            return Err(RowFault::NegativeLine(line_text.to_owned()))
        }
        Err(_) => return Err(RowFault::InvalidLine(line_text.to_owned())),
    };

    Ok(ObjectEvent {
        kind,
        thread: fields[1].to_owned(),
        timestamp,
        object_id: fields[3].to_owned(),
        type_name: fields[4].to_owned(),
        site_class: fields[5].to_owned(),
        site_method: fields[6].to_owned(),
        line,
    })
}

const US_FORMATS: [&str; 2] = ["%m/%d/%Y %H:%M", "%m/%d/%Y %H:%M:%S"];
const ISO_FORMATS: [&str; 2] = ["%Y-%m-%dT%H:%M", "%Y-%m-%dT%H:%M:%S"];

/// Converts `M/D/YYYY H:mm` (month first) or ISO 8601 text to epoch seconds.
///
/// Both forms are interpreted as UTC. A trailing `Z` is accepted on the ISO
/// form, and a bare integer is taken as epoch seconds (that is the fallback
/// [`format_timestamp`] uses outside the calendar range).
pub fn parse_timestamp(s: &str) -> Result<i64, RowFault> {
    let (text, formats) = if s.contains('/') {
        (s, US_FORMATS)
    } else {
        (s.strip_suffix('Z').unwrap_or(s), ISO_FORMATS)
    };
    formats
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(text, fmt).ok())
        .map(|dt| dt.and_utc().timestamp())
        .or_else(|| s.parse::<i64>().ok())
        .ok_or_else(|| RowFault::Timestamp(s.to_owned()))
}

/// Canonical ISO 8601 rendering: `YYYY-MM-DDTHH:MM`, with `:SS` appended
/// only when the seconds are non-zero.
pub fn format_timestamp(secs: i64) -> String {
    match DateTime::from_timestamp(secs, 0) {
        Some(dt) if secs.rem_euclid(60) == 0 => dt.format("%Y-%m-%dT%H:%M").to_string(),
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S").to_string(),
        None => secs.to_string(),
    }
}

/// Header line plus one row per event, LF-terminated.
pub fn emit_csv(log: &EventLog) -> String {
    let mut out = String::with_capacity(CSV_HEADER.len() + 1 + log.len() * 96);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for e in log {
        write_row(&mut out, e);
    }
    out
}

fn write_row(out: &mut String, e: &ObjectEvent) {
    use std::fmt::Write;
    // Writing into a String cannot fail.
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        e.kind.code(),
        e.thread,
        format_timestamp(e.timestamp),
        e.object_id,
        e.type_name,
        e.site_class,
        e.site_method,
        e.line
    );
}

/// Package part of a fully-qualified name: everything before the last `.`,
/// or empty for the default package.
pub fn derive_package(fq_name: &str) -> &str {
    fq_name.rfind('.').map_or("", |i| &fq_name[..i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "DUP_CREATE")]
    DupCreate,
    #[serde(rename = "ORPHAN_DESTROY")]
    OrphanDestroy,
    #[serde(rename = "DUP_DESTROY")]
    DupDestroy,
    #[serde(rename = "MISSING_ID")]
    MissingId,
    #[serde(rename = "MISSING_TYPE")]
    MissingType,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Self::DupCreate => "DUP_CREATE",
            Self::OrphanDestroy => "ORPHAN_DESTROY",
            Self::DupDestroy => "DUP_DESTROY",
            Self::MissingId => "MISSING_ID",
            Self::MissingType => "MISSING_TYPE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub rule: Rule,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct Lifecycle {
    created: bool,
    destroyed: bool,
}

/// Checks per-object lifecycle consistency in file order.
pub fn validate(log: &EventLog) -> ValidationReport {
    let mut seen: HashMap<&str, Lifecycle> = HashMap::new();
    let mut violations = Vec::new();
    let mut flag = |index: usize, rule: Rule, message: String| {
        violations.push(Violation {
            index,
            rule,
            message,
        })
    };

    for (index, e) in log.iter().enumerate() {
        match e.kind {
            EventKind::MethodEntry => continue,
            _ if e.object_id.is_empty() => {
                flag(index, Rule::MissingId, "lifecycle event without object id".into());
                continue;
            }
            _ => {}
        }
        let state = seen.entry(e.object_id.as_str()).or_default();
        match e.kind {
            EventKind::Created => {
                if e.type_name.is_empty() {
                    flag(index, Rule::MissingType, format!("{} created without a type", e.object_id));
                }
                if state.created {
                    flag(index, Rule::DupCreate, format!("{} created more than once", e.object_id));
                }
                state.created = true;
            }
            EventKind::Destroyed => {
                if !state.created {
                    flag(index, Rule::OrphanDestroy, format!("{} destroyed before creation", e.object_id));
                } else if state.destroyed {
                    flag(index, Rule::DupDestroy, format!("{} destroyed more than once", e.object_id));
                }
                state.destroyed = true;
            }
            EventKind::MethodEntry => unreachable!(),
        }
    }
    ValidationReport { violations }
}

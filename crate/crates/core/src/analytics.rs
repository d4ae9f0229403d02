//! Aggregations over an [`EventLog`]: per-attribute tallies, thread activity,
//! live-object accounting and single-object detail.
//!
//! Method-entry events never contribute to object counts. Ties are always
//! broken by ascending attribute value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::trace::{derive_package, format_timestamp, EventKind, EventLog, ObjectEvent};

/// Attribute by which objects are grouped, counted, ordered and colored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    /// File order.
    #[default]
    None,
    /// Package of the object's type.
    Package,
    /// Class where the event happened.
    Class,
    Type,
    Thread,
    Method,
}

impl SortKey {
    pub const ALL: [SortKey; 6] = [
        Self::None,
        Self::Package,
        Self::Class,
        Self::Type,
        Self::Thread,
        Self::Method,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Package => "package",
            Self::Class => "class",
            Self::Type => "type",
            Self::Thread => "thread",
            Self::Method => "method",
        }
    }

    /// The attribute value this key selects. `None` selects the type name,
    /// which is what unsorted grids are colored by.
    pub fn attribute(self, e: &ObjectEvent) -> &str {
        match self {
            Self::None | Self::Type => &e.type_name,
            Self::Package => derive_package(&e.type_name),
            Self::Class => &e.site_class,
            Self::Thread => &e.thread,
            Self::Method => &e.site_method,
        }
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown sort key {0:?} (expected none, package, class, type, thread or method)")]
pub struct UnknownSortKey(pub String);

impl FromStr for SortKey {
    type Err = UnknownSortKey;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownSortKey(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("grouping requires a sort key other than `none`")]
    KeyNone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub key: SortKey,
    pub kind: EventKind,
    pub entries: BTreeMap<String, u64>,
}

impl CountTable {
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tally of events of `kind`, grouped by the key's attribute.
pub fn count_by(log: &EventLog, key: SortKey, kind: EventKind) -> Result<CountTable, AnalyticsError> {
    if key == SortKey::None {
        return Err(AnalyticsError::KeyNone);
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for e in log.iter().filter(|e| e.kind == kind) {
        *counts.entry(key.attribute(e)).or_default() += 1;
    }
    Ok(CountTable {
        key,
        kind,
        entries: counts.into_iter().map(|(v, n)| (v.to_owned(), n)).collect(),
    })
}

/// The `k` largest entries, count descending then value ascending.
pub fn top_k(table: &CountTable, k: usize) -> Vec<(String, u64)> {
    let mut ranked: Vec<(&String, u64)> = table.entries.iter().map(|(v, &n)| (v, n)).collect();
    // entries come out of the BTreeMap in value order, so a stable sort on
    // count alone keeps the tie-break
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked.into_iter().take(k).map(|(v, n)| (v.clone(), n)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LiveObjects {
    /// Every type that was created at least once, with its live count.
    pub per_type: BTreeMap<String, u64>,
    pub total: u64,
    /// Destroyed events with no outstanding creation to match.
    pub orphan_destroys: u64,
}

/// Objects created and not yet destroyed at the end of the log.
///
/// A Destroyed event is attributed to the type of the outstanding Created
/// event for its id, never to its own type column.
pub fn live_objects(log: &EventLog) -> LiveObjects {
    let mut per_type: BTreeMap<&str, u64> = BTreeMap::new();
    let mut outstanding: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut orphan_destroys = 0;

    for e in log {
        match e.kind {
            EventKind::Created => {
                *per_type.entry(&e.type_name).or_default() += 1;
                outstanding.entry(&e.object_id).or_default().push(&e.type_name);
            }
            EventKind::Destroyed => {
                match outstanding.get_mut(e.object_id.as_str()).and_then(Vec::pop) {
                    Some(ty) => *per_type.get_mut(ty).expect("created type is tallied") -= 1,
                    None => orphan_destroys += 1,
                }
            }
            EventKind::MethodEntry => {}
        }
    }
    LiveObjects {
        total: per_type.values().sum(),
        per_type: per_type.into_iter().map(|(t, n)| (t.to_owned(), n)).collect(),
        orphan_destroys,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadRow {
    pub thread: String,
    pub created: u64,
    pub destroyed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ThreadProfile {
    pub rows: Vec<ThreadRow>,
}

impl ThreadProfile {
    pub fn row(&self, thread: &str) -> Option<&ThreadRow> {
        self.rows.iter().find(|r| r.thread == thread)
    }
}

/// Created and destroyed tallies per thread, busiest creator first.
/// Threads that only appear on method-entry events are not listed.
pub fn thread_profile(log: &EventLog) -> ThreadProfile {
    let mut tallies: HashMap<&str, (u64, u64)> = HashMap::new();
    for e in log {
        match e.kind {
            EventKind::Created => tallies.entry(&e.thread).or_default().0 += 1,
            EventKind::Destroyed => tallies.entry(&e.thread).or_default().1 += 1,
            EventKind::MethodEntry => {}
        }
    }
    let mut rows: Vec<ThreadRow> = tallies
        .into_iter()
        .map(|(thread, (created, destroyed))| ThreadRow {
            thread: thread.to_owned(),
            created,
            destroyed,
        })
        .collect();
    rows.sort_by(|a, b| b.created.cmp(&a.created).then_with(|| a.thread.cmp(&b.thread)));
    ThreadProfile { rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexedEvent {
    pub index: usize,
    #[serde(flatten)]
    pub event: ObjectEvent,
    pub datetime: String,
}

/// Everything the log says about one object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectDetail {
    pub object_id: String,
    pub type_name: String,
    pub package: String,
    pub created_by: Option<String>,
    pub created_at: Option<i64>,
    pub created_at_text: Option<String>,
    pub destroyed: bool,
    pub events: Vec<IndexedEvent>,
}

/// Detail for `object_id`, or `None` when no event carries it.
pub fn object_detail(log: &EventLog, object_id: &str) -> Option<ObjectDetail> {
    if object_id.is_empty() {
        return None;
    }
    let events: Vec<IndexedEvent> = log
        .iter()
        .enumerate()
        .filter(|(_, e)| e.object_id == object_id)
        .map(|(index, e)| IndexedEvent {
            index,
            event: e.clone(),
            datetime: format_timestamp(e.timestamp),
        })
        .collect();
    let first = events.first()?;

    let creation = events.iter().find(|e| e.event.kind == EventKind::Created);
    let type_name = creation.unwrap_or(first).event.type_name.clone();
    Some(ObjectDetail {
        object_id: object_id.to_owned(),
        package: derive_package(&type_name).to_owned(),
        type_name,
        created_by: creation.map(|c| c.event.thread.clone()),
        created_at: creation.map(|c| c.event.timestamp),
        created_at_text: creation.map(|c| c.datetime.clone()),
        destroyed: events.iter().any(|e| e.event.kind == EventKind::Destroyed),
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(kind: EventKind, thread: &str, id: &str, ty: &str) -> ObjectEvent {
        ObjectEvent {
            kind,
            thread: thread.into(),
            timestamp: 60,
            object_id: id.into(),
            type_name: ty.into(),
            site_class: format!("site.{ty}"),
            site_method: String::new(),
            line: 0,
        }
    }

    fn created(types: &[&str]) -> EventLog {
        let events = types
            .iter()
            .enumerate()
            .map(|(i, t)| ev(EventKind::Created, "main", &format!("id{i}"), t))
            .collect();
        EventLog::new("t", events)
    }

    #[test]
    fn sort_key_text() {
        for key in SortKey::ALL {
            assert_eq!(key.as_str().parse::<SortKey>(), Ok(key));
        }
        assert!("Type".parse::<SortKey>().is_err());
        assert!("".parse::<SortKey>().is_err());
    }

    #[test]
    fn counting() {
        let empty = EventLog::new("e", vec![]);
        assert!(count_by(&empty, SortKey::Type, EventKind::Created).unwrap().is_empty());

        let log = created(&["A", "A", "B"]);
        let table = count_by(&log, SortKey::Type, EventKind::Created).unwrap();
        assert_eq!(table.entries, BTreeMap::from([("A".into(), 2), ("B".into(), 1)]));
        assert_eq!(table.total(), 3);
        assert_eq!(count_by(&log, SortKey::None, EventKind::Created), Err(AnalyticsError::KeyNone));
        assert!(count_by(&log, SortKey::Type, EventKind::Destroyed).unwrap().is_empty());
    }

    #[test]
    fn empty_values_are_groups() {
        let log = created(&["Vector", "java.util.Vector"]);
        let table = count_by(&log, SortKey::Package, EventKind::Created).unwrap();
        assert_eq!(table.entries, BTreeMap::from([(String::new(), 1), ("java.util".into(), 1)]));
        let table = count_by(&log, SortKey::Method, EventKind::Created).unwrap();
        assert_eq!(table.entries, BTreeMap::from([(String::new(), 2)]));
    }

    #[test]
    fn ranking() {
        let log = created(&["A", "A", "B"]);
        let table = count_by(&log, SortKey::Type, EventKind::Created).unwrap();
        assert_eq!(top_k(&table, 1), [("A".to_string(), 2)]);

        let tie = count_by(&created(&["B", "A"]), SortKey::Type, EventKind::Created).unwrap();
        assert_eq!(top_k(&tie, 2), [("A".to_string(), 1), ("B".to_string(), 1)]);
        assert_eq!(top_k(&tie, 10).len(), 2);

        let empty = count_by(&EventLog::new("e", vec![]), SortKey::Type, EventKind::Created).unwrap();
        assert!(top_k(&empty, 5).is_empty());
    }

    #[test]
    fn liveness() {
        let one = EventLog::new("l", vec![ev(EventKind::Created, "m", "X", "typeA")]);
        let live = live_objects(&one);
        assert_eq!(live.per_type, BTreeMap::from([("typeA".into(), 1)]));
        assert_eq!(live.total, 1);

        let gone = EventLog::new(
            "l",
            vec![ev(EventKind::Created, "m", "X", "typeA"), ev(EventKind::Destroyed, "m", "X", "")],
        );
        let live = live_objects(&gone);
        assert_eq!(live.per_type, BTreeMap::from([("typeA".into(), 0)]));
        assert_eq!((live.total, live.orphan_destroys), (0, 0));

        let orphans = EventLog::new(
            "l",
            vec![
                ev(EventKind::Destroyed, "m", "Y", "typeB"),
                ev(EventKind::Created, "m", "X", "typeA"),
                ev(EventKind::Destroyed, "m", "X", "typeA"),
                ev(EventKind::Destroyed, "m", "X", "typeA"),
            ],
        );
        let live = live_objects(&orphans);
        assert_eq!((live.total, live.orphan_destroys), (0, 2));
        assert!(!live.per_type.contains_key("typeB"));
    }

    #[test]
    fn threads() {
        assert!(thread_profile(&EventLog::new("e", vec![])).rows.is_empty());

        let single = EventLog::new("s", vec![ev(EventKind::Created, "t", "x", "A")]);
        assert_eq!(
            thread_profile(&single).rows,
            [ThreadRow { thread: "t".into(), created: 1, destroyed: 0 }]
        );

        let log = EventLog::new(
            "p",
            vec![
                ev(EventKind::Created, "b", "1", "A"),
                ev(EventKind::Created, "a", "2", "A"),
                ev(EventKind::Created, "c", "3", "A"),
                ev(EventKind::Created, "c", "4", "A"),
                ev(EventKind::Destroyed, "reaper", "1", "A"),
                ev(EventKind::MethodEntry, "idle", "", ""),
            ],
        );
        let names: Vec<_> = thread_profile(&log).rows.into_iter().map(|r| (r.thread, r.created, r.destroyed)).collect();
        assert_eq!(
            names,
            [
                ("c".into(), 2, 0),
                ("a".into(), 1, 0),
                ("b".into(), 1, 0),
                ("reaper".into(), 0, 1)
            ]
        );
    }

    #[test]
    fn details() {
        let log = EventLog::new(
            "d",
            vec![
                ev(EventKind::Created, "main", "X", "java.util.Vector"),
                ev(EventKind::Created, "main", "Y", "B"),
                ev(EventKind::Destroyed, "Thread-0", "X", ""),
                ev(EventKind::MethodEntry, "main", "", ""),
            ],
        );
        let x = object_detail(&log, "X").unwrap();
        assert!(x.destroyed);
        assert_eq!(x.events.iter().map(|e| e.index).collect::<Vec<_>>(), [0, 2]);
        assert_eq!(x.type_name, "java.util.Vector");
        assert_eq!(x.package, "java.util");
        assert_eq!(x.created_by.as_deref(), Some("main"));
        assert_eq!(x.created_at, Some(60));
        assert_eq!(x.created_at_text.as_deref(), Some("1970-01-01T00:01"));

        let y = object_detail(&log, "Y").unwrap();
        assert!(!y.destroyed);
        assert_eq!(y.events.len(), 1);

        assert!(object_detail(&log, "nope").is_none());
        assert!(object_detail(&log, "").is_none());
    }
}

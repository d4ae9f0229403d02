//! Core of the object grid toolkit: ingest object lifecycle traces, answer
//! "who creates what" questions about them, and lay every recorded object out
//! as one colored square on a sortable grid.

pub mod analytics;
pub mod grid;
pub mod trace;
pub mod workload;

pub use analytics::{
    count_by, live_objects, object_detail, thread_profile, top_k, AnalyticsError, CountTable,
    IndexedEvent, LiveObjects, ObjectDetail, SortKey, ThreadProfile, ThreadRow, UnknownSortKey,
};
pub use grid::{
    build_cells, color_of, compute_layout, legend, render_svg, sort_permutation, CellView,
    GridLayout, LegendEntry, Rgb, Viewport,
};
pub use trace::{
    derive_package, emit_csv, format_timestamp, parse_csv, parse_timestamp, validate, EventKind, EventLog,
    MalformedRow, ObjectEvent, RowFault, Rule, ValidationReport, Violation, CSV_HEADER,
};
pub use workload::{generate, ClassSpec, ConfigError, GenConfig, ThreadSpec, Xoshiro256StarStar, GENERATED};

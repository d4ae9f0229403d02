//! The object grid: one square per created object, packed row by row at
//! the largest size that fits, grouped and colored by a [`SortKey`].

mod color;
mod layout;
mod svg;

use std::collections::HashMap;

use serde::Serialize;

use crate::analytics::{AnalyticsError, SortKey};
use crate::trace::{EventKind, EventLog};

pub use color::{color_of, fnv1a32, hsl_of, hsl_to_rgb, Rgb};
pub use layout::{compute_layout, GridLayout, Viewport};
pub use svg::render_svg;

/// One drawn square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellView {
    pub index: usize,
    pub x: u64,
    pub y: u64,
    pub color: Rgb,
    pub object_id: String,
    pub group_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegendEntry {
    pub value: String,
    pub color: Rgb,
    pub count: usize,
}

/// Created-event indices grouped by attribute value, largest group first,
/// ties by value. Each group keeps file order.
fn groups(log: &EventLog, key: SortKey) -> Vec<(&str, Vec<usize>)> {
    let mut by_value: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, e) in log.iter().enumerate() {
        if e.kind == EventKind::Created {
            by_value.entry(key.attribute(e)).or_default().push(i);
        }
    }
    let mut groups: Vec<_> = by_value.into_iter().collect();
    groups.sort_unstable_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(b.0)));
    groups
}

/// Display order of the created events, as indices into the log.
///
/// `SortKey::None` keeps file order.
pub fn sort_permutation(log: &EventLog, key: SortKey) -> Vec<usize> {
    if key == SortKey::None {
        return log
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EventKind::Created)
            .map(|(i, _)| i)
            .collect();
    }
    groups(log, key).into_iter().flat_map(|(_, idx)| idx).collect()
}

/// Lays out every created object and colors it by its group value.
pub fn build_cells(log: &EventLog, key: SortKey, viewport: Viewport) -> (GridLayout, Vec<CellView>) {
    let order = sort_permutation(log, key);
    let layout = compute_layout(order.len(), viewport);
    let mut palette: HashMap<&str, Rgb> = HashMap::new();
    let events = log.events();

    let cells = order
        .into_iter()
        .enumerate()
        .map(|(index, event_idx)| {
            let e = &events[event_idx];
            let group = key.attribute(e);
            let color = *palette.entry(group).or_insert_with(|| color_of(group));
            let (x, y) = layout.position(index);
            CellView {
                index,
                x,
                y,
                color,
                object_id: e.object_id.clone(),
                group_value: group.to_owned(),
            }
        })
        .collect();
    (layout, cells)
}

/// One entry per group value, in grid order.
pub fn legend(log: &EventLog, key: SortKey) -> Result<Vec<LegendEntry>, AnalyticsError> {
    if key == SortKey::None {
        return Err(AnalyticsError::KeyNone);
    }
    Ok(groups(log, key)
        .into_iter()
        .map(|(value, idx)| LegendEntry {
            value: value.to_owned(),
            color: color_of(value),
            count: idx.len(),
        })
        .collect())
}

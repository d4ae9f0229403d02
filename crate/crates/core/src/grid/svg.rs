use std::fmt::Write;

use super::{CellView, GridLayout};

/// SVG 1.1 document with one `<rect>` per cell.
///
/// The document is as wide as the viewport and as tall as the occupied rows.
/// Each rect carries `data-oid` and `data-group` with the object id and the
/// group value.
pub fn render_svg(layout: &GridLayout, cells: &[CellView]) -> String {
    let width = layout.viewport.width;
    let height = layout.content_height();
    let side = layout.cell_side;

    let mut out = String::with_capacity(192 + cells.len() * 128);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\">"
    );
    for cell in cells {
        let _ = write!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{side}\" height=\"{side}\" fill=\"{}\" data-oid=\"",
            cell.x, cell.y, cell.color
        );
        escape_into(&mut out, &cell.object_id);
        out.push_str("\" data-group=\"");
        escape_into(&mut out, &cell.group_value);
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn escape_into(out: &mut String, text: &str) {
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
}

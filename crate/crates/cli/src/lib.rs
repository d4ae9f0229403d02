//! Subcommand implementations for the `objgrid` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::Path;

use anyhow::{Context, Result};
use objgrid_core::{
    build_cells, count_by, emit_csv, generate, parse_csv, render_svg, thread_profile, top_k,
    EventKind, EventLog, GenConfig, SortKey, Viewport,
};

pub const DEFAULT_PORT: u16 = 7070;

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn read_input(path: &Path) -> Result<String> {
    if is_stdio(path) {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    if is_stdio(path) {
        io::stdout().lock().write_all(contents.as_bytes())?;
        Ok(())
    } else {
        fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn load_log(path: &Path) -> Result<EventLog> {
    let text = read_input(path)?;
    let name = if is_stdio(path) {
        "stdin".to_owned()
    } else {
        path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
    };
    parse_csv(&text, name).with_context(|| format!("parsing {}", path.display()))
}

/// CSV text of the log generated from a config document.
pub fn gen(config_text: &str) -> Result<String> {
    let config: GenConfig = config_text.parse()?;
    Ok(emit_csv(&generate(&config)?))
}

pub fn render(log: &EventLog, sort: SortKey, viewport: Viewport) -> String {
    let (layout, cells) = build_cells(log, sort, viewport);
    render_svg(&layout, &cells)
}

fn display_value(v: &str) -> &str {
    if v.is_empty() {
        "(empty)"
    } else {
        v
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut text = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(text, "{cell:<w$}");
            } else {
                let _ = write!(text, "  {cell:>w$}");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

/// Top-`k` creation counts grouped by `by`, as an aligned table.
pub fn stats(log: &EventLog, by: SortKey, k: usize) -> Result<String> {
    let counts = count_by(log, by, EventKind::Created)?;
    let rows: Vec<Vec<String>> = top_k(&counts, k)
        .into_iter()
        .map(|(v, n)| vec![display_value(&v).to_owned(), n.to_string()])
        .collect();
    Ok(table(&[by.as_str(), "created"], &rows))
}

pub fn threads(log: &EventLog) -> String {
    let rows: Vec<Vec<String>> = thread_profile(log)
        .rows
        .into_iter()
        .map(|r| vec![display_value(&r.thread).to_owned(), r.created.to_string(), r.destroyed.to_string()])
        .collect();
    table(&["thread", "created", "destroyed"], &rows)
}

pub fn serve(port: u16) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(objgrid_server::serve(
        SocketAddr::from(([127, 0, 0, 1], port)),
        objgrid_server::AppState::new(),
    ))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_table() {
        let t = table(&["type", "created"], &[vec!["java.util.Vector".into(), "12".into()], vec!["A".into(), "3".into()]]);
        assert_eq!(
            t,
            "type              created\njava.util.Vector       12\nA                       3\n"
        );
    }

    #[test]
    fn empty_tables_have_headers() {
        let log = EventLog::new("e", vec![]);
        assert_eq!(stats(&log, SortKey::Type, 10).unwrap(), "type  created\n");
        assert_eq!(threads(&log), "thread  created  destroyed\n");
        assert!(stats(&log, SortKey::None, 10).is_err());
    }
}

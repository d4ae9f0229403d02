use serde::Serialize;

/// Pixel size of the drawing area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Viewport {
    pub width: u32,
    pub height: u32,
}

impl Viewport {
    /// `None` unless both sides are at least one pixel.
    pub fn new(width: u32, height: u32) -> Option<Self> {
        (width >= 1 && height >= 1).then_some(Self { width, height })
    }
}

/// Equal squares packed row by row, left to right, with no gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridLayout {
    pub viewport: Viewport,
    pub cell_side: u32,
    pub columns: u32,
    pub rows: u64,
    pub count: usize,
}

impl GridLayout {
    /// Top-left pixel of cell `index`.
    pub fn position(&self, index: usize) -> (u64, u64) {
        let cols = u64::from(self.columns);
        let side = u64::from(self.cell_side);
        let i = index as u64;
        ((i % cols) * side, (i / cols) * side)
    }

    /// Origins of all cells, in index order.
    pub fn positions(&self) -> impl ExactSizeIterator<Item = (u64, u64)> + '_ {
        (0..self.count).map(|i| self.position(i))
    }

    /// Height of the drawn grid, which exceeds the viewport only when the
    /// cells did not fit even at one pixel.
    pub fn content_height(&self) -> u64 {
        self.rows * u64::from(self.cell_side)
    }

    /// Cell under pixel `(x, y)`, if any.
    pub fn cell_at(&self, x: u64, y: u64) -> Option<usize> {
        if self.count == 0 {
            return None;
        }
        let side = u64::from(self.cell_side);
        let (col, row) = (x / side, y / side);
        if col >= u64::from(self.columns) {
            return None;
        }
        let index = row.checked_mul(u64::from(self.columns))?.checked_add(col)?;
        usize::try_from(index).ok().filter(|&i| i < self.count)
    }
}

fn capacity(side: u32, viewport: Viewport) -> u64 {
    u64::from(viewport.width / side) * u64::from(viewport.height / side)
}

/// Largest square side at which `n` cells fit in the viewport.
///
/// Capacity `⌊W/s⌋·⌊H/s⌋` never exceeds `W·H/s²`, so no side above
/// `√(W·H/n)` can fit; search down from there. When not even one-pixel
/// cells fit, the side stays at 1 and rows run past the viewport height.
/// For `n = 0` the side is the viewport's shorter edge and there are no
/// rows or columns.
pub fn compute_layout(n: usize, viewport: Viewport) -> GridLayout {
    let shorter = viewport.width.min(viewport.height);
    if n == 0 {
        return GridLayout {
            viewport,
            cell_side: shorter,
            columns: 0,
            rows: 0,
            count: 0,
        };
    }

    let area = u64::from(viewport.width) * u64::from(viewport.height);
    let bound = (area / n as u64).isqrt().min(u64::from(shorter)).max(1) as u32;
    let mut side = bound;
    while side > 1 && capacity(side, viewport) < n as u64 {
        side -= 1;
    }

    let columns = viewport.width / side;
    GridLayout {
        viewport,
        cell_side: side,
        columns,
        rows: (n as u64).div_ceil(u64::from(columns)),
        count: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vp(w: u32, h: u32) -> Viewport {
        Viewport::new(w, h).unwrap()
    }

    #[test]
    fn small_cases() {
        let l = compute_layout(1, vp(100, 100));
        assert_eq!((l.cell_side, l.columns, l.rows), (100, 1, 1));
        let l = compute_layout(4, vp(100, 100));
        assert_eq!((l.cell_side, l.columns, l.rows), (50, 2, 2));
        let l = compute_layout(10, vp(100, 100));
        assert_eq!((l.cell_side, l.columns, l.rows), (25, 4, 3));
        let l = compute_layout(0, vp(100, 100));
        assert_eq!((l.columns, l.rows, l.count), (0, 0, 0));
        assert_eq!(l.positions().len(), 0);
    }

    #[test]
    fn overflow_clamps_to_one_pixel() {
        let l = compute_layout(7, vp(2, 3));
        assert_eq!((l.cell_side, l.columns, l.rows), (1, 2, 4));
        assert_eq!(l.content_height(), 4);
        assert_eq!(l.position(6), (0, 3));
    }

    #[test]
    fn thin_viewports() {
        let l = compute_layout(1, vp(1, 1000));
        assert_eq!((l.cell_side, l.columns, l.rows), (1, 1, 1));
        let l = compute_layout(3, vp(1000, 10));
        assert_eq!((l.cell_side, l.columns, l.rows), (10, 100, 1));
    }

    #[test]
    fn row_major_positions() {
        let l = compute_layout(10, vp(100, 100));
        let got: Vec<_> = l.positions().collect();
        assert_eq!(got[0], (0, 0));
        assert_eq!(got[3], (75, 0));
        assert_eq!(got[4], (0, 25));
        assert_eq!(got[9], (25, 50));
    }

    #[test]
    fn hit_testing() {
        let l = compute_layout(10, vp(100, 100));
        assert_eq!(l.cell_at(0, 0), Some(0));
        assert_eq!(l.cell_at(99, 0), Some(3));
        assert_eq!(l.cell_at(30, 60), Some(9));
        assert_eq!(l.cell_at(60, 60), None);
        assert_eq!(l.cell_at(10, 99), None);
        assert_eq!(compute_layout(0, vp(10, 10)).cell_at(0, 0), None);
        let wide = compute_layout(2, vp(130, 50));
        assert_eq!(wide.cell_at(120, 10), None);
    }

    #[test]
    fn invalid_viewport() {
        assert!(Viewport::new(0, 5).is_none());
        assert!(Viewport::new(5, 0).is_none());
    }
}

//! Uniform grid over the planar projection mapping cells to the edge pieces
//! that cross them.

use std::collections::HashMap;

use super::geo::Point;
use super::network::{Edge, EdgeIdx};

/// A piece of an edge that lies inside one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellEntry {
    pub edge: EdgeIdx,
    /// Covered offset interval along the edge, in meters.
    pub from_m: f64,
    pub to_m: f64,
}

#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_size_m: f64,
    cells: HashMap<(i64, i64), Vec<CellEntry>>,
}

impl GridIndex {
    pub fn build(edges: &[Edge], cell_size_m: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<CellEntry>> = HashMap::new();
        for (idx, e) in edges.iter().enumerate() {
            let (a, b) = (e.start(), e.end());
            let cx0 = (a.x.min(b.x) / cell_size_m).floor() as i64;
            let cx1 = (a.x.max(b.x) / cell_size_m).floor() as i64;
            let cy0 = (a.y.min(b.y) / cell_size_m).floor() as i64;
            let cy1 = (a.y.max(b.y) / cell_size_m).floor() as i64;
            for cx in cx0..=cx1 {
                for cy in cy0..=cy1 {
                    let lo = Point::new(cx as f64 * cell_size_m, cy as f64 * cell_size_m);
                    let hi = Point::new(lo.x + cell_size_m, lo.y + cell_size_m);
                    if let Some((t0, t1)) = clip_to_rect(e, lo, hi) {
                        cells.entry((cx, cy)).or_default().push(CellEntry {
                            edge: idx,
                            from_m: t0,
                            to_m: t1,
                        });
                    }
                }
            }
        }
        Self { cell_size_m, cells }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size_m
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            (p.x / self.cell_size_m).floor() as i64,
            (p.y / self.cell_size_m).floor() as i64,
        )
    }

    pub fn entries(&self, cell: (i64, i64)) -> &[CellEntry] {
        self.cells.get(&cell).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct edges with at least one indexed piece in a cell overlapping
    /// the axis-aligned square around the disk. Sorted by index.
    pub fn edges_near(&self, center: Point, radius: f64) -> Vec<EdgeIdx> {
        let (cx0, cy0) = self.cell_of(Point::new(center.x - radius, center.y - radius));
        let (cx1, cy1) = self.cell_of(Point::new(center.x + radius, center.y + radius));
        let mut out = Vec::new();
        for cx in cx0..=cx1 {
            for cy in cy0..=cy1 {
                out.extend(self.entries((cx, cy)).iter().map(|c| c.edge));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Liang–Barsky clip of an edge against a closed rectangle; returns the
/// covered offset interval in meters.
fn clip_to_rect(e: &Edge, lo: Point, hi: Point) -> Option<(f64, f64)> {
    let (p, d, len) = (e.start(), e.direction(), e.length_m);
    let mut t0 = 0.0f64;
    let mut t1 = len;
    for (pc, dc, min, max) in [(p.x, d.x, lo.x, hi.x), (p.y, d.y, lo.y, hi.y)] {
        if dc.abs() < 1e-15 {
            if pc < min || pc > max {
                return None;
            }
        } else {
            let (mut a, mut b) = ((min - pc) / dc, (max - pc) / dc);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

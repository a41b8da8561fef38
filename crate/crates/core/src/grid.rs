//! Rectangles, tori, regions, bars and tilings.
//!
//! Cells are addressed as `(i, j)` with column `i` in `[0, a)` and row `j` in
//! `[0, b)`; rows are numbered from the top. A vertical bar is counted in the
//! column that contains it, a horizontal bar in its row.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Rectangle,
    Torus,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Rectangle => f.write_str("rectangle"),
            Shape::Torus => f.write_str("torus"),
        }
    }
}

/// A grid cell. Ordered row-major: by row first, then column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub const fn new(i: usize, j: usize) -> Self {
        Cell { i, j }
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j, self.i).cmp(&(other.j, other.i))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub shape: Shape,
    /// Number of columns.
    pub a: usize,
    /// Number of rows.
    pub b: usize,
}

impl Geometry {
    pub fn new(shape: Shape, a: usize, b: usize) -> Result<Self> {
        if a == 0 {
            return Err(Error::input("a", "must be at least 1"));
        }
        if b == 0 {
            return Err(Error::input("b", "must be at least 1"));
        }
        if a.checked_mul(b).is_none() {
            return Err(Error::Overflow("a*b"));
        }
        Ok(Geometry { shape, a, b })
    }

    /// Panics if `a` or `b` is zero.
    pub fn rectangle(a: usize, b: usize) -> Self {
        Self::new(Shape::Rectangle, a, b).expect("rectangle dimensions must be positive")
    }

    /// Panics if `a` or `b` is zero.
    pub fn torus(a: usize, b: usize) -> Self {
        Self::new(Shape::Torus, a, b).expect("torus dimensions must be positive")
    }

    pub fn is_torus(&self) -> bool {
        self.shape == Shape::Torus
    }

    pub fn cell_count(&self) -> usize {
        self.a * self.b
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.i < self.a && cell.j < self.b
    }

    /// Row-major linear index.
    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.j * self.a + cell.i
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.a, index / self.a)
    }
}

/// A set of cells inside a geometry: the whole rectangle/torus, a histogram,
/// or an arbitrary sub-grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    geometry: Geometry,
    mask: Vec<bool>,
}

impl Region {
    pub fn full(geometry: Geometry) -> Self {
        Region {
            geometry,
            mask: vec![true; geometry.cell_count()],
        }
    }

    pub fn empty(geometry: Geometry) -> Self {
        Region {
            geometry,
            mask: vec![false; geometry.cell_count()],
        }
    }

    pub fn from_cells(geometry: Geometry, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let mut region = Self::empty(geometry);
        for cell in cells {
            if !geometry.contains(cell) {
                return Err(Error::input(
                    "cells",
                    format!("cell {cell} lies outside the {}x{} grid", geometry.a, geometry.b),
                ));
            }
            let idx = geometry.index(cell);
            region.mask[idx] = true;
        }
        Ok(region)
    }

    /// Histogram whose column `i` holds the bottom `heights[i]` cells.
    pub fn histogram(b: usize, heights: &[usize]) -> Result<Self> {
        let geometry = Geometry::new(Shape::Rectangle, heights.len(), b)?;
        let mut region = Self::empty(geometry);
        for (i, &height) in heights.iter().enumerate() {
            if height > b {
                return Err(Error::input(
                    "cells",
                    format!("column {i} height {height} exceeds b = {b}"),
                ));
            }
            for j in b - height..b {
                region.mask[geometry.index(Cell::new(i, j))] = true;
            }
        }
        Ok(region)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    #[inline]
    pub fn contains(&self, cell: Cell) -> bool {
        self.geometry.contains(cell) && self.mask[self.geometry.index(cell)]
    }

    #[inline]
    pub fn contains_index(&self, index: usize) -> bool {
        self.mask[index]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&x| x).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&x| x)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&x| x)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(idx, _)| self.geometry.cell_at(idx))
    }

    /// Every cell `(i, j)` with `j < b - 1` has `(i, j + 1)` in the region.
    pub fn is_histogram(&self) -> bool {
        let a = self.geometry.a;
        self.mask
            .chunks(a)
            .zip(self.mask.chunks(a).skip(1))
            .all(|(upper, lower)| upper.iter().zip(lower).all(|(&u, &l)| !u || l))
    }

    /// Number of region cells in each column.
    pub fn column_heights(&self) -> Vec<usize> {
        let a = self.geometry.a;
        let mut heights = vec![0; a];
        for row in self.mask.chunks(a) {
            for (h, &x) in heights.iter_mut().zip(row) {
                *h += usize::from(x);
            }
        }
        heights
    }

    /// Number of region cells in each row (`c_j`).
    pub fn row_counts(&self) -> Vec<usize> {
        row_counts(self)
    }
}

pub fn row_counts(region: &Region) -> Vec<usize> {
    let a = region.geometry.a;
    region
        .mask
        .chunks(a)
        .map(|row| row.iter().filter(|&&x| x).count())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BarSpec {
    /// Horizontal bar length.
    pub h: usize,
    /// Vertical bar length.
    pub v: usize,
}

impl BarSpec {
    pub fn new(h: usize, v: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::input("h", "must be at least 1"));
        }
        if v == 0 {
            return Err(Error::input("v", "must be at least 1"));
        }
        Ok(BarSpec { h, v })
    }

    pub const fn dominoes() -> Self {
        BarSpec { h: 2, v: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A placed bar, anchored at its leftmost (horizontal) or topmost (vertical)
/// cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bar {
    pub orientation: Orientation,
    pub anchor: Cell,
}

impl Ord for Bar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.anchor, self.orientation).cmp(&(other.anchor, other.orientation))
    }
}

impl PartialOrd for Bar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::Horizontal => 'H',
            Orientation::Vertical => 'V',
        };
        write!(f, "{o}{}", self.anchor)
    }
}

impl Bar {
    pub const fn horizontal(i: usize, j: usize) -> Self {
        Bar {
            orientation: Orientation::Horizontal,
            anchor: Cell::new(i, j),
        }
    }

    pub const fn vertical(i: usize, j: usize) -> Self {
        Bar {
            orientation: Orientation::Vertical,
            anchor: Cell::new(i, j),
        }
    }

    pub fn length(&self, spec: BarSpec) -> usize {
        match self.orientation {
            Orientation::Horizontal => spec.h,
            Orientation::Vertical => spec.v,
        }
    }

    /// Cells covered by the bar. Wraps on a torus; on a rectangle a bar that
    /// leaves the grid is a violation.
    pub fn cells(&self, spec: BarSpec, geometry: Geometry) -> std::result::Result<Vec<Cell>, Violation> {
        if !geometry.contains(self.anchor) {
            return Err(Violation::AnchorOutOfRange(*self));
        }
        let len = self.length(spec);
        let (extent, start) = match self.orientation {
            Orientation::Horizontal => (geometry.a, self.anchor.i),
            Orientation::Vertical => (geometry.b, self.anchor.j),
        };
        if geometry.is_torus() {
            if len > extent {
                return Err(Violation::SelfOverlap(*self));
            }
        } else if start + len > extent {
            return Err(Violation::OffEdge(*self));
        }
        Ok((0..len)
            .map(|k| {
                let t = (start + k) % extent;
                match self.orientation {
                    Orientation::Horizontal => Cell::new(t, self.anchor.j),
                    Orientation::Vertical => Cell::new(self.anchor.i, t),
                }
            })
            .collect())
    }

    /// Canonical anchor: on a torus a bar spanning the whole row (column) is
    /// anchored at column (row) 0.
    pub fn canonical(self, spec: BarSpec, geometry: Geometry) -> Bar {
        if !geometry.is_torus() {
            return self;
        }
        let mut bar = self;
        match bar.orientation {
            Orientation::Horizontal if spec.h == geometry.a => bar.anchor.i = 0,
            Orientation::Vertical if spec.v == geometry.b => bar.anchor.j = 0,
            _ => {}
        }
        bar
    }
}

/// Column counts `m` (vertical bars) and row counts `n` (horizontal bars).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectionPair {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
}

impl ProjectionPair {
    pub fn new(m: Vec<usize>, n: Vec<usize>) -> Self {
        ProjectionPair { m, n }
    }

    pub fn uniform(a: usize, b: usize, m: usize, n: usize) -> Self {
        ProjectionPair {
            m: vec![m; a],
            n: vec![n; b],
        }
    }

    /// `v * sum(m) + h * sum(n)`: the number of cells a realization covers.
    pub fn covered_area(&self, spec: BarSpec) -> Result<usize> {
        let sum = |xs: &[usize], len: usize| -> Result<usize> {
            xs.iter()
                .try_fold(0usize, |acc, &x| acc.checked_add(x.checked_mul(len)?))
                .ok_or(Error::Overflow("projection area"))
        };
        sum(&self.m, spec.v)?
            .checked_add(sum(&self.n, spec.h)?)
            .ok_or(Error::Overflow("projection area"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub region: Region,
    pub spec: BarSpec,
    pub projections: ProjectionPair,
}

impl Instance {
    pub fn new(region: Region, spec: BarSpec, projections: ProjectionPair) -> Result<Self> {
        let g = region.geometry();
        if projections.m.len() != g.a {
            return Err(Error::input(
                "m",
                format!("has length {} but a = {}", projections.m.len(), g.a),
            ));
        }
        if projections.n.len() != g.b {
            return Err(Error::input(
                "n",
                format!("has length {} but b = {}", projections.n.len(), g.b),
            ));
        }
        Ok(Instance {
            region,
            spec,
            projections,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.region.geometry()
    }
}

#[derive(Clone, Debug)]
pub struct Tiling {
    pub spec: BarSpec,
    pub region: Region,
    pub bars: Vec<Bar>,
}

impl Tiling {
    pub fn new(spec: BarSpec, region: Region, bars: Vec<Bar>) -> Self {
        Tiling { spec, region, bars }
    }

    pub fn geometry(&self) -> Geometry {
        self.region.geometry()
    }

    /// Bars with canonical anchors, sorted.
    pub fn canonical_bars(&self) -> Vec<Bar> {
        let g = self.geometry();
        let mut bars: Vec<Bar> = self.bars.iter().map(|b| b.canonical(self.spec, g)).collect();
        bars.sort_unstable();
        bars
    }

    pub fn validate(&self) -> ValidationReport {
        validate_tiling(self)
    }

    pub fn projections(&self) -> Result<ProjectionPair> {
        projections_of(self)
    }
}

impl PartialEq for Tiling {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.region == other.region
            && self.canonical_bars() == other.canonical_bars()
    }
}

impl Eq for Tiling {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    AnchorOutOfRange(Bar),
    /// A rectangle bar running past the grid edge.
    OffEdge(Bar),
    /// A torus bar longer than the cycle it lies on.
    SelfOverlap(Bar),
    OutsideRegion(Cell),
    Overlap(Cell),
    Uncovered(Cell),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AnchorOutOfRange(bar) => write!(f, "bar {bar} anchored outside the grid"),
            Violation::OffEdge(bar) => write!(f, "bar {bar} runs off the rectangle edge"),
            Violation::SelfOverlap(bar) => write!(f, "bar {bar} is longer than the torus"),
            Violation::OutsideRegion(cell) => write!(f, "cell {cell} covered but not in region"),
            Violation::Overlap(cell) => write!(f, "cell {cell} covered more than once"),
            Violation::Uncovered(cell) => write!(f, "cell {cell} uncovered"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_tiling(tiling: &Tiling) -> ValidationReport {
    let g = tiling.geometry();
    let mut cover = vec![0u8; g.cell_count()];
    let mut violations = Vec::new();
    for bar in &tiling.bars {
        match bar.cells(tiling.spec, g) {
            Ok(cells) => {
                for cell in cells {
                    let idx = g.index(cell);
                    cover[idx] = cover[idx].saturating_add(1);
                }
            }
            Err(v) => violations.push(v),
        }
    }
    let mut outside = BTreeSet::new();
    for (idx, &count) in cover.iter().enumerate() {
        let cell = g.cell_at(idx);
        let inside = tiling.region.contains_index(idx);
        if count > 0 && !inside {
            outside.insert(cell);
        }
        if count > 1 {
            violations.push(Violation::Overlap(cell));
        }
        if count == 0 && inside {
            violations.push(Violation::Uncovered(cell));
        }
    }
    violations.extend(outside.into_iter().map(Violation::OutsideRegion));
    ValidationReport { violations }
}

pub fn projections_of(tiling: &Tiling) -> Result<ProjectionPair> {
    let report = validate_tiling(tiling);
    if !report.is_ok() {
        return Err(Error::InvalidTiling(report));
    }
    Ok(count_bars(tiling))
}

/// Per-line bar counts without validating the tiling first.
pub(crate) fn count_bars(tiling: &Tiling) -> ProjectionPair {
    let g = tiling.geometry();
    let mut m = vec![0; g.a];
    let mut n = vec![0; g.b];
    for bar in &tiling.bars {
        match bar.orientation {
            Orientation::Vertical => m[bar.anchor.i] += 1,
            Orientation::Horizontal => n[bar.anchor.j] += 1,
        }
    }
    ProjectionPair { m, n }
}

//! The four-tiling gadget and the reduction from 3-color consistency to
//! domino tiling of a sub-grid with prescribed projections.
//!
//! The gadget is two rectangular rings sharing one corner cell, plus one
//! extra cell. Every domino tiling pairs the extra cell with a ring cell,
//! which fixes that ring and leaves two tilings of the other, so the gadget
//! has exactly four tilings. They are labeled by [`Color`] in canonical
//! order. A reduced instance places one gadget per matrix entry; the column
//! projection of column band `i` is `sum_c m_i^c s^c`, and linear
//! independence of the `s^c` (and of the `t^c`) lets the color counts be read
//! back.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{is_cycle, neighbours, ExactSolver};
use crate::grid::{projections_of, Bar, BarSpec, Cell, Geometry, Instance, ProjectionPair, Region, Tiling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Colorless,
    Red,
    Blue,
    Green,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Colorless, Color::Red, Color::Blue, Color::Green];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Colorless => "colorless",
            Color::Red => "red",
            Color::Blue => "blue",
            Color::Green => "green",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-color column and row counts of an `a x b` matrix over [`Color`].
/// `m[c][i]` is the number of entries of color `c` in column `i`, `n[c][j]`
/// the number in row `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeColorInstance {
    pub a: usize,
    pub b: usize,
    pub m: [Vec<usize>; 4],
    pub n: [Vec<usize>; 4],
}

impl ThreeColorInstance {
    pub fn new(a: usize, b: usize, m: [Vec<usize>; 4], n: [Vec<usize>; 4]) -> Result<Self> {
        if a == 0 {
            return Err(Error::input("a", "must be at least 1"));
        }
        if b == 0 {
            return Err(Error::input("b", "must be at least 1"));
        }
        for c in Color::ALL {
            if m[c.index()].len() != a {
                return Err(Error::input(
                    format!("m.{c}"),
                    format!("has length {} but a = {a}", m[c.index()].len()),
                ));
            }
            if n[c.index()].len() != b {
                return Err(Error::input(
                    format!("n.{c}"),
                    format!("has length {} but b = {b}", n[c.index()].len()),
                ));
            }
        }
        for i in 0..a {
            let total: usize = m.iter().map(|v| v[i]).sum();
            if total != b {
                return Err(Error::input(
                    "m",
                    format!("column {i} has {total} colored entries but b = {b}"),
                ));
            }
        }
        for j in 0..b {
            let total: usize = n.iter().map(|v| v[j]).sum();
            if total != a {
                return Err(Error::input(
                    "n",
                    format!("row {j} has {total} colored entries but a = {a}"),
                ));
            }
        }
        Ok(ThreeColorInstance { a, b, m, n })
    }

    /// The instance whose counts are read off `matrix`.
    pub fn from_matrix(matrix: &ColorMatrix) -> Self {
        let (a, b) = (matrix.a, matrix.b);
        let mut m = [vec![0; a], vec![0; a], vec![0; a], vec![0; a]];
        let mut n = [vec![0; b], vec![0; b], vec![0; b], vec![0; b]];
        for j in 0..b {
            for i in 0..a {
                let c = matrix.get(i, j).index();
                m[c][i] += 1;
                n[c][j] += 1;
            }
        }
        ThreeColorInstance { a, b, m, n }
    }

    pub fn is_solved_by(&self, matrix: &ColorMatrix) -> bool {
        matrix.a == self.a && matrix.b == self.b && Self::from_matrix(matrix) == *self
    }
}

/// An `a x b` matrix over [`Color`], indexed by column `i` and row `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColorMatrix {
    a: usize,
    b: usize,
    entries: Vec<Color>,
}

impl ColorMatrix {
    pub fn filled(a: usize, b: usize, color: Color) -> Self {
        ColorMatrix {
            a,
            b,
            entries: vec![color; a * b],
        }
    }

    /// From rows, each a slice of `a` colors.
    pub fn from_rows(rows: &[Vec<Color>]) -> Result<Self> {
        let b = rows.len();
        let a = rows.first().map_or(0, Vec::len);
        if a == 0 || rows.iter().any(|r| r.len() != a) {
            return Err(Error::input("rows", "must be non-empty and of equal length"));
        }
        Ok(ColorMatrix {
            a,
            b,
            entries: rows.concat(),
        })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn get(&self, i: usize, j: usize) -> Color {
        self.entries[j * self.a + i]
    }

    pub fn set(&mut self, i: usize, j: usize, color: Color) {
        self.entries[j * self.a + i] = color;
    }

    pub fn rows(&self) -> Vec<Vec<Color>> {
        self.entries.chunks(self.a).map(<[Color]>::to_vec).collect()
    }
}

impl fmt::Display for ColorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.a) {
            let names: Vec<&str> = row.iter().map(|c| c.name()).collect();
            writeln!(f, "{}", names.join(" "))?;
        }
        Ok(())
    }
}

/// A block with exactly four domino tilings, one per color.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gadget {
    pub block_w: usize,
    pub block_h: usize,
    /// Sorted row-major.
    pub cells: Vec<Cell>,
    /// Canonical bar lists, indexed by [`Color::index`].
    pub tilings: [Vec<Bar>; 4],
    pub s: [Vec<usize>; 4],
    pub t: [Vec<usize>; 4],
}

impl Gadget {
    pub fn geometry(&self) -> Geometry {
        Geometry::rectangle(self.block_w, self.block_h)
    }

    pub fn region(&self) -> Result<Region> {
        Region::from_cells(self.geometry(), self.cells.iter().copied())
    }

    pub fn tiling(&self, color: Color) -> Result<Tiling> {
        Ok(Tiling::new(
            BarSpec::dominoes(),
            self.region()?,
            self.tilings[color.index()].clone(),
        ))
    }

    /// Color whose tiling has exactly these bars (in any order).
    pub fn color_of(&self, bars: &[Bar]) -> Option<Color> {
        let mut sorted = bars.to_vec();
        sorted.sort_unstable();
        Color::ALL
            .into_iter()
            .find(|c| self.tilings[c.index()] == sorted)
    }
}

/// Builds the gadget for `region` if it has exactly four domino tilings.
fn gadget_from_region(region: &Region) -> Result<Option<Gadget>> {
    let g = region.geometry();
    let solver = ExactSolver {
        cell_budget: g.cell_count(),
        ..ExactSolver::default()
    };
    let found = solver.enumerate_free(region, BarSpec::dominoes(), 5)?;
    if found.len() != 4 {
        return Ok(None);
    }
    let mut tilings: Vec<Vec<Bar>> = found.iter().map(Tiling::canonical_bars).collect();
    tilings.sort();
    let mut s: [Vec<usize>; 4] = Default::default();
    let mut t: [Vec<usize>; 4] = Default::default();
    for (k, bars) in tilings.iter().enumerate() {
        let p = projections_of(&Tiling::new(BarSpec::dominoes(), region.clone(), bars.clone()))?;
        s[k] = p.m;
        t[k] = p.n;
    }
    let tilings: [Vec<Bar>; 4] = tilings.try_into().expect("four tilings");
    Ok(Some(Gadget {
        block_w: g.a,
        block_h: g.b,
        cells: region.cells().collect(),
        tilings,
        s,
        t,
    }))
}

/// Boundary cells of the `w x h` rectangle at `(x, y)`.
fn ring_cells(x: usize, y: usize, w: usize, h: usize) -> Vec<Cell> {
    let mut out = Vec::with_capacity(2 * (w + h));
    for j in y..y + h {
        for i in x..x + w {
            if i == x || i == x + w - 1 || j == y || j == y + h - 1 {
                out.push(Cell::new(i, j));
            }
        }
    }
    out
}

fn corners(x: usize, y: usize, w: usize, h: usize) -> [Cell; 4] {
    [
        Cell::new(x, y),
        Cell::new(x + w - 1, y),
        Cell::new(x, y + h - 1),
        Cell::new(x + w - 1, y + h - 1),
    ]
}

/// Cells with a neighbour in the copy of the block translated one block
/// width to the right or left, or one block height up or down.
pub fn ports(cells: &[Cell], block_w: usize, block_h: usize) -> Vec<Cell> {
    let set: BTreeSet<Cell> = cells.iter().copied().collect();
    cells
        .iter()
        .copied()
        .filter(|c| {
            (c.i == 0 && set.contains(&Cell::new(block_w - 1, c.j)))
                || (c.i == block_w - 1 && set.contains(&Cell::new(0, c.j)))
                || (c.j == 0 && set.contains(&Cell::new(c.i, block_h - 1)))
                || (c.j == block_h - 1 && set.contains(&Cell::new(c.i, 0)))
        })
        .collect()
}

/// Most ports [`is_sealed`] will examine.
const MAX_PORTS: usize = 16;

/// No domino tiling of translated copies can cross a block border: removing
/// any nonempty set of ports leaves a block with no domino tiling. A block
/// holding a crossing domino would be tiled internally apart from the ports
/// it lends out, so the condition rules crossings out.
pub fn is_sealed(cells: &[Cell], block_w: usize, block_h: usize) -> Result<bool> {
    let ports = ports(cells, block_w, block_h);
    if ports.len() > MAX_PORTS {
        return Ok(false);
    }
    let geometry = Geometry::rectangle(block_w, block_h);
    let solver = ExactSolver {
        cell_budget: geometry.cell_count(),
        ..ExactSolver::default()
    };
    for subset in 1u32..1 << ports.len() {
        let removed: Vec<Cell> = (0..ports.len())
            .filter(|k| subset >> k & 1 == 1)
            .map(|k| ports[k])
            .collect();
        if (cells.len() - removed.len()) % 2 == 1 {
            continue;
        }
        let rest = Region::from_cells(geometry, cells.iter().copied().filter(|c| !removed.contains(c)))?;
        if !solver.enumerate_free(&rest, BarSpec::dominoes(), 1)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches the `block_w x block_h` block for a gadget: two rectangular
/// rings sharing one corner cell, plus one extra cell. The candidate order
/// is fixed (rings by position then size, extra cell row-major), and the
/// first candidate with exactly four domino tilings, rank-4 `s` and `t`
/// families and a sealed border (see [`is_sealed`]) is returned.
pub fn find_gadget(block_w: usize, block_h: usize) -> Result<Gadget> {
    let geometry = Geometry::new(crate::grid::Shape::Rectangle, block_w, block_h)?;
    let mut rings = Vec::new();
    for y in 0..block_h {
        for x in 0..block_w {
            for h in 2..=block_h - y {
                for w in 2..=block_w - x {
                    let ring = Region::from_cells(geometry, ring_cells(x, y, w, h))?;
                    if is_cycle(&ring) {
                        rings.push((corners(x, y, w, h), ring));
                    }
                }
            }
        }
    }
    for (k, (corners1, ring1)) in rings.iter().enumerate() {
        for (corners2, ring2) in &rings[k + 1..] {
            let shared: Vec<Cell> = ring1.cells().filter(|&c| ring2.contains(c)).collect();
            if shared.len() != 1 || !corners1.contains(&shared[0]) || !corners2.contains(&shared[0]) {
                continue;
            }
            let union: Vec<Cell> = ring1.cells().chain(ring2.cells().filter(|&c| c != shared[0])).collect();
            let union_region = Region::from_cells(geometry, union.iter().copied())?;
            for extra in Region::full(geometry).cells() {
                if union_region.contains(extra) || neighbours(&union_region, extra).is_empty() {
                    continue;
                }
                let mut cells = union.clone();
                cells.push(extra);
                cells.sort_unstable();
                let region = Region::from_cells(geometry, cells)?;
                if let Some(gadget) = gadget_from_region(&region)? {
                    if rank(&gadget.s) == 4
                        && rank(&gadget.t) == 4
                        && is_sealed(&gadget.cells, block_w, block_h)?
                    {
                        return Ok(gadget);
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted {
        width: block_w,
        height: block_h,
    })
}

/// Rank of the given vectors by fraction-free (Bareiss) elimination.
pub fn rank(vectors: &[Vec<usize>]) -> usize {
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&k| rows[k][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        for k in r + 1..rows.len() {
            for c in col + 1..cols {
                rows[k][c] = (rows[r][col] * rows[k][c] - rows[k][col] * rows[r][c]) / prev;
            }
            rows[k][col] = 0;
        }
        prev = rows[r][col];
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// The unique `alpha` with `sum_c alpha_c vectors[c] = u`, or `None` when the
/// vectors are dependent or `u` is outside their span. Exact rational
/// arithmetic.
pub fn solve_coefficients(vectors: &[Vec<i64>], u: &[i64]) -> Option<Vec<Ratio<i128>>> {
    let k = vectors.len();
    let len = u.len();
    if vectors.iter().any(|v| v.len() != len) {
        return None;
    }
    // Augmented system: one row per component, one column per vector.
    let mut rows: Vec<Vec<Ratio<i128>>> = (0..len)
        .map(|r| {
            let mut row: Vec<Ratio<i128>> = vectors.iter().map(|v| Ratio::from(v[r] as i128)).collect();
            row.push(Ratio::from(u[r] as i128));
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let pivot = (pivot_row..len).find(|&r| rows[r][col] != Ratio::from(0))?;
        rows.swap(pivot_row, pivot);
        let p = rows[pivot_row][col];
        for x in rows[pivot_row].iter_mut() {
            *x /= p;
        }
        for r in 0..len {
            if r != pivot_row && rows[r][col] != Ratio::from(0) {
                let f = rows[r][col];
                for c in col..=k {
                    let delta = f * rows[pivot_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if rows[k..].iter().any(|row| row[k] != Ratio::from(0)) {
        return None;
    }
    Some(rows[..k].iter().map(|row| row[k]).collect())
}

/// Components (1-indexed 1, 3, 4, 7) and per-color values of the published
/// column vectors, with the published coefficients for `u = (1, 1, 1, 1)`.
pub const PUBLISHED_COMPONENTS: [usize; 4] = [0, 2, 3, 6];
pub const PUBLISHED_ROWS: [[i64; 4]; 4] = [[2, 1, 2, 2], [3, 2, 2, 3], [1, 1, 0, 0], [1, 1, 1, 2]];
pub const PUBLISHED_ALPHA: [i64; 4] = [-2, 3, 2, -1];

/// Solves the published 4x4 system for `u = (1, 1, 1, 1)`.
pub fn published_coefficients() -> Option<Vec<Ratio<i128>>> {
    let vectors: Vec<Vec<i64>> = (0..4).map(|c| PUBLISHED_ROWS.iter().map(|row| row[c]).collect()).collect();
    solve_coefficients(&vectors, &[1, 1, 1, 1])
}

/// Outcome of [`verify_gadget`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetReport {
    pub tiling_count: usize,
    pub s_rank: usize,
    pub t_rank: usize,
    pub sealed: bool,
    /// `{s^c} = {t^c}` as multisets. Reported, not required.
    pub symmetric: bool,
    /// `Some(recovered == published)` when the `s` vectors agree with the
    /// published components, `None` otherwise.
    pub published_match: Option<bool>,
    pub violations: Vec<String>,
}

impl GadgetReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for GadgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tilings: {}", self.tiling_count)?;
        writeln!(f, "rank s: {}", self.s_rank)?;
        writeln!(f, "rank t: {}", self.t_rank)?;
        writeln!(f, "sealed: {}", self.sealed)?;
        writeln!(f, "s/t multisets equal: {}", self.symmetric)?;
        match self.published_match {
            Some(ok) => writeln!(f, "published coefficients recovered: {ok}")?,
            None => writeln!(f, "published components: not matched")?,
        }
        if self.is_ok() {
            writeln!(f, "status: ok")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            writeln!(f, "status: FAILED")
        }
    }
}

/// Re-enumerates the gadget's tilings and recomputes every derived field.
pub fn verify_gadget(g: &Gadget) -> Result<GadgetReport> {
    let mut violations = Vec::new();
    let region = g.region()?;
    let solver = ExactSolver {
        cell_budget: region.geometry().cell_count(),
        ..ExactSolver::default()
    };
    let found = solver.enumerate_free(&region, BarSpec::dominoes(), 5)?;
    let tiling_count = found.len();
    if tiling_count != 4 {
        violations.push(format!("tiling count is {tiling_count}, expected 4"));
    }
    let stored_count = g.tilings.iter().filter(|t| !t.is_empty()).collect::<BTreeSet<_>>().len();
    if stored_count != 4 {
        violations.push(format!("stored tiling count is {stored_count}, expected 4"));
    }
    let mut enumerated: Vec<Vec<Bar>> = found.iter().map(Tiling::canonical_bars).collect();
    enumerated.sort();
    let mut stored: Vec<Vec<Bar>> = g.tilings.to_vec();
    stored.sort();
    if enumerated != stored {
        violations.push("stored tilings differ from the enumerated ones".into());
    }
    if !g.tilings.windows(2).all(|w| w[0] < w[1]) {
        violations.push("tilings are not in canonical order".into());
    }
    for c in Color::ALL {
        let tiling = g.tiling(c)?;
        let report = tiling.validate();
        if !report.is_ok() {
            violations.push(format!("tiling {c}: {report}"));
            continue;
        }
        let p = projections_of(&tiling)?;
        if p.m != g.s[c.index()] {
            violations.push(format!("s^{c} does not match the tiling's column projections"));
        }
        if p.n != g.t[c.index()] {
            violations.push(format!("t^{c} does not match the tiling's row projections"));
        }
    }
    let s_rank = rank(&g.s);
    let t_rank = rank(&g.t);
    if s_rank != 4 {
        violations.push(format!("s family has rank {s_rank}"));
    }
    if t_rank != 4 {
        violations.push(format!("t family has rank {t_rank}"));
    }
    let sealed = is_sealed(&g.cells, g.block_w, g.block_h)?;
    if !sealed {
        violations.push("a domino can cross into a neighbouring block".into());
    }
    let mut s_sorted = g.s.to_vec();
    let mut t_sorted = g.t.to_vec();
    s_sorted.sort();
    t_sorted.sort();
    let matches_published = g.block_w >= 7
        && PUBLISHED_COMPONENTS.iter().zip(PUBLISHED_ROWS).all(|(&k, row)| {
            Color::ALL
                .iter()
                .all(|c| g.s[c.index()][k] as i64 == row[c.index()])
        });
    let published_match = matches_published.then(|| {
        let vectors: Vec<Vec<i64>> = g
            .s
            .iter()
            .map(|v| PUBLISHED_COMPONENTS.iter().map(|&k| v[k] as i64).collect())
            .collect();
        solve_coefficients(&vectors, &[1, 1, 1, 1])
            == Some(PUBLISHED_ALPHA.iter().map(|&x| Ratio::from(x as i128)).collect())
    });
    if published_match == Some(false) {
        violations.push("published coefficients not recovered".into());
    }
    Ok(GadgetReport {
        tiling_count,
        s_rank,
        t_rank,
        sealed,
        symmetric: s_sorted == t_sorted,
        published_match,
        violations,
    })
}

fn add_scaled(acc: &mut [usize], v: &[usize], k: usize) {
    for (x, y) in acc.iter_mut().zip(v) {
        *x += k * y;
    }
}

/// Builds the domino instance on `a x b` translated copies of the gadget.
pub fn reduce(inst: &ThreeColorInstance, g: &Gadget) -> Result<Instance> {
    let inst = ThreeColorInstance::new(inst.a, inst.b, inst.m.clone(), inst.n.clone())?;
    let (w, h) = (g.block_w, g.block_h);
    let width = inst.a.checked_mul(w).ok_or(Error::Overflow("a*block_w"))?;
    let height = inst.b.checked_mul(h).ok_or(Error::Overflow("b*block_h"))?;
    let geometry = Geometry::new(crate::grid::Shape::Rectangle, width, height)?;
    let mut cells = Vec::with_capacity(inst.a * inst.b * g.cells.len());
    for j in 0..inst.b {
        for i in 0..inst.a {
            cells.extend(g.cells.iter().map(|c| Cell::new(c.i + w * i, c.j + h * j)));
        }
    }
    let region = Region::from_cells(geometry, cells)?;
    let mut m = vec![0; width];
    for i in 0..inst.a {
        for c in Color::ALL {
            add_scaled(&mut m[w * i..w * (i + 1)], &g.s[c.index()], inst.m[c.index()][i]);
        }
    }
    let mut n = vec![0; height];
    for j in 0..inst.b {
        for c in Color::ALL {
            add_scaled(&mut n[h * j..h * (j + 1)], &g.t[c.index()], inst.n[c.index()][j]);
        }
    }
    Instance::new(region, BarSpec::dominoes(), ProjectionPair::new(m, n))
}

/// Reads one gadget tiling out of each block of a tiling of a reduced region.
pub fn project_solution(t: &Tiling, g: &Gadget) -> Result<ColorMatrix> {
    let geom = t.geometry();
    let (w, h) = (g.block_w, g.block_h);
    if geom.a % w != 0 || geom.b % h != 0 {
        return Err(Error::Inconsistent(format!(
            "a {}x{} grid is not a whole number of {w}x{h} blocks",
            geom.a, geom.b
        )));
    }
    let (a, b) = (geom.a / w, geom.b / h);
    let mut blocks: Vec<Vec<Bar>> = vec![Vec::new(); a * b];
    for bar in t.canonical_bars() {
        let cells = bar
            .cells(t.spec, geom)
            .map_err(|v| Error::Inconsistent(format!("bar {bar}: {v}")))?;
        let (bi, bj) = (bar.anchor.i / w, bar.anchor.j / h);
        if cells.iter().any(|c| c.i / w != bi || c.j / h != bj) {
            return Err(Error::Inconsistent(format!("bar {bar} crosses a block border")));
        }
        blocks[bj * a + bi].push(Bar {
            orientation: bar.orientation,
            anchor: Cell::new(bar.anchor.i - bi * w, bar.anchor.j - bj * h),
        });
    }
    let mut out = ColorMatrix::filled(a, b, Color::Colorless);
    for j in 0..b {
        for i in 0..a {
            let color = g.color_of(&blocks[j * a + i]).ok_or_else(|| {
                Error::Inconsistent(format!("block ({i},{j}) is not tiled by a gadget tiling"))
            })?;
            out.set(i, j, color);
        }
    }
    Ok(out)
}

/// Places the tiling of color `mtx[i][j]` in block `(i, j)`.
pub fn lift_solution(mtx: &ColorMatrix, g: &Gadget) -> Result<Tiling> {
    let (w, h) = (g.block_w, g.block_h);
    let geometry = Geometry::rectangle(mtx.a * w, mtx.b * h);
    let mut cells = Vec::with_capacity(mtx.a * mtx.b * g.cells.len());
    let mut bars = Vec::new();
    for j in 0..mtx.b {
        for i in 0..mtx.a {
            let (dx, dy) = (w * i, h * j);
            cells.extend(g.cells.iter().map(|c| Cell::new(c.i + dx, c.j + dy)));
            bars.extend(g.tilings[mtx.get(i, j).index()].iter().map(|bar| Bar {
                orientation: bar.orientation,
                anchor: Cell::new(bar.anchor.i + dx, bar.anchor.j + dy),
            }));
        }
    }
    Ok(Tiling::new(
        BarSpec::dominoes(),
        Region::from_cells(geometry, cells)?,
        bars,
    ))
}

/// Largest `a * b` accepted by the exhaustive solvers.
pub const BRUTEFORCE_CELLS: usize = 9;

/// Calls `visit` on every matrix in `Color^{a x b}` until it returns true.
fn search_matrices(a: usize, b: usize, mut visit: impl FnMut(&ColorMatrix) -> bool) -> Result<Option<ColorMatrix>> {
    let cells = a * b;
    if cells > BRUTEFORCE_CELLS {
        return Err(Error::Budget(format!(
            "{a}x{b} matrix has {cells} entries, exhaustive search is limited to {BRUTEFORCE_CELLS}"
        )));
    }
    let mut mtx = ColorMatrix::filled(a, b, Color::Colorless);
    for code in 0..1usize << (2 * cells) {
        for k in 0..cells {
            mtx.entries[k] = Color::ALL[(code >> (2 * k)) & 3];
        }
        if visit(&mtx) {
            return Ok(Some(mtx));
        }
    }
    Ok(None)
}

/// Exhaustive search over `Color^{a x b}`; `Ok(None)` when unsolvable.
pub fn solve_3color_bruteforce(inst: &ThreeColorInstance) -> Result<Option<ColorMatrix>> {
    search_matrices(inst.a, inst.b, |mtx| inst.is_solved_by(mtx))
}

/// Decides a reduced instance built on an `a x b` array of gadget blocks by
/// choosing one gadget tiling per block and comparing band projections.
/// Returns the lifted tiling.
pub fn solve_reduced_by_blocks(instance: &Instance, g: &Gadget) -> Result<Option<Tiling>> {
    let geom = instance.geometry();
    let (w, h) = (g.block_w, g.block_h);
    if geom.a % w != 0 || geom.b % h != 0 {
        return Err(Error::input("a", format!("not a whole number of {w}x{h} blocks")));
    }
    let (a, b) = (geom.a / w, geom.b / h);
    let target = &instance.projections;
    let found = search_matrices(a, b, |mtx| {
        let mut m = vec![0; geom.a];
        let mut n = vec![0; geom.b];
        for j in 0..b {
            for i in 0..a {
                let c = mtx.get(i, j).index();
                add_scaled(&mut m[w * i..w * (i + 1)], &g.s[c], 1);
                add_scaled(&mut n[h * j..h * (j + 1)], &g.t[c], 1);
            }
        }
        m == target.m && n == target.n
    })?;
    found.map(|mtx| lift_solution(&mtx, g)).transpose()
}

const FROZEN_GADGET: &str = include_str!("../data/gadget.json");

/// The gadget shipped with the crate, as found by `find_gadget(7, 7)`.
pub fn frozen_gadget() -> Result<Gadget> {
    crate::format::from_json::<crate::format::GadgetFile>(FROZEN_GADGET)?.to_gadget()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate_exact;

    fn gadget() -> Gadget {
        frozen_gadget().unwrap()
    }

    fn counts(a: usize, b: usize, pairs: &[(Color, usize, usize)]) -> [Vec<usize>; 4] {
        // (color, index, count) triples on top of zero vectors of length a.
        let _ = b;
        let mut v = [vec![0; a], vec![0; a], vec![0; a], vec![0; a]];
        for &(c, k, x) in pairs {
            v[c.index()][k] = x;
        }
        v
    }

    fn single(mc: Color, nc: Color) -> ThreeColorInstance {
        ThreeColorInstance::new(1, 1, counts(1, 1, &[(mc, 0, 1)]), counts(1, 1, &[(nc, 0, 1)])).unwrap()
    }

    #[test]
    fn search_reproduces_the_frozen_gadget() {
        assert_eq!(find_gadget(7, 7).unwrap(), gadget());
    }

    #[test]
    fn small_block_has_no_gadget() {
        assert!(matches!(
            find_gadget(2, 2),
            Err(Error::SearchExhausted { width: 2, height: 2 })
        ));
    }

    #[test]
    fn frozen_gadget_verifies() {
        let report = verify_gadget(&gadget()).unwrap();
        assert!(report.is_ok(), "{report}");
        assert_eq!((report.tiling_count, report.s_rank, report.t_rank), (4, 4, 4));
        assert!(report.sealed);
    }

    #[test]
    fn deleted_tiling_is_reported() {
        let mut g = gadget();
        g.tilings[Color::Blue.index()].clear();
        let report = verify_gadget(&g).unwrap();
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("tiling count is 3")));
    }

    #[test]
    fn wrong_vector_is_reported() {
        let mut g = gadget();
        g.s[Color::Red.index()][0] += 1;
        assert!(!verify_gadget(&g).unwrap().is_ok());
    }

    #[test]
    fn published_system_recovers_published_coefficients() {
        let alpha = published_coefficients().unwrap();
        let expected: Vec<Ratio<i128>> = PUBLISHED_ALPHA.iter().map(|&x| Ratio::from(x as i128)).collect();
        assert_eq!(alpha, expected);
        // u = sum_c alpha_c s^c at the four components is (1, 1, 1, 1).
        for row in PUBLISHED_ROWS {
            let u: i64 = row.iter().zip(PUBLISHED_ALPHA).map(|(s, a)| s * a).sum();
            assert_eq!(u, 1);
        }
    }

    #[test]
    fn rank_by_fraction_free_elimination() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0]]), 2);
        assert_eq!(rank(&[vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 5]]), 3);
        assert_eq!(rank(&[vec![0, 0], vec![0, 0]]), 0);
    }

    #[test]
    fn coefficients_are_recovered_from_combinations() {
        let g = gadget();
        let s: Vec<Vec<i64>> = g.s.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
        for alpha in [[0, 0, 0, 0], [1, 2, 3, 4], [5, 0, 0, 1], [2, 2, 2, 2]] {
            let u: Vec<i64> = (0..7).map(|k| (0..4).map(|c| alpha[c] * s[c][k]).sum()).collect();
            let got = solve_coefficients(&s, &u).unwrap();
            assert_eq!(got, alpha.iter().map(|&x| Ratio::from(x as i128)).collect::<Vec<_>>());
        }
        assert!(solve_coefficients(&[vec![1, 0], vec![2, 0]], &[1, 0]).is_none());
        assert!(solve_coefficients(&[vec![1, 0]], &[1, 1]).is_none());
    }

    #[test]
    fn single_block_reduction() {
        let g = gadget();
        let inst = reduce(&single(Color::Red, Color::Red), &g).unwrap();
        assert_eq!(inst.region.len(), g.cells.len());
        assert_eq!(inst.projections.m, g.s[Color::Red.index()]);
        assert_eq!(inst.projections.n, g.t[Color::Red.index()]);
        let all = enumerate_exact(&inst, 10).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].canonical_bars(), g.tilings[Color::Red.index()]);

        let mixed = reduce(&single(Color::Red, Color::Blue), &g).unwrap();
        assert!(enumerate_exact(&mixed, 10).unwrap().is_empty());
    }

    #[test]
    fn two_colorless_columns() {
        let g = gadget();
        let inst = ThreeColorInstance::new(
            2,
            1,
            counts(2, 1, &[(Color::Colorless, 0, 1), (Color::Colorless, 1, 1)]),
            counts(1, 1, &[(Color::Colorless, 0, 2)]),
        )
        .unwrap();
        let reduced = reduce(&inst, &g).unwrap();
        let s0 = &g.s[Color::Colorless.index()];
        assert_eq!(reduced.projections.m, [s0.clone(), s0.clone()].concat());
        let t0: Vec<usize> = g.t[Color::Colorless.index()].iter().map(|x| 2 * x).collect();
        assert_eq!(reduced.projections.n, t0);
        let found = enumerate_exact(&reduced, 10).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(
            project_solution(&found[0], &g).unwrap(),
            ColorMatrix::filled(2, 1, Color::Colorless)
        );
    }

    #[test]
    fn translated_blocks_only_tile_blockwise() {
        let g = gadget();
        for (a, b) in [(2, 1), (1, 2), (2, 2)] {
            let lifted = lift_solution(&ColorMatrix::filled(a, b, Color::Colorless), &g).unwrap();
            let solver = ExactSolver {
                cell_budget: lifted.region.len(),
                ..ExactSolver::default()
            };
            let all = solver
                .enumerate_free(&lifted.region, BarSpec::dominoes(), 1000)
                .unwrap();
            assert_eq!(all.len(), 4usize.pow((a * b) as u32), "{a}x{b}");
            for t in &all {
                project_solution(t, &g).unwrap();
            }
        }
    }

    #[test]
    fn lift_and_project() {
        let g = gadget();
        for c in Color::ALL {
            let mtx = ColorMatrix::filled(1, 1, c);
            let t = lift_solution(&mtx, &g).unwrap();
            assert_eq!(t.canonical_bars(), g.tilings[c.index()]);
            assert_eq!(project_solution(&t, &g).unwrap(), mtx);
        }
        let mtx = ColorMatrix::from_rows(&[vec![Color::Red, Color::Blue]]).unwrap();
        let t = lift_solution(&mtx, &g).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(project_solution(&t, &g).unwrap(), mtx);
        let inst = reduce(&ThreeColorInstance::from_matrix(&mtx), &g).unwrap();
        assert_eq!(projections_of(&t).unwrap(), inst.projections);
        assert_eq!(t.region, inst.region);
    }

    #[test]
    fn lifted_projections_match_reduction_for_every_two_by_one_matrix() {
        let g = gadget();
        for x in Color::ALL {
            for y in Color::ALL {
                let mtx = ColorMatrix::from_rows(&[vec![x, y]]).unwrap();
                let t = lift_solution(&mtx, &g).unwrap();
                let inst = reduce(&ThreeColorInstance::from_matrix(&mtx), &g).unwrap();
                assert_eq!(projections_of(&t).unwrap(), inst.projections);
            }
        }
    }

    #[test]
    fn corrupted_block_is_an_inconsistency() {
        let g = gadget();
        let mut t = lift_solution(&ColorMatrix::filled(1, 1, Color::Green), &g).unwrap();
        t.bars.pop();
        assert!(matches!(project_solution(&t, &g), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn bruteforce_examples() {
        let red = solve_3color_bruteforce(&single(Color::Red, Color::Red)).unwrap();
        assert_eq!(red, Some(ColorMatrix::filled(1, 1, Color::Red)));
        assert_eq!(solve_3color_bruteforce(&single(Color::Red, Color::Blue)).unwrap(), None);
        let big = ThreeColorInstance::new(
            5,
            2,
            counts(5, 2, &[0, 1, 2, 3, 4].map(|i| (Color::Colorless, i, 2))),
            counts(2, 5, &[(Color::Colorless, 0, 5), (Color::Colorless, 1, 5)]),
        )
        .unwrap();
        assert!(matches!(solve_3color_bruteforce(&big), Err(Error::Budget(_))));
    }

    #[test]
    fn instance_validation() {
        assert!(ThreeColorInstance::new(1, 1, counts(1, 1, &[]), counts(1, 1, &[(Color::Red, 0, 1)])).is_err());
        let err = ThreeColorInstance::new(2, 1, counts(1, 1, &[]), counts(1, 1, &[])).unwrap_err();
        assert!(matches!(err, Error::InvalidInput { ref field, .. } if field == "m.colorless"));
    }

    #[test]
    fn tampered_gadget_file_is_rejected() {
        let mut file: crate::format::GadgetFile = crate::format::from_json(FROZEN_GADGET).unwrap();
        file.payload.s.red[0] += 1;
        assert!(matches!(file.to_gadget(), Err(Error::Parse(_))));
        let mut file: crate::format::GadgetFile = crate::format::from_json(FROZEN_GADGET).unwrap();
        file.payload.version = 2;
        file.checksum = file.payload.checksum();
        assert!(matches!(file.to_gadget(), Err(Error::Parse(_))));
    }
}

//! Cuts that no realization crosses, and two necessary conditions.
//!
//! On a full rectangle the number of horizontal bars starting in column `i`
//! is forced by the column constraints:
//!
//! ```text
//! c_i = b - (v m_i + c_{i-h+1} + ... + c_{i-1}),   c_i = 0 for i < 0
//! ```
//!
//! so whether a bar crosses the boundary after column `i` does not depend on
//! the realization. Rows are handled by the transposed recurrence.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::grid::{Bar, Geometry, Orientation, Region, Tiling};
use crate::greedy::tile_histogram_h1;

/// Why the recurrence rules out every realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutInfeasibility {
    NegativeColumnStart { column: usize },
    NegativeRowStart { row: usize },
    /// Horizontal bars would have to start too close to the right edge.
    ColumnOverhang { column: usize },
    /// Vertical bars would have to start too close to the bottom edge.
    RowOverhang { row: usize },
}

/// A maximal rectangle bounded by cuts or the grid border. Columns
/// `cols.0..cols.1`, rows `rows.0..rows.1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedBlock {
    pub cols: (usize, usize),
    pub rows: (usize, usize),
    /// Column constraints of the block, when attributable (a single row band).
    pub m: Option<Vec<usize>>,
    /// Row constraints of the block, when attributable (a single column band).
    pub n: Option<Vec<usize>>,
}

impl SeparatedBlock {
    pub fn width(&self) -> usize {
        self.cols.1 - self.cols.0
    }

    pub fn height(&self) -> usize {
        self.rows.1 - self.rows.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutReport {
    /// Horizontal bars starting in each column. Truncated after the first
    /// negative entry.
    pub c: Vec<i64>,
    /// Vertical bars starting in each row.
    pub d: Vec<i64>,
    /// `i` such that no horizontal bar crosses between columns `i` and `i+1`
    /// (the right border `a - 1` included).
    pub column_cuts: BTreeSet<usize>,
    pub row_cuts: BTreeSet<usize>,
    pub blocks: Vec<SeparatedBlock>,
    pub infeasible: Option<CutInfeasibility>,
}

impl CutReport {
    pub fn is_feasible(&self) -> bool {
        self.infeasible.is_none()
    }
}

/// Runs the start-count recurrence over one axis. `across` is the length of
/// a line (b for columns), `len` the bar length along the axis, `cross_len`
/// the length of the bars counted by `counts`.
fn start_counts(across: usize, len: usize, cross_len: usize, counts: &[usize]) -> (Vec<i64>, Option<usize>) {
    let mut out: Vec<i64> = Vec::with_capacity(counts.len());
    for (i, &count) in counts.iter().enumerate() {
        let window: i64 = out[i.saturating_sub(len - 1)..i].iter().sum();
        let value = across as i64 - (cross_len as i64) * (count as i64) - window;
        out.push(value);
        if value < 0 {
            return (out, Some(i));
        }
    }
    (out, None)
}

/// Boundaries after index `i` whose window `starts[i-len+2..=i]` is all zero.
fn cuts(starts: &[i64], len: usize) -> BTreeSet<usize> {
    (0..starts.len())
        .filter(|&i| {
            let lo = (i + 2).saturating_sub(len);
            lo > i || starts[lo..=i].iter().all(|&x| x == 0)
        })
        .collect()
}

/// Per-column horizontal-bar start counts `c`, or the first infeasibility.
pub fn column_starts(a: usize, b: usize, h: usize, v: usize, m: &[usize]) -> std::result::Result<Vec<i64>, CutInfeasibility> {
    let (c, negative) = start_counts(b, h, v, m);
    if let Some(column) = negative {
        return Err(CutInfeasibility::NegativeColumnStart { column });
    }
    if let Some(column) = (0..a).find(|&i| i + h > a && c[i] > 0) {
        return Err(CutInfeasibility::ColumnOverhang { column });
    }
    Ok(c)
}

/// Per-row vertical-bar start counts `d`, or the first infeasibility.
pub fn row_starts(a: usize, b: usize, h: usize, v: usize, n: &[usize]) -> std::result::Result<Vec<i64>, CutInfeasibility> {
    let (d, negative) = start_counts(a, v, h, n);
    if let Some(row) = negative {
        return Err(CutInfeasibility::NegativeRowStart { row });
    }
    if let Some(row) = (0..b).find(|&j| j + v > b && d[j] > 0) {
        return Err(CutInfeasibility::RowOverhang { row });
    }
    Ok(d)
}

fn check_lengths(a: usize, b: usize, h: usize, v: usize, m: &[usize], n: &[usize]) -> Result<()> {
    Geometry::new(crate::grid::Shape::Rectangle, a, b)?;
    crate::grid::BarSpec::new(h, v)?;
    if m.len() != a {
        return Err(Error::input("m", format!("has length {} but a = {a}", m.len())));
    }
    if n.len() != b {
        return Err(Error::input("n", format!("has length {} but b = {b}", n.len())));
    }
    Ok(())
}

fn bands(cuts: &BTreeSet<usize>, extent: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for &cut in cuts.iter().filter(|&&c| c + 1 < extent) {
        out.push((start, cut + 1));
        start = cut + 1;
    }
    out.push((start, extent));
    out
}

pub fn analyze_cuts(a: usize, b: usize, h: usize, v: usize, m: &[usize], n: &[usize]) -> Result<CutReport> {
    check_lengths(a, b, h, v, m, n)?;
    let (c, c_neg) = start_counts(b, h, v, m);
    let (d, d_neg) = start_counts(a, v, h, n);
    let mut report = CutReport {
        c,
        d,
        column_cuts: BTreeSet::new(),
        row_cuts: BTreeSet::new(),
        blocks: Vec::new(),
        infeasible: None,
    };
    report.infeasible = if let Some(column) = c_neg {
        Some(CutInfeasibility::NegativeColumnStart { column })
    } else if let Some(row) = d_neg {
        Some(CutInfeasibility::NegativeRowStart { row })
    } else if let Err(e) = column_starts(a, b, h, v, m) {
        Some(e)
    } else if let Err(e) = row_starts(a, b, h, v, n) {
        Some(e)
    } else {
        None
    };
    if report.infeasible.is_some() {
        return Ok(report);
    }
    report.column_cuts = cuts(&report.c, h);
    report.row_cuts = cuts(&report.d, v);
    let col_bands = bands(&report.column_cuts, a);
    let row_bands = bands(&report.row_cuts, b);
    for &rows in &row_bands {
        for &cols in &col_bands {
            report.blocks.push(SeparatedBlock {
                cols,
                rows,
                m: (row_bands.len() == 1).then(|| m[cols.0..cols.1].to_vec()),
                n: (col_bands.len() == 1).then(|| n[rows.0..rows.1].to_vec()),
            });
        }
    }
    Ok(report)
}

/// Outcome of the first necessary condition, with witnesses of the two
/// relaxed instances when they exist.
#[derive(Clone, Debug)]
pub struct Condition1 {
    /// Realization of `(m, h n, 1, v)`: horizontal bars shrunk to unit cells.
    pub unit_horizontal: Option<Tiling>,
    /// Realization of `(v m, n, h, 1)`: vertical bars shrunk to unit cells.
    pub unit_vertical: Option<Tiling>,
}

impl Condition1 {
    pub fn holds(&self) -> bool {
        self.unit_horizontal.is_some() && self.unit_vertical.is_some()
    }
}

/// Both relaxations must be realizable. The unit-vertical one is solved on
/// the transposed rectangle and mapped back.
pub fn check_condition1(a: usize, b: usize, h: usize, v: usize, m: &[usize], n: &[usize]) -> Result<Condition1> {
    check_lengths(a, b, h, v, m, n)?;
    let relaxed = |region: &Region, mm: &[usize], nn: &[usize], len: usize| -> Result<Option<Tiling>> {
        match tile_histogram_h1(region, mm, nn, len) {
            Err(Error::Promise { .. }) => Ok(None),
            other => other,
        }
    };
    let scale = |xs: &[usize], k: usize| -> Result<Vec<usize>> {
        xs.iter()
            .map(|&x| x.checked_mul(k).ok_or(Error::Overflow("scaled projection")))
            .collect()
    };

    let hn = scale(n, h)?;
    let unit_horizontal = relaxed(&Region::full(Geometry::rectangle(a, b)), m, &hn, v)?;

    let vm = scale(m, v)?;
    let transposed = relaxed(&Region::full(Geometry::rectangle(b, a)), n, &vm, h)?;
    let unit_vertical = transposed.map(|t| {
        let bars = t
            .bars
            .iter()
            .map(|bar| {
                let (i, j) = (bar.anchor.j, bar.anchor.i);
                match bar.orientation {
                    Orientation::Vertical => Bar::horizontal(i, j),
                    Orientation::Horizontal => Bar::vertical(i, j),
                }
            })
            .collect();
        Tiling::new(
            crate::grid::BarSpec { h, v: 1 },
            Region::full(Geometry::rectangle(a, b)),
            bars,
        )
    });
    Ok(Condition1 {
        unit_horizontal,
        unit_vertical,
    })
}

/// Every separated rectangle must be tileable ignoring the projections.
pub fn check_condition2(report: &CutReport, h: usize, v: usize) -> bool {
    report.is_feasible()
        && report
            .blocks
            .iter()
            .all(|blk| unconstrained_tileable(blk.width(), blk.height(), h, v))
}

/// Largest profile space the column-sweep search explores before switching
/// to the divisibility criterion.
const PROFILE_LIMIT: u128 = 1 << 20;

/// Whether `R_{width x height}` splits into `h x 1` and `1 x v` bars.
pub fn unconstrained_tileable(width: usize, height: usize, h: usize, v: usize) -> bool {
    if width == 0 || height == 0 || h == 1 || v == 1 {
        return true;
    }
    // Sweep across the longer side so profiles stay short.
    let (w, ht, hh, vv) = if height <= width {
        (width, height, h, v)
    } else {
        (height, width, v, h)
    };
    let states = (hh as u128).checked_pow(ht as u32).unwrap_or(u128::MAX);
    if states > PROFILE_LIMIT {
        return divisibility_criterion(width, height, h, v);
    }
    profile_sweep(w, ht, hh, vv)
}

/// `h | width` or `v | height`.
pub fn divisibility_criterion(width: usize, height: usize, h: usize, v: usize) -> bool {
    width % h == 0 || height % v == 0
}

/// Column sweep over overhang profiles: `profile[r]` is how many more
/// columns the horizontal bar in row `r` still covers.
fn profile_sweep(width: usize, height: usize, h: usize, v: usize) -> bool {
    let mut frontier: HashSet<Vec<u16>> = HashSet::from([vec![0u16; height]]);
    for col in 0..width {
        let mut next = HashSet::new();
        let mut scratch = vec![0u16; height];
        for profile in &frontier {
            fill_column(profile, 0, col + h <= width, h, v, &mut scratch, &mut next);
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    frontier.contains(&vec![0u16; height])
}

fn fill_column(
    profile: &[u16],
    row: usize,
    can_start_horizontal: bool,
    h: usize,
    v: usize,
    scratch: &mut Vec<u16>,
    out: &mut HashSet<Vec<u16>>,
) {
    let height = profile.len();
    if row == height {
        out.insert(scratch.clone());
        return;
    }
    if profile[row] > 0 {
        scratch[row] = profile[row] - 1;
        fill_column(profile, row + 1, can_start_horizontal, h, v, scratch, out);
        return;
    }
    if can_start_horizontal {
        scratch[row] = (h - 1) as u16;
        fill_column(profile, row + 1, can_start_horizontal, h, v, scratch, out);
    }
    if row + v <= height && profile[row..row + v].iter().all(|&x| x == 0) {
        scratch[row..row + v].fill(0);
        fill_column(profile, row + v, can_start_horizontal, h, v, scratch, out);
    }
}

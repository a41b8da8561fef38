//! Row-by-row reconstruction with unit horizontal bars on histograms.
//!
//! Rows are processed top to bottom. In row `j` the cells not claimed by the
//! `n_j` unit bars must be the tops of vertical bars, and those bars go to
//! the available columns with the largest remaining `m_i`. The choice is
//! complete: if any tiling exists, one exists that agrees with the greedy
//! choice in the current row.

use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::grid::{Bar, BarSpec, Geometry, ProjectionPair, Region, Tiling};

/// Tiles histogram `region` with unit horizontal bars and vertical bars of
/// length `v`. Returns `Ok(None)` when no tiling exists.
///
/// The area promise `v * sum(m) + sum(n) = |region|` is checked up front and
/// reported as [`Error::Promise`].
pub fn tile_histogram_h1(region: &Region, m: &[usize], n: &[usize], v: usize) -> Result<Option<Tiling>> {
    let Geometry { shape, a, b } = region.geometry();
    if shape != crate::grid::Shape::Rectangle {
        return Err(Error::input("shape", "histogram reconstruction needs a rectangle"));
    }
    let spec = BarSpec::new(1, v)?;
    if m.len() != a {
        return Err(Error::input("m", format!("has length {} but a = {a}", m.len())));
    }
    if n.len() != b {
        return Err(Error::input("n", format!("has length {} but b = {b}", n.len())));
    }
    if !region.is_histogram() {
        return Err(Error::input("cells", "region is not a histogram"));
    }
    let cells = region.len();
    let covered = ProjectionPair::new(m.to_vec(), n.to_vec()).covered_area(spec)?;
    if covered != cells {
        return Err(Error::Promise { covered, cells });
    }

    // `waiting[j]` holds the columns whose topmost remaining cell is in row j.
    let mut waiting: Vec<Vec<usize>> = vec![Vec::new(); b];
    for (i, height) in region.column_heights().into_iter().enumerate() {
        if height > 0 {
            waiting[b - height].push(i);
        }
    }
    let mut remaining = m.to_vec();
    let mut bars = Vec::with_capacity(m.iter().sum::<usize>() + n.iter().sum::<usize>());

    for j in 0..b {
        let mut row = std::mem::take(&mut waiting[j]);
        let available = row.len();
        if available < n[j] {
            return Ok(None);
        }
        let verticals = available - n[j];
        if verticals > 0 {
            if j + v > b {
                return Ok(None);
            }
            // The `verticals` columns with largest remaining m, ties to the
            // smallest index.
            if verticals < available {
                row.select_nth_unstable_by_key(verticals - 1, |&i| (Reverse(remaining[i]), i));
            }
            for &i in &row[..verticals] {
                if remaining[i] == 0 {
                    return Ok(None);
                }
                remaining[i] -= 1;
                bars.push(Bar::vertical(i, j));
                if j + v < b {
                    waiting[j + v].push(i);
                }
            }
        }
        for &i in &row[verticals..] {
            bars.push(Bar::horizontal(i, j));
            if j + 1 < b {
                waiting[j + 1].push(i);
            }
        }
    }
    if remaining.iter().any(|&r| r != 0) {
        return Ok(None);
    }
    Ok(Some(Tiling::new(spec, region.clone(), bars)))
}

/// Column constraints constant on each block of `h` consecutive columns.
pub fn is_block_uniform(m: &[usize], h: usize) -> bool {
    h > 0 && m.len() % h == 0 && m.chunks(h).all(|chunk| chunk.iter().all(|&x| x == chunk[0]))
}

/// Full rectangle `R_{a x b}` with block-uniform column constraints, solved by
/// shrinking each block of `h` columns to a single column.
pub fn tile_block_uniform(
    a: usize,
    b: usize,
    h: usize,
    v: usize,
    m: &[usize],
    n: &[usize],
) -> Result<Option<Tiling>> {
    let geometry = Geometry::new(crate::grid::Shape::Rectangle, a, b)?;
    let spec = BarSpec::new(h, v)?;
    if m.len() != a {
        return Err(Error::input("m", format!("has length {} but a = {a}", m.len())));
    }
    if n.len() != b {
        return Err(Error::input("n", format!("has length {} but b = {b}", n.len())));
    }
    if a % h != 0 {
        return Err(Error::input("h", format!("h = {h} does not divide a = {a}")));
    }
    if !is_block_uniform(m, h) {
        return Err(Error::input("m", format!("not constant on blocks of {h} columns")));
    }
    let scaled_m: Vec<usize> = m.iter().step_by(h).copied().collect();
    let scaled_region = Region::full(Geometry::rectangle(a / h, b));
    let scaled = match tile_histogram_h1(&scaled_region, &scaled_m, n, v) {
        Ok(t) => t,
        Err(Error::Promise { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(scaled.map(|t| {
        let mut bars = Vec::with_capacity(t.bars.len() * h);
        for bar in t.bars {
            let (i, j) = (bar.anchor.i, bar.anchor.j);
            match bar.orientation {
                crate::grid::Orientation::Horizontal => bars.push(Bar::horizontal(i * h, j)),
                crate::grid::Orientation::Vertical => {
                    bars.extend((0..h).map(|k| Bar::vertical(i * h + k, j)))
                }
            }
        }
        Tiling::new(spec, Region::full(geometry), bars)
    }))
}

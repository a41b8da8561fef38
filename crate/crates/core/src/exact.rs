//! Exhaustive search for tilings, used as ground truth by every other module.
//!
//! The search always covers the first uncovered cell in row-major order and
//! branches over the bars that can cover it: horizontal placements first,
//! then vertical. With projections it tracks the remaining bar budget of
//! every line and, on full rectangles, the forced number of bars starting in
//! each column and row.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Bar, BarSpec, Cell, Geometry, Instance, Orientation, ProjectionPair, Region, Tiling};
use crate::separation::{column_starts, row_starts};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSolver {
    /// Largest region (in cells) the solver accepts.
    pub cell_budget: usize,
    /// Largest number of search nodes visited before giving up.
    pub node_budget: u64,
    /// Prune with the forced per-column/per-row start counts on full
    /// rectangles.
    pub cut_pruning: bool,
}

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver {
            cell_budget: 64,
            node_budget: 50_000_000,
            cut_pruning: true,
        }
    }
}

pub fn solve_exact(instance: &Instance) -> Result<Option<Tiling>> {
    ExactSolver::default().solve(instance)
}

pub fn enumerate_exact(instance: &Instance, limit: usize) -> Result<Vec<Tiling>> {
    ExactSolver::default().enumerate(instance, limit)
}

impl ExactSolver {
    pub fn with_cell_budget(cell_budget: usize) -> Self {
        ExactSolver {
            cell_budget,
            ..Self::default()
        }
    }

    pub fn solve(&self, instance: &Instance) -> Result<Option<Tiling>> {
        Ok(self.enumerate(instance, 1)?.pop())
    }

    pub fn enumerate(&self, instance: &Instance, limit: usize) -> Result<Vec<Tiling>> {
        self.run(&instance.region, instance.spec, Some(&instance.projections), limit, None)
    }

    /// All tilings of `region`, ignoring projections.
    pub fn enumerate_free(&self, region: &Region, spec: BarSpec, limit: usize) -> Result<Vec<Tiling>> {
        self.run(region, spec, None, limit, None)
    }

    fn run(
        &self,
        region: &Region,
        spec: BarSpec,
        projections: Option<&ProjectionPair>,
        limit: usize,
        rng: Option<ChaCha8Rng>,
    ) -> Result<Vec<Tiling>> {
        let cells = region.len();
        if cells > self.cell_budget {
            return Err(Error::Budget(format!(
                "region has {cells} cells, exact solver budget is {}",
                self.cell_budget
            )));
        }
        let Some(mut search) = Search::new(region, spec, projections, self.cut_pruning)? else {
            return Ok(Vec::new());
        };
        search.limit = limit;
        search.node_budget = self.node_budget;
        search.rng = rng;
        if limit > 0 {
            search.dfs(0);
        }
        if search.exceeded {
            return Err(Error::Budget(format!(
                "exact search visited more than {} nodes",
                self.node_budget
            )));
        }
        Ok(search
            .found
            .into_iter()
            .map(|bars| Tiling::new(spec, region.clone(), bars))
            .collect())
    }
}

struct Budgets {
    col: Vec<usize>,
    row: Vec<usize>,
    col_free: Vec<usize>,
    row_free: Vec<usize>,
    col_starts: Option<Vec<i64>>,
    row_starts: Option<Vec<i64>>,
}

struct Search {
    g: Geometry,
    spec: BarSpec,
    covered: Vec<bool>,
    budgets: Option<Budgets>,
    bars: Vec<Bar>,
    found: Vec<Vec<Bar>>,
    limit: usize,
    nodes: u64,
    node_budget: u64,
    exceeded: bool,
    rng: Option<ChaCha8Rng>,
}

impl Search {
    /// `None` when the instance is refuted before any search.
    fn new(
        region: &Region,
        spec: BarSpec,
        projections: Option<&ProjectionPair>,
        cut_pruning: bool,
    ) -> Result<Option<Self>> {
        let g = region.geometry();
        let covered: Vec<bool> = (0..g.cell_count()).map(|idx| !region.contains_index(idx)).collect();
        let budgets = match projections {
            None => None,
            Some(p) => {
                if p.m.len() != g.a {
                    return Err(Error::input("m", format!("has length {} but a = {}", p.m.len(), g.a)));
                }
                if p.n.len() != g.b {
                    return Err(Error::input("n", format!("has length {} but b = {}", p.n.len(), g.b)));
                }
                if p.covered_area(spec)? != region.len() {
                    return Ok(None);
                }
                let col_free: Vec<usize> = region.column_heights();
                let row_free: Vec<usize> = region.row_counts();
                let col_ok = p.m.iter().zip(&col_free).all(|(&m, &f)| m.checked_mul(spec.v).is_some_and(|x| x <= f));
                let row_ok = p.n.iter().zip(&row_free).all(|(&n, &f)| n.checked_mul(spec.h).is_some_and(|x| x <= f));
                if !col_ok || !row_ok {
                    return Ok(None);
                }
                let (mut col_starts_v, mut row_starts_v) = (None, None);
                if cut_pruning && !g.is_torus() && region.is_full() {
                    match (
                        column_starts(g.a, g.b, spec.h, spec.v, &p.m),
                        row_starts(g.a, g.b, spec.h, spec.v, &p.n),
                    ) {
                        (Ok(c), Ok(d)) => {
                            col_starts_v = Some(c);
                            row_starts_v = Some(d);
                        }
                        _ => return Ok(None),
                    }
                }
                Some(Budgets {
                    col: p.m.clone(),
                    row: p.n.clone(),
                    col_free,
                    row_free,
                    col_starts: col_starts_v,
                    row_starts: row_starts_v,
                })
            }
        };
        Ok(Some(Search {
            g,
            spec,
            covered,
            budgets,
            bars: Vec::new(),
            found: Vec::new(),
            limit: 1,
            nodes: 0,
            node_budget: u64::MAX,
            exceeded: false,
            rng: None,
        }))
    }

    fn done(&self) -> bool {
        self.exceeded || self.found.len() >= self.limit
    }

    /// Bars that could cover `cell`, in branch order.
    fn candidates(&self, cell: Cell) -> Vec<Bar> {
        let Geometry { a, b, .. } = self.g;
        let BarSpec { h, v } = self.spec;
        let mut out = Vec::new();
        if self.g.is_torus() {
            if h == a {
                out.push(Bar::horizontal(0, cell.j));
            } else if h < a {
                out.extend((0..h).map(|k| Bar::horizontal((cell.i + a - k) % a, cell.j)));
            }
            if v == b {
                out.push(Bar::vertical(cell.i, 0));
            } else if v < b {
                out.extend((0..v).map(|k| Bar::vertical(cell.i, (cell.j + b - k) % b)));
            }
        } else {
            // Everything before `cell` in row-major order is covered, so a
            // bar covering it must start there.
            if cell.i + h <= a {
                out.push(Bar::horizontal(cell.i, cell.j));
            }
            if cell.j + v <= b {
                out.push(Bar::vertical(cell.i, cell.j));
            }
        }
        out
    }

    fn indices(&self, bar: Bar) -> impl Iterator<Item = usize> + '_ {
        let Geometry { a, b, .. } = self.g;
        let len = bar.length(self.spec);
        (0..len).map(move |k| match bar.orientation {
            Orientation::Horizontal => bar.anchor.j * a + (bar.anchor.i + k) % a,
            Orientation::Vertical => ((bar.anchor.j + k) % b) * a + bar.anchor.i,
        })
    }

    fn fits(&self, bar: Bar) -> bool {
        if !self.indices(bar).all(|idx| !self.covered[idx]) {
            return false;
        }
        let Some(bud) = &self.budgets else {
            return true;
        };
        match bar.orientation {
            Orientation::Horizontal => {
                bud.row[bar.anchor.j] > 0 && bud.col_starts.as_ref().is_none_or(|c| c[bar.anchor.i] > 0)
            }
            Orientation::Vertical => {
                bud.col[bar.anchor.i] > 0 && bud.row_starts.as_ref().is_none_or(|d| d[bar.anchor.j] > 0)
            }
        }
    }

    /// Places or removes `bar`; returns whether line budgets still fit the
    /// free cells after placement.
    fn toggle(&mut self, bar: Bar, place: bool) -> bool {
        let idxs: Vec<usize> = self.indices(bar).collect();
        for &idx in &idxs {
            self.covered[idx] = place;
        }
        let Some(bud) = self.budgets.as_mut() else {
            return true;
        };
        let BarSpec { h, v } = self.spec;
        let a = self.g.a;
        let apply = |x: &mut usize| {
            if place {
                *x -= 1
            } else {
                *x += 1
            }
        };
        let apply_i = |x: &mut i64| {
            if place {
                *x -= 1
            } else {
                *x += 1
            }
        };
        let mut ok = true;
        match bar.orientation {
            Orientation::Horizontal => {
                let j = bar.anchor.j;
                apply(&mut bud.row[j]);
                if let Some(c) = bud.col_starts.as_mut() {
                    apply_i(&mut c[bar.anchor.i]);
                }
                for &idx in &idxs {
                    let i = idx % a;
                    apply(&mut bud.col_free[i]);
                    ok &= bud.col[i] * v <= bud.col_free[i];
                }
                for _ in 0..h {
                    apply(&mut bud.row_free[j]);
                }
            }
            Orientation::Vertical => {
                let i = bar.anchor.i;
                apply(&mut bud.col[i]);
                if let Some(d) = bud.row_starts.as_mut() {
                    apply_i(&mut d[bar.anchor.j]);
                }
                for &idx in &idxs {
                    let j = idx / a;
                    apply(&mut bud.row_free[j]);
                    ok &= bud.row[j] * h <= bud.row_free[j];
                }
                for _ in 0..v {
                    apply(&mut bud.col_free[i]);
                }
            }
        }
        ok
    }

    /// Rows strictly above `row` are fully covered: their horizontal budget
    /// and vertical starts must be used up.
    fn rows_closed(&self, from: usize, to: usize) -> bool {
        let Some(bud) = &self.budgets else {
            return true;
        };
        (from..to).all(|r| bud.row[r] == 0 && bud.row_starts.as_ref().is_none_or(|d| d[r] == 0))
    }

    fn dfs(&mut self, start: usize) {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            self.exceeded = true;
            return;
        }
        let total = self.covered.len();
        let mut pos = start;
        while pos < total && self.covered[pos] {
            pos += 1;
        }
        let (from_row, to_row) = (start / self.g.a, pos / self.g.a);
        if !self.rows_closed(from_row, to_row.min(self.g.b)) {
            return;
        }
        if pos == total {
            self.found.push(self.bars.clone());
            return;
        }
        let mut candidates = self.candidates(self.g.cell_at(pos));
        if let Some(rng) = self.rng.as_mut() {
            candidates.shuffle(rng);
        }
        for bar in candidates {
            if !self.fits(bar) {
                continue;
            }
            let ok = self.toggle(bar, true);
            if ok {
                self.bars.push(bar.canonical(self.spec, self.g));
                self.dfs(pos + 1);
                self.bars.pop();
            }
            self.toggle(bar, false);
            if self.done() {
                return;
            }
        }
    }
}

/// Every cell has exactly two axis neighbours in the region and the region
/// is connected.
pub fn is_cycle(region: &Region) -> bool {
    let cells: Vec<Cell> = region.cells().collect();
    let Some(&first) = cells.first() else {
        return false;
    };
    if cells.iter().any(|&c| neighbours(region, c).len() != 2) {
        return false;
    }
    let g = region.geometry();
    let mut seen = vec![false; g.cell_count()];
    seen[g.index(first)] = true;
    let mut queue = VecDeque::from([first]);
    let mut reached = 1;
    while let Some(c) = queue.pop_front() {
        for nb in neighbours(region, c) {
            let idx = g.index(nb);
            if !seen[idx] {
                seen[idx] = true;
                reached += 1;
                queue.push_back(nb);
            }
        }
    }
    reached == cells.len()
}

/// Distinct axis-adjacent cells of `cell` inside `region` (wrapping on a
/// torus).
pub fn neighbours(region: &Region, cell: Cell) -> Vec<Cell> {
    let g = region.geometry();
    let Cell { i, j } = cell;
    let mut out: Vec<Cell> = Vec::with_capacity(4);
    let mut push = |c: Option<Cell>| {
        if let Some(c) = c {
            if c != cell && region.contains(c) && !out.contains(&c) {
                out.push(c);
            }
        }
    };
    if g.is_torus() {
        push(Some(Cell::new((i + 1) % g.a, j)));
        push(Some(Cell::new((i + g.a - 1) % g.a, j)));
        push(Some(Cell::new(i, (j + 1) % g.b)));
        push(Some(Cell::new(i, (j + g.b - 1) % g.b)));
    } else {
        push((i + 1 < g.a).then(|| Cell::new(i + 1, j)));
        push(i.checked_sub(1).map(|x| Cell::new(x, j)));
        push((j + 1 < g.b).then(|| Cell::new(i, j + 1)));
        push(j.checked_sub(1).map(|y| Cell::new(i, y)));
    }
    out
}

/// Attempts made by [`sample_feasible_instance`] before giving up.
const SAMPLE_ATTEMPTS: u64 = 8;
const SAMPLE_NODES: u64 = 2_000_000;

/// A random tiling of `region` and the instance it witnesses.
pub fn sample_feasible_instance(region: &Region, spec: BarSpec, seed: u64) -> Result<(Instance, Tiling)> {
    let cells = region.len();
    let expressible = (0..=cells / spec.h).any(|x| (cells - x * spec.h) % spec.v == 0);
    if !expressible {
        return Err(Error::Generation(format!(
            "{cells} cells cannot be split into bars of lengths {} and {}",
            spec.h, spec.v
        )));
    }
    let solver = ExactSolver {
        cell_budget: usize::MAX,
        node_budget: SAMPLE_NODES,
        cut_pruning: false,
    };
    for attempt in 0..SAMPLE_ATTEMPTS {
        let rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(attempt));
        match solver.run(region, spec, None, 1, Some(rng)) {
            Ok(mut found) => {
                let Some(witness) = found.pop() else {
                    return Err(Error::Generation("region admits no tiling".into()));
                };
                let projections = crate::grid::projections_of(&witness)?;
                let instance = Instance::new(region.clone(), spec, projections)?;
                return Ok((instance, witness));
            }
            Err(Error::Budget(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation(format!("no tiling found in {SAMPLE_ATTEMPTS} attempts")))
}

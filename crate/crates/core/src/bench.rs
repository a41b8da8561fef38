//! Wall-clock scaling of the histogram greedy on full squares.
//!
//! glibc serves allocations above its mmap threshold (at most 32 MiB when
//! adjusted dynamically) with fresh pages, so only the largest sizes would
//! pay page faults on every repetition. [`run`] raises the threshold first
//! so every size is timed with a warm heap.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::greedy::tile_histogram_h1;
use crate::grid::{Geometry, Region};

pub const DEFAULT_SIZES: [usize; 4] = [250, 500, 1000, 2000];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub a: usize,
    /// Fastest of the repetitions.
    pub time: Duration,
    /// Nanoseconds per cell.
    pub ns_per_cell: f64,
    /// Median over rounds of this size's time divided by the previous
    /// size's time in the same round.
    pub ratio: Option<f64>,
}

/// Square `a x a` rectangle, `v = 2`, `m_i = a / 4`, `n_j = a - 2 m_i`.
pub fn square_instance(a: usize) -> (Region, Vec<usize>, Vec<usize>) {
    let m = a / 4;
    (Region::full(Geometry::rectangle(a, a)), vec![m; a], vec![a - 2 * m; a])
}

#[cfg(all(target_os = "linux", target_env = "gnu"))]
fn warm_heap() {
    const LIMIT: libc::c_int = 1 << 30;
    // SAFETY: mallopt only adjusts allocator parameters.
    unsafe {
        libc::mallopt(libc::M_MMAP_THRESHOLD, LIMIT);
        libc::mallopt(libc::M_TRIM_THRESHOLD, LIMIT);
    }
}

#[cfg(not(all(target_os = "linux", target_env = "gnu")))]
fn warm_heap() {}

/// Times the greedy at each size, keeping the fastest of `repeats` runs.
/// Each round visits every size once; ratios are taken within a round, so
/// slow phases of a shared machine hit both sides of a ratio alike.
pub fn run(sizes: &[usize], repeats: usize) -> Result<Vec<BenchRow>> {
    warm_heap();
    if sizes.contains(&0) {
        return Err(Error::input("a", "must be at least 1"));
    }
    let instances: Vec<_> = sizes.iter().map(|&a| square_instance(a)).collect();
    let rounds = repeats.max(1);
    let mut times = vec![Vec::with_capacity(rounds); sizes.len()];
    for _ in 0..rounds {
        for (k, (region, m, n)) in instances.iter().enumerate() {
            let start = Instant::now();
            let tiling = tile_histogram_h1(region, m, n, 2)?;
            let elapsed = start.elapsed();
            if tiling.is_none() {
                return Err(Error::Inconsistent(format!("square instance a = {} has no tiling", sizes[k])));
            }
            drop(tiling);
            times[k].push(elapsed);
        }
    }
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let best = times[k].iter().copied().min().unwrap_or_default();
            let ratio = k.checked_sub(1).map(|p| {
                let mut r: Vec<f64> = times[k]
                    .iter()
                    .zip(&times[p])
                    .map(|(x, y)| x.as_secs_f64() / y.as_secs_f64())
                    .collect();
                r.sort_by(f64::total_cmp);
                r[r.len() / 2]
            });
            BenchRow {
                a,
                time: best,
                ns_per_cell: best.as_nanos() as f64 / (a * a) as f64,
                ratio,
            }
        })
        .collect())
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{:>6} {:>12} {:>12} {:>8}\n", "a=b", "time_ms", "ns/cell", "ratio");
    for r in rows {
        let ratio = r.ratio.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
        out.push_str(&format!(
            "{:>6} {:>12.3} {:>12.2} {:>8}\n",
            r.a,
            r.time.as_secs_f64() * 1e3,
            r.ns_per_cell,
            ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_instances_meet_the_promise() {
        for a in [4, 7, 250] {
            let (region, m, n) = square_instance(a);
            assert_eq!(2 * m.iter().sum::<usize>() + n.iter().sum::<usize>(), region.len());
        }
    }

    #[test]
    fn small_run() {
        let rows = run(&[8, 16], 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].ratio.is_none() && rows[1].ratio.is_some());
        assert!(format_table(&rows).lines().count() == 3);
    }
}

//! Uniform projection constraints: every column holds `m` vertical bars and
//! every row `n` horizontal bars.
//!
//! On the torus the area identity `ab = amv + bnh` is both necessary and
//! sufficient; the constructive direction splits the torus into
//! `gcd(a, b)^2` equal blocks and fills a staircase of horizontal and vertical
//! strips. The rectangle additionally needs `h | a` and `v | b`, and reduces
//! to a 0-1 matrix with prescribed line counts.

use crate::error::{Error, Result};
use crate::grid::{Bar, BarSpec, Geometry, Region, Tiling};

/// Block decomposition of a torus with uniform constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GcdDecomposition {
    pub p: usize,
    pub q: usize,
    pub a_prime: usize,
    pub b_prime: usize,
}

/// Parameters of a uniform instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UniformParams {
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub v: usize,
    pub m: usize,
    pub n: usize,
}

impl UniformParams {
    pub const fn new(a: usize, b: usize, h: usize, v: usize, m: usize, n: usize) -> Self {
        UniformParams { a, b, h, v, m, n }
    }

    fn check_positive(&self) -> Result<()> {
        for (name, x) in [("a", self.a), ("b", self.b), ("h", self.h), ("v", self.v)] {
            if x == 0 {
                return Err(Error::input(name, "must be at least 1"));
            }
        }
        Ok(())
    }

    /// `(ab, amv, bnh)` with overflow detection.
    pub fn areas(&self) -> Result<(usize, usize, usize)> {
        let total = self.a.checked_mul(self.b).ok_or(Error::Overflow("a*b"))?;
        let vertical = self
            .a
            .checked_mul(self.m)
            .and_then(|x| x.checked_mul(self.v))
            .ok_or(Error::Overflow("a*m*v"))?;
        let horizontal = self
            .b
            .checked_mul(self.n)
            .and_then(|x| x.checked_mul(self.h))
            .ok_or(Error::Overflow("b*n*h"))?;
        Ok((total, vertical, horizontal))
    }

    fn area_balanced(&self) -> Result<bool> {
        self.check_positive()?;
        let (total, vertical, horizontal) = self.areas()?;
        Ok(vertical
            .checked_add(horizontal)
            .is_some_and(|covered| covered == total))
    }
}

pub fn gcd(mut x: usize, mut y: usize) -> usize {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

pub fn decompose(params: UniformParams) -> Result<GcdDecomposition> {
    if !params.area_balanced()? {
        let (total, vertical, horizontal) = params.areas()?;
        return Err(Error::Infeasible(format!(
            "ab = {total} but amv + bnh = {vertical} + {horizontal}"
        )));
    }
    let UniformParams { a, b, h, v, m, n } = params;
    let c = gcd(a, b);
    let a_prime = a / c;
    let b_prime = b / c;
    // Both products are bounded by the areas checked above.
    let nh = n * h;
    let mv = m * v;
    if nh % a_prime != 0 || mv % b_prime != 0 {
        return Err(Error::Inconsistent(format!(
            "a' = {a_prime} must divide nh = {nh} and b' = {b_prime} must divide mv = {mv}"
        )));
    }
    let p = nh / a_prime;
    let q = mv / b_prime;
    debug_assert_eq!(p + q, c);
    Ok(GcdDecomposition {
        p,
        q,
        a_prime,
        b_prime,
    })
}

pub fn feasible_uniform_torus(params: UniformParams) -> Result<bool> {
    params.area_balanced()
}

pub fn tile_uniform_torus(params: UniformParams) -> Result<Tiling> {
    let GcdDecomposition {
        p,
        q,
        a_prime,
        b_prime,
    } = decompose(params)?;
    let UniformParams { a, b, h, v, m, n } = params;
    let geometry = Geometry::torus(a, b);
    let spec = BarSpec::new(h, v)?;
    let c = p + q;
    let mut bars = Vec::with_capacity(b * n + a * m);
    for block in 0..c {
        // Horizontal strip: n*h columns wide, b' rows tall, from (a' i, b' i).
        for row in block * b_prime..(block + 1) * b_prime {
            for k in 0..n {
                let col = (a_prime * block + k * h) % a;
                bars.push(Bar::horizontal(col, row).canonical(spec, geometry));
            }
        }
        // Vertical strip: a' columns wide, m*v rows tall, from (a' i, b' (i+1)).
        for col in block * a_prime..(block + 1) * a_prime {
            for k in 0..m {
                let row = (b_prime * (block + 1) + k * v) % b;
                bars.push(Bar::vertical(col, row).canonical(spec, geometry));
            }
        }
    }
    Ok(Tiling::new(spec, Region::full(geometry), bars))
}

/// With `m, n >= 1` the area identity, `h | a` and `v | b`. When one of `m`,
/// `n` is zero the rectangle holds bars of one orientation only and the
/// area identity alone decides.
pub fn feasible_uniform_rectangle(params: UniformParams) -> Result<bool> {
    if !params.area_balanced()? {
        return Ok(false);
    }
    Ok(params.m == 0 || params.n == 0 || (params.a % params.h == 0 && params.b % params.v == 0))
}

/// A 0-1 matrix with `cols` columns and `rows` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    cols: usize,
    rows: usize,
    data: Vec<bool>,
}

impl BinaryMatrix {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.data[row * self.cols + col]
    }

    pub fn column_ones(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(col, r)).count()
    }

    pub fn row_zeros(&self, row: usize) -> usize {
        (0..self.cols).filter(|&c| !self.get(c, row)).count()
    }
}

/// A `p x q` matrix with `m` ones per column and `n` zeros per row, read off a
/// unit-bar torus tiling (vertical cell = 1, horizontal cell = 0).
pub fn reconstruct_binary_matrix(p: usize, q: usize, m: usize, n: usize) -> Result<BinaryMatrix> {
    let tiling = tile_uniform_torus(UniformParams::new(p, q, 1, 1, m, n))?;
    let mut data = vec![false; p * q];
    for bar in &tiling.bars {
        if bar.orientation == crate::grid::Orientation::Vertical {
            data[bar.anchor.j * p + bar.anchor.i] = true;
        }
    }
    Ok(BinaryMatrix {
        cols: p,
        rows: q,
        data,
    })
}

pub fn tile_uniform_rectangle(params: UniformParams) -> Result<Tiling> {
    if !feasible_uniform_rectangle(params)? {
        return Err(Error::Infeasible(format!(
            "rectangle {}x{} with h={}, v={}, m={}, n={} needs ab = amv + bnh, h | a and v | b",
            params.a, params.b, params.h, params.v, params.m, params.n
        )));
    }
    let UniformParams { a, b, h, v, m, n } = params;
    let spec = BarSpec::new(h, v)?;
    let region = Region::full(Geometry::rectangle(a, b));
    if m == 0 || n == 0 {
        // a = n h or b = m v: stack bars of one orientation.
        let bars = if m == 0 {
            (0..b).flat_map(|j| (0..n).map(move |k| Bar::horizontal(k * h, j))).collect()
        } else {
            (0..a).flat_map(|i| (0..m).map(move |k| Bar::vertical(i, k * v))).collect()
        };
        return Ok(Tiling::new(spec, region, bars));
    }
    let (p, q) = (a / h, b / v);
    let matrix = reconstruct_binary_matrix(p, q, m, n)?;
    let mut bars = Vec::with_capacity(a * m + b * n);
    for y in 0..q {
        for x in 0..p {
            if matrix.get(x, y) {
                bars.extend((0..h).map(|k| Bar::vertical(x * h + k, y * v)));
            } else {
                bars.extend((0..v).map(|k| Bar::horizontal(x * h, y * v + k)));
            }
        }
    }
    Ok(Tiling::new(spec, region, bars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{projections_of, ProjectionPair};

    fn params(a: usize, b: usize, h: usize, v: usize, m: usize, n: usize) -> UniformParams {
        UniformParams::new(a, b, h, v, m, n)
    }

    /// Brute-force search over p, q for the decomposition identities.
    fn decompose_by_search(x: UniformParams) -> Option<GcdDecomposition> {
        let c = gcd(x.a, x.b);
        let (a_prime, b_prime) = (x.a / c, x.b / c);
        (0..=c).find_map(|p| {
            let q = c - p;
            (x.n * x.h == p * a_prime && x.m * x.v == q * b_prime).then_some(GcdDecomposition {
                p,
                q,
                a_prime,
                b_prime,
            })
        })
    }

    #[test]
    fn decompose_examples() {
        let fig = params(15, 10, 2, 3, 2, 3);
        let d = decompose(fig).unwrap();
        assert_eq!(
            d,
            GcdDecomposition {
                p: 2,
                q: 3,
                a_prime: 3,
                b_prime: 2
            }
        );
        assert_eq!(
            decompose(params(2, 2, 1, 1, 1, 1)).unwrap(),
            GcdDecomposition {
                p: 1,
                q: 1,
                a_prime: 1,
                b_prime: 1
            }
        );
        let x = params(4, 4, 2, 2, 1, 1);
        let expected = GcdDecomposition {
            p: 2,
            q: 2,
            a_prime: 1,
            b_prime: 1,
        };
        assert_eq!(decompose_by_search(x), Some(expected));
        assert_eq!(decompose(x).unwrap(), expected);
    }

    #[test]
    fn decompose_rejects_unbalanced_area() {
        assert!(matches!(
            decompose(params(15, 10, 2, 3, 2, 2)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn decompose_identities_hold_over_a_sweep() {
        for a in 1..=24 {
            for b in 1..=24 {
                for h in 1..=4 {
                    for v in 1..=4 {
                        for m in 0..=6 {
                            for n in 0..=6 {
                                let x = params(a, b, h, v, m, n);
                                if !feasible_uniform_torus(x).unwrap() {
                                    continue;
                                }
                                let d = decompose(x).unwrap();
                                let c = gcd(a, b);
                                assert_eq!(d.p + d.q, c);
                                assert_eq!(a, c * d.a_prime);
                                assert_eq!(b, c * d.b_prime);
                                assert_eq!(n * h, d.p * d.a_prime);
                                assert_eq!(m * v, d.q * d.b_prime);
                                assert_eq!(decompose_by_search(x), Some(d));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn torus_feasibility_examples() {
        assert!(feasible_uniform_torus(params(15, 10, 2, 3, 2, 3)).unwrap());
        assert!(!feasible_uniform_torus(params(15, 10, 2, 3, 2, 2)).unwrap());
        for m in 1..=6 {
            for n in 1..=6 {
                assert!(!feasible_uniform_torus(params(3, 5, 2, 2, m, n)).unwrap());
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let big = usize::MAX / 2;
        assert!(matches!(
            feasible_uniform_torus(params(big, 4, 1, 1, 1, 1)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn zero_dimension_is_input_error() {
        assert!(matches!(
            feasible_uniform_torus(params(0, 4, 1, 1, 1, 1)),
            Err(Error::InvalidInput { .. })
        ));
    }

    #[test]
    fn torus_construction_over_a_sweep() {
        for a in 1..=24 {
            for b in 1..=24 {
                for h in 1..=4 {
                    for v in 1..=4 {
                        for m in 1..=6 {
                            for n in 1..=6 {
                                let x = params(a, b, h, v, m, n);
                                if !feasible_uniform_torus(x).unwrap() {
                                    continue;
                                }
                                assert!(gcd(a, b) >= 2, "corollary fails for {x:?}");
                                let t = tile_uniform_torus(x).unwrap();
                                assert_eq!(
                                    projections_of(&t).unwrap(),
                                    ProjectionPair::uniform(a, b, m, n),
                                    "{x:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_rectangle_constraints() {
        // One horizontal unit bar fills R_{1x1} whatever v is.
        let p = params(1, 1, 1, 2, 0, 1);
        assert!(feasible_uniform_rectangle(p).unwrap());
        let t = tile_uniform_rectangle(p).unwrap();
        assert!(t.validate().is_ok());
        // n = 0: columns of stacked vertical bars; h need not divide a.
        let p = params(3, 4, 2, 2, 2, 0);
        assert!(feasible_uniform_rectangle(p).unwrap());
        let t = tile_uniform_rectangle(p).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(projections_of(&t).unwrap(), ProjectionPair::uniform(3, 4, 2, 0));
        assert!(!feasible_uniform_rectangle(params(3, 4, 2, 2, 1, 0)).unwrap());
    }

    #[test]
    fn degenerate_torus_constraints() {
        // m = 0: only horizontal bars, a = n h.
        let t = tile_uniform_torus(params(6, 3, 2, 5, 0, 3)).unwrap();
        assert_eq!(projections_of(&t).unwrap(), ProjectionPair::uniform(6, 3, 0, 3));
        let t = tile_uniform_torus(params(3, 6, 5, 3, 2, 0)).unwrap();
        assert_eq!(projections_of(&t).unwrap(), ProjectionPair::uniform(3, 6, 2, 0));
    }

    #[test]
    fn unit_torus() {
        let t = tile_uniform_torus(params(2, 2, 1, 1, 1, 1)).unwrap();
        assert_eq!(t.bars.len(), 4);
        assert_eq!(projections_of(&t).unwrap(), ProjectionPair::uniform(2, 2, 1, 1));
    }

    #[test]
    fn rectangle_feasibility_examples() {
        assert!(feasible_uniform_rectangle(params(4, 4, 2, 2, 1, 1)).unwrap());
        assert!(!feasible_uniform_rectangle(params(15, 10, 2, 3, 2, 3)).unwrap());
        assert!(!feasible_uniform_rectangle(params(1, 1, 1, 1, 1, 1)).unwrap());
    }

    #[test]
    fn rectangle_constructions() {
        for x in [params(4, 4, 2, 2, 1, 1), params(2, 2, 1, 1, 1, 1), params(6, 4, 3, 2, 1, 1)] {
            let t = tile_uniform_rectangle(x).unwrap();
            assert_eq!(
                projections_of(&t).unwrap(),
                ProjectionPair::uniform(x.a, x.b, x.m, x.n)
            );
        }
        assert!(tile_uniform_rectangle(params(15, 10, 2, 3, 2, 3)).is_err());
        // Area 36 against 12 + 18.
        assert!(!feasible_uniform_rectangle(params(6, 6, 3, 2, 1, 1)).unwrap());
    }

    #[test]
    fn binary_matrix_counts() {
        for (p, q, m, n) in [(2, 2, 1, 1), (3, 3, 1, 2), (6, 4, 2, 3), (5, 5, 0, 5)] {
            let mtx = reconstruct_binary_matrix(p, q, m, n).unwrap();
            assert_eq!((mtx.cols(), mtx.rows()), (p, q));
            assert!((0..p).all(|c| mtx.column_ones(c) == m));
            assert!((0..q).all(|r| mtx.row_zeros(r) == n));
        }
        // pq = 6 but pm + qn = 4 + 3.
        assert!(reconstruct_binary_matrix(2, 3, 2, 1).is_err());
    }
}

//! File formats and rendering.
//!
//! Instances, tilings, 3-color instances and the gadget are JSON documents.
//! Tilings also carry an ASCII picture: each bar's cells share a letter,
//! uppercase for vertical bars and lowercase for horizontal ones, with
//! touching bars given different letters; `.` marks cells outside the
//! region.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::neighbours;
use crate::grid::{projections_of, Bar, BarSpec, Cell, Geometry, Instance, Orientation, ProjectionPair, Region, Shape, Tiling, ValidationReport};
use crate::hardness::{Color, Gadget, ThreeColorInstance};

/// Hint stored with an instance about the kind of region it uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionClass {
    Histogram,
    Subgrid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub shape: Shape,
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub v: usize,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    /// Cells of the region as `[i, j]`; the whole grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<RegionClass>,
}

fn region_of(geometry: Geometry, cells: &Option<Vec<[usize; 2]>>) -> Result<Region> {
    match cells {
        None => Ok(Region::full(geometry)),
        Some(list) => Region::from_cells(geometry, list.iter().map(|&[i, j]| Cell::new(i, j))),
    }
}

fn cells_of(region: &Region) -> Option<Vec<[usize; 2]>> {
    (!region.is_full()).then(|| region.cells().map(|c| [c.i, c.j]).collect())
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let g = instance.geometry();
        let class = if instance.region.is_full() {
            None
        } else if instance.region.is_histogram() {
            Some(RegionClass::Histogram)
        } else {
            Some(RegionClass::Subgrid)
        };
        InstanceFile {
            shape: g.shape,
            a: g.a,
            b: g.b,
            h: instance.spec.h,
            v: instance.spec.v,
            m: instance.projections.m.clone(),
            n: instance.projections.n.clone(),
            cells: cells_of(&instance.region),
            class,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let geometry = Geometry::new(self.shape, self.a, self.b)?;
        let region = region_of(geometry, &self.cells)?;
        if self.class == Some(RegionClass::Histogram) && !region.is_histogram() {
            return Err(Error::input("cells", "class is histogram but the cells are not"));
        }
        Instance::new(
            region,
            BarSpec::new(self.h, self.v)?,
            ProjectionPair::new(self.m.clone(), self.n.clone()),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarRecord {
    pub orientation: Orientation,
    pub i: usize,
    pub j: usize,
}

impl From<Bar> for BarRecord {
    fn from(bar: Bar) -> Self {
        BarRecord {
            orientation: bar.orientation,
            i: bar.anchor.i,
            j: bar.anchor.j,
        }
    }
}

impl From<BarRecord> for Bar {
    fn from(r: BarRecord) -> Self {
        Bar {
            orientation: r.orientation,
            anchor: Cell::new(r.i, r.j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingFile {
    pub shape: Shape,
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<[usize; 2]>>,
    pub bars: Vec<BarRecord>,
    /// Informational; `bars` is authoritative.
    #[serde(default)]
    pub ascii: Vec<String>,
}

impl TilingFile {
    pub fn from_tiling(tiling: &Tiling) -> Self {
        let g = tiling.geometry();
        TilingFile {
            shape: g.shape,
            a: g.a,
            b: g.b,
            h: tiling.spec.h,
            v: tiling.spec.v,
            cells: cells_of(&tiling.region),
            bars: tiling.canonical_bars().into_iter().map(BarRecord::from).collect(),
            ascii: render_ascii(tiling).lines().map(str::to_owned).collect(),
        }
    }

    pub fn to_tiling(&self) -> Result<Tiling> {
        let geometry = Geometry::new(self.shape, self.a, self.b)?;
        Ok(Tiling::new(
            BarSpec::new(self.h, self.v)?,
            region_of(geometry, &self.cells)?,
            self.bars.iter().copied().map(Bar::from).collect(),
        ))
    }
}

/// One vector per color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorVectors {
    pub colorless: Vec<usize>,
    pub red: Vec<usize>,
    pub blue: Vec<usize>,
    pub green: Vec<usize>,
}

impl ColorVectors {
    fn from_array(v: &[Vec<usize>; 4]) -> Self {
        ColorVectors {
            colorless: v[Color::Colorless.index()].clone(),
            red: v[Color::Red.index()].clone(),
            blue: v[Color::Blue.index()].clone(),
            green: v[Color::Green.index()].clone(),
        }
    }

    fn into_array(self) -> [Vec<usize>; 4] {
        [self.colorless, self.red, self.blue, self.green]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeColorFile {
    pub a: usize,
    pub b: usize,
    pub m: ColorVectors,
    pub n: ColorVectors,
}

impl ThreeColorFile {
    pub fn from_instance(inst: &ThreeColorInstance) -> Self {
        ThreeColorFile {
            a: inst.a,
            b: inst.b,
            m: ColorVectors::from_array(&inst.m),
            n: ColorVectors::from_array(&inst.n),
        }
    }

    pub fn to_instance(&self) -> Result<ThreeColorInstance> {
        ThreeColorInstance::new(self.a, self.b, self.m.clone().into_array(), self.n.clone().into_array())
    }
}

pub const GADGET_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetTilingRecord {
    pub color: Color,
    pub bars: Vec<BarRecord>,
}

/// Everything in a gadget file except the checksum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetPayload {
    pub version: u32,
    pub block_w: usize,
    pub block_h: usize,
    pub cells: Vec<[usize; 2]>,
    pub tilings: Vec<GadgetTilingRecord>,
    pub s: ColorVectors,
    pub t: ColorVectors,
}

impl GadgetPayload {
    /// Hex SHA-256 of the compact JSON serialization.
    pub fn checksum(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("payload serializes");
        Sha256::digest(&bytes).iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetFile {
    #[serde(flatten)]
    pub payload: GadgetPayload,
    pub checksum: String,
}

impl GadgetFile {
    pub fn from_gadget(g: &Gadget) -> Self {
        let payload = GadgetPayload {
            version: GADGET_FORMAT_VERSION,
            block_w: g.block_w,
            block_h: g.block_h,
            cells: g.cells.iter().map(|c| [c.i, c.j]).collect(),
            tilings: Color::ALL
                .iter()
                .map(|&color| GadgetTilingRecord {
                    color,
                    bars: g.tilings[color.index()].iter().copied().map(BarRecord::from).collect(),
                })
                .collect(),
            s: ColorVectors::from_array(&g.s),
            t: ColorVectors::from_array(&g.t),
        };
        let checksum = payload.checksum();
        GadgetFile { payload, checksum }
    }

    /// Checks version and checksum, then rebuilds the gadget. Tilings and
    /// vectors are taken as stored; see
    /// [`verify_gadget`](crate::hardness::verify_gadget) for the invariants.
    pub fn to_gadget(&self) -> Result<Gadget> {
        let p = &self.payload;
        if p.version != GADGET_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "gadget file version {} is not supported (expected {GADGET_FORMAT_VERSION})",
                p.version
            )));
        }
        let actual = p.checksum();
        if actual != self.checksum {
            return Err(Error::Parse(format!(
                "gadget checksum mismatch: file says {}, content hashes to {actual}",
                self.checksum
            )));
        }
        let mut tilings: [Vec<Bar>; 4] = Default::default();
        let mut seen = BTreeSet::new();
        for record in &p.tilings {
            if !seen.insert(record.color) {
                return Err(Error::Parse(format!("tiling for {} listed twice", record.color)));
            }
            let mut bars: Vec<Bar> = record.bars.iter().copied().map(Bar::from).collect();
            bars.sort_unstable();
            tilings[record.color.index()] = bars;
        }
        if seen.len() != 4 {
            return Err(Error::Parse("gadget file must list four tilings".into()));
        }
        let mut cells: Vec<Cell> = p.cells.iter().map(|&[i, j]| Cell::new(i, j)).collect();
        cells.sort_unstable();
        Ok(Gadget {
            block_w: p.block_w,
            block_h: p.block_h,
            cells,
            tilings,
            s: p.s.clone().into_array(),
            t: p.t.clone().into_array(),
        })
    }
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

/// Bar index per cell, `None` outside the region or uncovered.
fn cell_owners(tiling: &Tiling) -> Vec<Option<usize>> {
    let g = tiling.geometry();
    let mut owner = vec![None; g.cell_count()];
    for (k, bar) in tiling.bars.iter().enumerate() {
        if let Ok(cells) = bar.cells(tiling.spec, g) {
            for c in cells {
                owner[g.index(c)] = Some(k);
            }
        }
    }
    owner
}

/// Letter per bar: the first of A-Z not used by a touching bar, cycling
/// when all 26 are taken.
fn bar_letters(tiling: &Tiling, owner: &[Option<usize>]) -> Vec<u8> {
    let g = tiling.geometry();
    let full = Region::full(g);
    let mut letters: Vec<Option<u8>> = vec![None; tiling.bars.len()];
    for (k, bar) in tiling.bars.iter().enumerate() {
        let mut used = [false; 26];
        for c in bar.cells(tiling.spec, g).unwrap_or_default() {
            for nb in neighbours(&full, c) {
                if let Some(other) = owner[g.index(nb)] {
                    if other != k {
                        if let Some(l) = letters[other] {
                            used[l as usize] = true;
                        }
                    }
                }
            }
        }
        let pick = used.iter().position(|&u| !u).unwrap_or(k % 26);
        letters[k] = Some(pick as u8);
    }
    letters.into_iter().map(|l| l.unwrap_or(0)).collect()
}

/// One line per row. Cells outside the region are `.`, uncovered cells of
/// the region `?`.
pub fn render_ascii(tiling: &Tiling) -> String {
    let g = tiling.geometry();
    let owner = cell_owners(tiling);
    let letters = bar_letters(tiling, &owner);
    let mut out = String::with_capacity((g.a + 1) * g.b);
    for j in 0..g.b {
        for i in 0..g.a {
            let cell = Cell::new(i, j);
            let ch = match owner[g.index(cell)] {
                _ if !tiling.region.contains(cell) => '.',
                None => '?',
                Some(k) => {
                    let base = match tiling.bars[k].orientation {
                        Orientation::Vertical => b'A',
                        Orientation::Horizontal => b'a',
                    };
                    (base + letters[k]) as char
                }
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Maximal cyclic (torus) or linear (rectangle) runs of equal symbols in
/// `line`, as `(start, len)`.
fn runs(line: &[char], wrap: bool, symbol: impl Fn(char) -> bool) -> Vec<(usize, usize)> {
    let len = line.len();
    if len == 0 {
        return Vec::new();
    }
    let same = |x: usize, y: usize| line[x] == line[y] && symbol(line[x]);
    if wrap && (0..len).all(|k| same(k, 0)) {
        return vec![(0, len)];
    }
    // On a torus start scanning just after a boundary so no run is split.
    let offset = if wrap {
        (0..len).find(|&k| !same(k, (k + len - 1) % len)).unwrap_or(0)
    } else {
        0
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < len {
        let start = (offset + k) % len;
        if !symbol(line[start]) {
            k += 1;
            continue;
        }
        let mut run = 1;
        while k + run < len && line[(start + run) % len] == line[start] {
            run += 1;
        }
        out.push((start, run));
        k += run;
    }
    out
}

/// Parses the picture produced by [`render_ascii`] back into a tiling.
pub fn parse_ascii(text: &str, shape: Shape, spec: BarSpec) -> Result<Tiling> {
    let rows: Vec<Vec<char>> = text.lines().filter(|l| !l.is_empty()).map(|l| l.chars().collect()).collect();
    let b = rows.len();
    let a = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != a) {
        return Err(Error::Parse("rows of the picture differ in length".into()));
    }
    let geometry = Geometry::new(shape, a, b)?;
    let wrap = geometry.is_torus();
    let region = Region::from_cells(
        geometry,
        (0..b).flat_map(|j| (0..a).map(move |i| Cell::new(i, j))).filter(|c| rows[c.j][c.i] != '.'),
    )?;
    let mut bars = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        for (start, len) in runs(row, wrap, |c| c.is_ascii_lowercase()) {
            let full = wrap && len == a && spec.h == a;
            if len != spec.h && !full {
                return Err(Error::Parse(format!(
                    "row {j}: run of '{}' from column {start} has length {len}, bars have length {}",
                    row[start], spec.h
                )));
            }
            bars.push(Bar::horizontal(start, j));
        }
    }
    for i in 0..a {
        let column: Vec<char> = rows.iter().map(|r| r[i]).collect();
        for (start, len) in runs(&column, wrap, |c| c.is_ascii_uppercase()) {
            let full = wrap && len == b && spec.v == b;
            if len != spec.v && !full {
                return Err(Error::Parse(format!(
                    "column {i}: run of '{}' from row {start} has length {len}, bars have length {}",
                    column[start], spec.v
                )));
            }
            bars.push(Bar::vertical(i, start));
        }
    }
    for (j, row) in rows.iter().enumerate() {
        if let Some(i) = row.iter().position(|c| !(c.is_ascii_alphabetic() || *c == '.')) {
            return Err(Error::Parse(format!("unexpected symbol '{}' at ({i},{j})", row[i])));
        }
    }
    Ok(Tiling::new(spec, region, bars))
}

const CELL_PX: usize = 20;

/// Static SVG: grey cells for the region, one outlined rectangle per bar
/// segment, horizontal bars in one stroke color and vertical bars in
/// another. Bars wrapping around a torus are drawn in two pieces.
pub fn render_svg(tiling: &Tiling) -> String {
    let g = tiling.geometry();
    let (w, h) = (g.a * CELL_PX, g.b * CELL_PX);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    for c in tiling.region.cells() {
        let _ = writeln!(
            out,
            r##"  <rect x="{}" y="{}" width="{CELL_PX}" height="{CELL_PX}" fill="#e6e6e6" stroke="#ffffff"/>"##,
            c.i * CELL_PX,
            c.j * CELL_PX
        );
    }
    for bar in &tiling.bars {
        let Ok(cells) = bar.cells(tiling.spec, g) else {
            continue;
        };
        let (fill, stroke) = match bar.orientation {
            Orientation::Horizontal => ("#9ecae1", "#08519c"),
            Orientation::Vertical => ("#fdae6b", "#a63603"),
        };
        for (x, y, cw, ch) in segments(&cells, bar.orientation) {
            let _ = writeln!(
                out,
                r#"  <rect x="{}" y="{}" width="{}" height="{}" rx="3" fill="{fill}" stroke="{stroke}" stroke-width="2"/>"#,
                x * CELL_PX + 2,
                y * CELL_PX + 2,
                cw * CELL_PX - 4,
                ch * CELL_PX - 4
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Splits a bar's cells (in bar order) into straight pieces without wrap.
fn segments(cells: &[Cell], orientation: Orientation) -> Vec<(usize, usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize, usize)> = Vec::new();
    for c in cells {
        match out.last_mut() {
            Some((x, y, w, _)) if orientation == Orientation::Horizontal && *y == c.j && *x + *w == c.i => *w += 1,
            Some((x, y, _, h)) if orientation == Orientation::Vertical && *x == c.i && *y + *h == c.j => *h += 1,
            _ => out.push((c.i, c.j, 1, 1)),
        }
    }
    out
}

/// Result of checking a tiling against an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub validation: ValidationReport,
    pub same_region: bool,
    pub same_spec: bool,
    pub expected: ProjectionPair,
    pub actual: Option<ProjectionPair>,
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        self.validation.is_ok()
            && self.same_region
            && self.same_spec
            && self.actual.as_ref() == Some(&self.expected)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.same_region {
            writeln!(f, "region: differs from the instance")?;
        }
        if !self.same_spec {
            writeln!(f, "bar lengths: differ from the instance")?;
        }
        if !self.validation.is_ok() {
            write!(f, "{}", self.validation)?;
        }
        match &self.actual {
            Some(p) if *p == self.expected => writeln!(f, "projections: match")?,
            Some(p) => {
                if p.m != self.expected.m {
                    writeln!(f, "m: expected {:?}, tiling has {:?}", self.expected.m, p.m)?;
                }
                if p.n != self.expected.n {
                    writeln!(f, "n: expected {:?}, tiling has {:?}", self.expected.n, p.n)?;
                }
            }
            None => writeln!(f, "projections: not computed")?,
        }
        writeln!(f, "{}", if self.is_ok() { "VALID" } else { "INVALID" })
    }
}

pub fn check(instance: &Instance, tiling: &Tiling) -> CheckReport {
    let validation = tiling.validate();
    let actual = validation.is_ok().then(|| projections_of(tiling).ok()).flatten();
    CheckReport {
        validation,
        same_region: tiling.region == instance.region,
        same_spec: tiling.spec == instance.spec,
        expected: instance.projections.clone(),
        actual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uniform::{tile_uniform_torus, UniformParams};

    #[test]
    fn instance_round_trip() {
        let text = r#"{"shape":"rectangle","a":3,"b":2,"h":1,"v":2,"m":[1,0,0],"n":[1,0],"cells":[[0,0],[0,1],[1,1],[2,1]],"class":"histogram"}"#;
        let file: InstanceFile = from_json(text).unwrap();
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.region.len(), 4);
        assert_eq!(InstanceFile::from_instance(&inst), file);
    }

    #[test]
    fn instance_errors_name_the_field() {
        let text = r#"{"shape":"torus","a":3,"b":2,"h":1,"v":1,"m":[1,0],"n":[1,0]}"#;
        let err = from_json::<InstanceFile>(text).unwrap().to_instance().unwrap_err();
        assert!(matches!(err, Error::InvalidInput { ref field, .. } if field == "m"));
        assert!(matches!(from_json::<InstanceFile>("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn ascii_letters_distinguish_touching_bars() {
        let t = Tiling::new(
            BarSpec::dominoes(),
            Region::full(Geometry::rectangle(2, 2)),
            vec![Bar::horizontal(0, 0), Bar::horizontal(0, 1)],
        );
        assert_eq!(render_ascii(&t), "aa\nbb\n");
        let t = Tiling::new(
            BarSpec::dominoes(),
            Region::full(Geometry::rectangle(2, 2)),
            vec![Bar::vertical(0, 0), Bar::vertical(1, 0)],
        );
        assert_eq!(render_ascii(&t), "AB\nAB\n");
    }

    #[test]
    fn ascii_round_trip_on_a_torus_with_wrapping_bars() {
        let t = tile_uniform_torus(UniformParams::new(15, 10, 2, 3, 2, 3)).unwrap();
        let text = render_ascii(&t);
        let back = parse_ascii(&text, Shape::Torus, t.spec).unwrap();
        assert_eq!(back.canonical_bars(), t.canonical_bars());
    }

    #[test]
    fn ascii_outside_cells_and_bad_runs() {
        let region = Region::histogram(2, &[1, 2]).unwrap();
        let t = Tiling::new(BarSpec::new(1, 2).unwrap(), region, vec![Bar::horizontal(0, 1), Bar::vertical(1, 0)]);
        let text = render_ascii(&t);
        assert_eq!(text, ".B\naB\n");
        let back = parse_ascii(&text, Shape::Rectangle, t.spec).unwrap();
        assert_eq!(back, t);
        assert!(parse_ascii("aaa\n", Shape::Rectangle, BarSpec::dominoes()).is_err());
        assert!(parse_ascii("ab\na\n", Shape::Rectangle, BarSpec::dominoes()).is_err());
    }

    #[test]
    fn svg_has_one_piece_per_straight_segment() {
        let t = Tiling::new(
            BarSpec::new(3, 1).unwrap(),
            Region::full(Geometry::torus(3, 1)),
            vec![Bar::horizontal(2, 0)],
        );
        // Cells 2, 0, 1: two pieces.
        let svg = render_svg(&t);
        assert_eq!(svg.matches("rx=\"3\"").count(), 2);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn check_reports_projection_mismatch() {
        let region = Region::full(Geometry::rectangle(2, 2));
        let t = Tiling::new(BarSpec::dominoes(), region.clone(), vec![Bar::vertical(0, 0), Bar::vertical(1, 0)]);
        let good = Instance::new(region.clone(), BarSpec::dominoes(), ProjectionPair::new(vec![1, 1], vec![0, 0])).unwrap();
        assert!(check(&good, &t).is_ok());
        let bad = Instance::new(region, BarSpec::dominoes(), ProjectionPair::new(vec![0, 0], vec![1, 1])).unwrap();
        let report = check(&bad, &t);
        assert!(!report.is_ok());
        assert!(report.to_string().contains("INVALID"));
    }

    #[test]
    fn three_color_file_round_trip() {
        let text = r#"{"a":1,"b":1,"m":{"colorless":[0],"red":[1],"blue":[0],"green":[0]},"n":{"colorless":[0],"red":[1],"blue":[0],"green":[0]}}"#;
        let file: ThreeColorFile = from_json(text).unwrap();
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.m[Color::Red.index()], vec![1]);
        assert_eq!(ThreeColorFile::from_instance(&inst), file);
    }
}

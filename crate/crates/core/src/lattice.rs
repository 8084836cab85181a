//! Triangular-lattice addressing and the region families.
//!
//! A unit triangle is addressed by `(row, col)`. Row `r` is the horizontal
//! strip between heights `r` and `r + 1` (heights grow downward) and the
//! triangle is up-pointing iff `row + col` is even. Lattice vertices are
//! written `(y, x2)` where `x2` is twice the horizontal coordinate, so an
//! up triangle `(r, c)` has corners `(r, c)`, `(r+1, c-1)`, `(r+1, c+1)` and
//! a down triangle `(r, c)` has corners `(r, c-1)`, `(r, c+1)`, `(r+1, c)`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, ParamError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
}

/// Address of one unit triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriRef {
    pub row: i32,
    pub col: i32,
}

impl TriRef {
    pub const fn new(row: i32, col: i32) -> Self {
        TriRef { row, col }
    }

    pub fn orientation(self) -> Orientation {
        if (self.row + self.col).rem_euclid(2) == 0 {
            Orientation::Up
        } else {
            Orientation::Down
        }
    }

    pub fn is_up(self) -> bool {
        self.orientation() == Orientation::Up
    }

    /// The three edge-adjacent triangles on the infinite lattice.
    pub fn neighbors(self) -> [TriRef; 3] {
        let vertical = match self.orientation() {
            Orientation::Up => TriRef::new(self.row + 1, self.col),
            Orientation::Down => TriRef::new(self.row - 1, self.col),
        };
        [
            TriRef::new(self.row, self.col - 1),
            TriRef::new(self.row, self.col + 1),
            vertical,
        ]
    }

    /// Corners as `(y, x2)` lattice points.
    pub fn vertices(self) -> [(i32, i32); 3] {
        let (r, c) = (self.row, self.col);
        match self.orientation() {
            Orientation::Up => [(r, c), (r + 1, c - 1), (r + 1, c + 1)],
            Orientation::Down => [(r, c - 1), (r, c + 1), (r + 1, c)],
        }
    }

    /// Inverse of [`TriRef::vertices`]. Returns `None` if the points are not
    /// the corners of a unit triangle.
    pub fn from_vertices(mut pts: [(i32, i32); 3]) -> Option<TriRef> {
        pts.sort();
        let t = if pts[0].0 == pts[1].0 {
            TriRef::new(pts[0].0, (pts[0].1 + pts[1].1) / 2)
        } else {
            TriRef::new(pts[0].0, pts[0].1)
        };
        let mut expect = t.vertices();
        expect.sort();
        (expect == pts).then_some(t)
    }

    fn translated(self, dr: i32, dc: i32) -> TriRef {
        TriRef::new(self.row + dr, self.col + dc)
    }
}

impl fmt::Display for TriRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// One of the twelve point symmetries of the triangular lattice: a rotation
/// by `rotation * 60` degrees, optionally preceded by a reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub rotation: u8,
    pub reflect: bool,
}

impl Symmetry {
    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..6u8).flat_map(|rotation| {
            [false, true]
                .into_iter()
                .map(move |reflect| Symmetry { rotation, reflect })
        })
    }

    fn apply_vertex(self, (y, x2): (i32, i32)) -> (i32, i32) {
        // axial coordinates over the basis (x2 = 2, y = 0), (x2 = 1, y = 1)
        let (mut i, mut j) = ((x2 - y) / 2, y);
        if self.reflect {
            std::mem::swap(&mut i, &mut j);
        }
        for _ in 0..self.rotation {
            (i, j) = (-j, i + j);
        }
        (j, 2 * i + j)
    }

    pub fn apply(self, t: TriRef) -> TriRef {
        let v = t.vertices().map(|p| self.apply_vertex(p));
        TriRef::from_vertices(v).expect("lattice symmetry maps triangles to triangles")
    }
}

/// A finite set of unit triangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    cells: BTreeSet<TriRef>,
    label: String,
    /// Set by [`remove_forced`] when some cell was left with no partner.
    untileable: bool,
}

impl Region {
    pub fn new(label: impl Into<String>, cells: impl IntoIterator<Item = TriRef>) -> Self {
        Region {
            cells: cells.into_iter().collect(),
            label: label.into(),
            untileable: false,
        }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Region::new(label, [])
    }

    /// The canonical region with no tilings.
    pub fn untileable(label: impl Into<String>) -> Self {
        Region {
            cells: BTreeSet::new(),
            label: label.into(),
            untileable: true,
        }
    }

    pub fn is_untileable(&self) -> bool {
        self.untileable
    }

    pub fn cells(&self) -> &BTreeSet<TriRef> {
        &self.cells
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, t: TriRef) -> bool {
        self.cells.contains(&t)
    }

    pub fn up_count(&self) -> usize {
        self.cells.iter().filter(|t| t.is_up()).count()
    }

    pub fn down_count(&self) -> usize {
        self.cells.len() - self.up_count()
    }

    pub fn neighbors_in(&self, t: TriRef) -> impl Iterator<Item = TriRef> + '_ {
        t.neighbors().into_iter().filter(|n| self.cells.contains(n))
    }

    pub fn without(&self, removed: &[TriRef]) -> Region {
        let mut r = self.clone();
        for t in removed {
            r.cells.remove(t);
        }
        r
    }

    /// Translate so the top row is 0 and the leftmost column is 0 or 1,
    /// keeping every triangle's orientation.
    pub fn normalized(&self) -> Region {
        let cells = normalize_cells(self.cells.iter().copied());
        Region {
            cells,
            label: self.label.clone(),
            untileable: self.untileable,
        }
    }

    pub fn transformed(&self, sym: Symmetry) -> Region {
        Region {
            cells: self.cells.iter().map(|&t| sym.apply(t)).collect(),
            label: self.label.clone(),
            untileable: self.untileable,
        }
    }

    /// Whether two regions agree up to translation.
    pub fn congruent_by_translation(&self, other: &Region) -> bool {
        self.untileable == other.untileable && self.normalized().cells == other.normalized().cells
    }

    /// Whether two regions agree up to a lattice symmetry and translation.
    pub fn congruent(&self, other: &Region) -> bool {
        if self.untileable != other.untileable || self.len() != other.len() {
            return false;
        }
        let target = other.normalized().cells;
        Symmetry::all().any(|s| normalize_cells(self.cells.iter().map(|&t| s.apply(t))) == target)
    }

    /// Line format: `region <label>`, an optional `untileable` line, then one
    /// `row col` line per cell in row-major order.
    pub fn to_text(&self) -> String {
        let mut out = format!("region {}\n", self.label);
        if self.untileable {
            out.push_str("untileable\n");
        }
        for t in &self.cells {
            out.push_str(&format!("{} {}\n", t.row, t.col));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Region, FormatError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(FormatError::MissingHeader)?;
        let label = match header.strip_prefix("region") {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => rest.trim().to_string(),
            _ => return Err(FormatError::MissingHeader),
        };
        let mut region = Region::empty(label);
        for (line, l) in lines {
            if l == "untileable" {
                region.untileable = true;
                continue;
            }
            let parse = |s: Option<&str>| -> Result<i32, FormatError> {
                s.ok_or_else(|| FormatError::Parse {
                    line,
                    msg: "expected `row col`".into(),
                })?
                .parse()
                .map_err(|e| FormatError::Parse {
                    line,
                    msg: format!("{e}"),
                })
            };
            let mut parts = l.split_whitespace();
            let t = TriRef::new(parse(parts.next())?, parse(parts.next())?);
            if parts.next().is_some() {
                return Err(FormatError::Parse {
                    line,
                    msg: "trailing fields".into(),
                });
            }
            if !region.cells.insert(t) {
                return Err(FormatError::Parse {
                    line,
                    msg: format!("duplicate cell {t}"),
                });
            }
        }
        Ok(region)
    }
}

fn normalize_cells(cells: impl Iterator<Item = TriRef> + Clone) -> BTreeSet<TriRef> {
    let Some(min_row) = cells.clone().map(|t| t.row).min() else {
        return BTreeSet::new();
    };
    let min_col = cells.clone().map(|t| t.col).min().unwrap();
    let dr = -min_row;
    let mut dc = -min_col;
    if (dr + dc).rem_euclid(2) != 0 {
        dc += 1;
    }
    cells.map(|t| t.translated(dr, dc)).collect()
}

/// Which parity case of the quartered-hexagon family a triple falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `b - c = 2k - 1`
    Odd,
    /// `b - c = 2k`
    Even,
}

/// Parameters of a quartered hexagon `R(a, b, c; s_1, ..., s_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QHParams {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub dents: Vec<u32>,
}

/// Number of dents for sides `b`, `c`; `None` when `b < c - 1`.
pub fn dent_count(b: u32, c: u32) -> Option<u32> {
    (b + 1 >= c).then(|| (b + 1 - c) / 2)
}

impl QHParams {
    pub fn new(a: u32, b: u32, c: u32, dents: Vec<u32>) -> Result<Self, ParamError> {
        let p = QHParams { a, b, c, dents };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let k = dent_count(self.b, self.c).ok_or(ParamError::SidesOutOfRange {
            b: self.b,
            c: self.c,
        })?;
        if self.dents.len() != k as usize {
            return Err(ParamError::WrongDentCount {
                expected: k as usize,
                got: self.dents.len(),
            });
        }
        if self.dents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ParamError::DentsNotIncreasing(self.dents.clone()));
        }
        let max = self.a + k;
        if let Some(&pos) = self.dents.iter().find(|&&s| s < 1 || s > max) {
            return Err(ParamError::DentOutOfRange { pos, max });
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        dent_count(self.b, self.c).expect("validated parameters")
    }

    pub fn parity(&self) -> Parity {
        if (self.b + 1 - self.c).is_multiple_of(2) {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Number of up-pointing base positions, `a + k`. In the odd case this
    /// is `d = a + (b - c + 1) / 2`; in the even case `a + (b - c) / 2`.
    pub fn base_len(&self) -> u32 {
        self.a + self.k()
    }

    pub fn d(&self) -> u32 {
        self.base_len()
    }

    /// `s_1, ..., s_k` followed by `base_len() + i` for `i = 1..=c`.
    pub fn extended(&self) -> Vec<i64> {
        let base = self.base_len() as i64;
        self.dents
            .iter()
            .map(|&s| s as i64)
            .chain((1..=self.c as i64).map(|i| base + i))
            .collect()
    }

    pub fn label(&self) -> String {
        quartered_label(self.a, self.b, self.c, &self.dents)
    }
}

impl fmt::Display for QHParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn quartered_label(a: u32, b: u32, c: u32, dents: &[u32]) -> String {
    if dents.is_empty() {
        format!("R({a},{b},{c})")
    } else {
        let s: Vec<String> = dents.iter().map(|s| s.to_string()).collect();
        format!("R({a},{b},{c}; {})", s.join(","))
    }
}

/// Corner points of a hexagon with the given side lengths, clockwise from the
/// west end of the north side at the origin.
fn hexagon_corners(sides: [u32; 6]) -> [(i64, i64); 6] {
    // (dx2, dy) per unit length: E, SE, SW, W, NW, NE
    const DIRS: [(i64, i64); 6] = [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)];
    let mut pts = [(0i64, 0i64); 6];
    let mut cur = (0i64, 0i64);
    for i in 0..6 {
        pts[i] = cur;
        cur.0 += DIRS[i].0 * sides[i] as i64;
        cur.1 += DIRS[i].1 * sides[i] as i64;
    }
    assert_eq!(cur, (0, 0), "hexagon sides {sides:?} do not close");
    pts
}

/// All triangles whose centroid lies inside the (convex) hexagon.
fn hexagon_cells(sides: [u32; 6]) -> BTreeSet<TriRef> {
    let corners = hexagon_corners(sides);
    let height = (sides[1] + sides[2]) as i32;
    let min_x = corners.iter().map(|p| p.0).min().unwrap() as i32;
    let max_x = corners.iter().map(|p| p.0).max().unwrap() as i32;
    let mut cells = BTreeSet::new();
    for row in 0..height {
        for col in min_x..=max_x {
            let t = TriRef::new(row, col);
            // centroid scaled by 3 in both coordinates
            let cy = 3 * row as i64 + if t.is_up() { 2 } else { 1 };
            let cx = 3 * col as i64;
            let inside = (0..6).all(|i| {
                let (x0, y0) = corners[i];
                let (x1, y1) = corners[(i + 1) % 6];
                if (x0, y0) == (x1, y1) {
                    return true;
                }
                let (ex, ey) = (3 * (x1 - x0), 3 * (y1 - y0));
                let (px, py) = (cx - 3 * x0, cy - 3 * y0);
                ex * py - ey * px > 0
            });
            if inside {
                cells.insert(t);
            }
        }
    }
    cells
}

/// The hexagon with sides `a, b, c, a, b, c` clockwise from the north side.
pub fn build_hexagon(a: u32, b: u32, c: u32) -> Region {
    Region::new(format!("H({a},{b},{c})"), hexagon_cells([a, b, c, a, b, c]))
}

/// `H(a, b, c)` with the maximal staircase removed from its east corner,
/// where the north-east side `b` meets the south-east side `c`.
///
/// Viewing the region next to that corner as a `c` by `b` array of lozenges
/// (rows parallel to the `b` side), row `i` loses its last `i - 1` lozenges.
/// Those are exactly the cells a plane partition of shape
/// `(b, b-1, ..., b-c+1)` must leave empty.
pub fn build_staircase_trimmed(a: u32, b: u32, c: u32) -> Result<Region, ParamError> {
    if b < c {
        return Err(ParamError::StaircaseSides { b, c });
    }
    let mut cells = hexagon_cells([a, b, c, a, b, c]);
    // east corner
    let (ex, ey) = (2 * a as i32 + b as i32, b as i32);
    for u in 0..c as i32 {
        for v in 0..c as i32 - 1 - u {
            // right corner of the lozenge, u steps up the NE side, v steps down the SE side
            let (x, y) = (ex - u - v, ey - u + v);
            cells.remove(&TriRef::new(y - 1, x - 1));
            cells.remove(&TriRef::new(y, x - 1));
        }
    }
    Ok(Region::new(format!("P({a},{b},{c})"), cells))
}

/// Column of the vertical symmetry axis of the auxiliary hexagon.
fn axis_col(a: u32) -> i32 {
    2 * a as i32 + 1
}

/// The quartered hexagon before any dent is removed. Returns `None` when
/// `b < c - 1`.
pub fn build_quartered_undented(a: u32, b: u32, c: u32) -> Option<Region> {
    dent_count(b, c)?;
    let south = 2 * a + b + 1 - c;
    let m = axis_col(a);
    let cells = hexagon_cells([2 * a + 1, b, c, south, c, b])
        .into_iter()
        .filter(|t| t.col > m)
        .collect::<BTreeSet<_>>();
    Some(Region::new(quartered_label(a, b, c, &[]), cells))
}

/// Up-pointing triangles along the base, ordered from the axis outward.
/// Position `p` (1-based) is element `p - 1`.
pub fn base_positions(a: u32, b: u32, c: u32) -> Vec<TriRef> {
    let Some(region) = build_quartered_undented(a, b, c) else {
        return Vec::new();
    };
    let bottom = (b + c) as i32 - 1;
    region
        .cells()
        .iter()
        .filter(|t| t.row == bottom && t.is_up())
        .copied()
        .collect()
}

pub fn build_quartered(params: &QHParams) -> Result<Region, ParamError> {
    params.validate()?;
    let undented =
        build_quartered_undented(params.a, params.b, params.c).expect("validated parameters");
    let base = base_positions(params.a, params.b, params.c);
    // b = c = 0 has no rows at all, hence no base
    debug_assert!(params.b + params.c == 0 || base.len() == params.base_len() as usize);
    let removed: Vec<TriRef> = params.dents.iter().map(|&s| base[s as usize - 1]).collect();
    Ok(undented.without(&removed).with_label(params.label()))
}

/// Repeatedly place lozenges forced by a cell with a single in-region
/// neighbour. Returns the reduced region and the number of lozenges placed.
/// A cell with no neighbour at all yields [`Region::untileable`].
pub fn remove_forced(region: &Region) -> (Region, usize) {
    if region.is_untileable() {
        return (region.clone(), 0);
    }
    let mut cells = region.cells.clone();
    let mut placed = 0usize;
    let mut queue: VecDeque<TriRef> = cells.iter().copied().collect();
    let mut queued: BTreeSet<TriRef> = cells.clone();
    while let Some(t) = queue.pop_front() {
        queued.remove(&t);
        if !cells.contains(&t) {
            continue;
        }
        let mut inside = t.neighbors().into_iter().filter(|n| cells.contains(n));
        let Some(partner) = inside.next() else {
            return (Region::untileable(region.label.clone()), placed);
        };
        if inside.next().is_some() {
            continue;
        }
        cells.remove(&t);
        cells.remove(&partner);
        placed += 1;
        for n in partner.neighbors().into_iter().chain(t.neighbors()) {
            if cells.contains(&n) && queued.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let reduced = Region {
        cells,
        label: region.label.clone(),
        untileable: false,
    };
    (reduced, placed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionStats {
    pub up: usize,
    pub down: usize,
    pub components: usize,
}

pub fn region_stats(region: &Region) -> RegionStats {
    let mut seen = BTreeSet::new();
    let mut components = 0;
    for &start in region.cells() {
        if !seen.insert(start) {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for n in region.neighbors_in(t) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
    RegionStats {
        up: region.up_count(),
        down: region.down_count(),
        components,
    }
}

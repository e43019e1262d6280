use serde::{Deserialize, Serialize};

use super::grid::{Grid, Point, MAX_DIM};
use crate::error::{config, Result};

/// Axis-parallel cube aligned with the cells of a grid.
///
/// `corner` is the multi-index of the lowest cell and `side` the number of
/// cells per side. Ordering is lexicographic by corner, then by side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CubeSpec", into = "CubeSpec")]
pub struct Cube {
    corner: [usize; MAX_DIM],
    side: usize,
    dim: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeSpec {
    pub corner: Vec<usize>,
    pub side: usize,
}

impl TryFrom<CubeSpec> for Cube {
    type Error = crate::Error;

    fn try_from(spec: CubeSpec) -> Result<Self> {
        Cube::new(&spec.corner, spec.side)
    }
}

impl From<Cube> for CubeSpec {
    fn from(c: Cube) -> Self {
        CubeSpec {
            corner: c.corner().to_vec(),
            side: c.side,
        }
    }
}

impl Cube {
    pub fn new(corner: &[usize], side: usize) -> Result<Self> {
        if corner.is_empty() || corner.len() > MAX_DIM {
            return Err(config(format!("cube corner must have 1 or 2 entries, got {corner:?}")));
        }
        if side == 0 {
            return Err(config("cube side must be at least one cell"));
        }
        let mut c = [0; MAX_DIM];
        c[..corner.len()].copy_from_slice(corner);
        Ok(Self {
            corner: c,
            side,
            dim: corner.len() as u8,
        })
    }

    pub(crate) fn raw(dim: usize, corner: [usize; MAX_DIM], side: usize) -> Self {
        debug_assert!(side >= 1);
        Self {
            corner,
            side,
            dim: dim as u8,
        }
    }

    /// The cube made of every cell of `grid`.
    pub fn whole(grid: &Grid) -> Self {
        Self::raw(grid.dim(), [0; MAX_DIM], grid.cells_per_side())
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn corner(&self) -> &[usize] {
        &self.corner[..self.dim()]
    }

    pub(crate) fn corner_array(&self) -> [usize; MAX_DIM] {
        self.corner
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn fits(&self, grid: &Grid) -> bool {
        self.dim() == grid.dim()
            && self.corner().iter().all(|&c| c + self.side <= grid.cells_per_side())
    }

    pub(crate) fn check(&self, grid: &Grid) -> Result<()> {
        if self.fits(grid) {
            Ok(())
        } else {
            Err(crate::error::domain(format!(
                "cube {:?} (side {}) does not lie in a {}D grid with {} cells per side",
                self.corner(),
                self.side,
                grid.dim(),
                grid.cells_per_side()
            )))
        }
    }

    /// Side length `m * h`.
    pub fn side_length(&self, grid: &Grid) -> f64 {
        self.side as f64 * grid.cell_width()
    }

    /// Measure `(m * h)^dim`.
    pub fn measure(&self, grid: &Grid) -> f64 {
        self.side_length(grid).powi(self.dim as i32)
    }

    pub fn center(&self, grid: &Grid) -> Point {
        let h = grid.cell_width();
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim() {
            p[a] = grid.origin()[a] + (self.corner[a] as f64 + 0.5 * self.side as f64) * h;
        }
        p
    }

    pub fn contains_cell(&self, mi: [usize; MAX_DIM]) -> bool {
        (0..self.dim()).all(|a| mi[a] >= self.corner[a] && mi[a] < self.corner[a] + self.side)
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        (0..self.dim()).all(|a| {
            other.corner[a] >= self.corner[a]
                && other.corner[a] + other.side <= self.corner[a] + self.side
        })
    }

    /// Linear indices of the cells of the cube, in lexicographic order.
    pub fn cells<'g>(&self, grid: &'g Grid) -> impl Iterator<Item = usize> + 'g {
        let c = self.corner;
        let m = self.side;
        let n = grid.cells_per_side();
        let rows = if self.dim() == 1 { 1 } else { m };
        let dim = self.dim();
        (0..rows).flat_map(move |r| {
            (0..m).map(move |k| if dim == 1 { c[0] + k } else { (c[0] + r) * n + c[1] + k })
        })
    }

    /// Whether the cube belongs to the dyadic lattice.
    pub fn is_dyadic(&self) -> bool {
        self.side.is_power_of_two() && self.corner().iter().all(|c| c % self.side == 0)
    }

    /// The `2^dim` half-size subcubes in lexicographic order; none for odd sides.
    pub fn children(&self) -> Vec<Cube> {
        if self.side % 2 != 0 {
            return Vec::new();
        }
        let half = self.side / 2;
        let mut out = Vec::with_capacity(1 << self.dim());
        match self.dim() {
            1 => {
                for k in 0..2 {
                    out.push(Cube::raw(1, [self.corner[0] + k * half, 0], half));
                }
            }
            _ => {
                for k0 in 0..2 {
                    for k1 in 0..2 {
                        out.push(Cube::raw(
                            2,
                            [self.corner[0] + k0 * half, self.corner[1] + k1 * half],
                            half,
                        ));
                    }
                }
            }
        }
        out
    }

    /// Same physical cube on a grid refined by `factor`.
    pub fn refined(&self, factor: usize) -> Cube {
        let mut c = self.corner;
        for v in c.iter_mut().take(self.dim()) {
            *v *= factor;
        }
        Cube::raw(self.dim(), c, self.side * factor)
    }
}

/// Axis-parallel box in half-cell units, used for dilated and centered cubes
/// that may stick out of the grid or cut cells in half.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    lo: [i64; MAX_DIM],
    hi: [i64; MAX_DIM],
    dim: usize,
}

impl Region {
    pub fn of_cube(c: &Cube) -> Self {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for a in 0..c.dim() {
            lo[a] = 2 * c.corner[a] as i64;
            hi[a] = 2 * (c.corner[a] + c.side) as i64;
        }
        Self { lo, hi, dim: c.dim() }
    }

    /// Concentric cube with side `side_cells`.
    pub fn centered(c: &Cube, side_cells: u64) -> Self {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for a in 0..c.dim() {
            let twice_center = 2 * c.corner[a] as i64 + c.side as i64;
            lo[a] = twice_center - side_cells as i64;
            hi[a] = twice_center + side_cells as i64;
        }
        Self { lo, hi, dim: c.dim() }
    }

    /// Concentric dilation `factor * Q`.
    pub fn dilate(c: &Cube, factor: u64) -> Self {
        Self::centered(c, factor * c.side as u64)
    }

    /// Side length in cells (possibly half-integer).
    pub fn side_cells(&self) -> f64 {
        (self.hi[0] - self.lo[0]) as f64 / 2.0
    }

    /// Unclipped measure.
    pub fn measure(&self, grid: &Grid) -> f64 {
        (self.side_cells() * grid.cell_width()).powi(self.dim as i32)
    }

    pub fn covers_grid(&self, grid: &Grid) -> bool {
        let n2 = 2 * grid.cells_per_side() as i64;
        (0..self.dim).all(|a| self.lo[a] <= 0 && self.hi[a] >= n2)
    }

    pub fn inside_grid(&self, grid: &Grid) -> bool {
        let n2 = 2 * grid.cells_per_side() as i64;
        (0..self.dim).all(|a| self.lo[a] >= 0 && self.hi[a] <= n2)
    }

    fn axis_weight(&self, a: usize, j: usize) -> f64 {
        let c_lo = 2 * j as i64;
        let c_hi = c_lo + 2;
        let overlap = (self.hi[a].min(c_hi) - self.lo[a].max(c_lo)).max(0);
        overlap as f64 / 2.0
    }

    fn axis_cells(&self, a: usize, n: usize) -> std::ops::Range<usize> {
        let first = (self.lo[a].max(0) / 2) as usize;
        let last = ((self.hi[a].min(2 * n as i64) + 1) / 2).max(0) as usize;
        first..last.max(first)
    }

    /// Fraction of cell `mi` covered by the region.
    pub fn cell_weight(&self, mi: [usize; MAX_DIM]) -> f64 {
        (0..self.dim).map(|a| self.axis_weight(a, mi[a])).product()
    }

    /// Cells meeting the region, with their covered fraction, in lexicographic order.
    pub fn weighted_cells(&self, grid: &Grid) -> Vec<(usize, f64)> {
        let n = grid.cells_per_side();
        let mut out = Vec::new();
        let r0 = self.axis_cells(0, n);
        if self.dim == 1 {
            for j in r0 {
                let w = self.axis_weight(0, j);
                if w > 0.0 {
                    out.push((j, w));
                }
            }
        } else {
            let r1 = self.axis_cells(1, n);
            for j0 in r0 {
                let w0 = self.axis_weight(0, j0);
                if w0 == 0.0 {
                    continue;
                }
                for j1 in r1.clone() {
                    let w = w0 * self.axis_weight(1, j1);
                    if w > 0.0 {
                        out.push((j0 * n + j1, w));
                    }
                }
            }
        }
        out
    }

    /// Cells of `self` minus `inner`, weighted by the covered fraction of the difference.
    pub fn annulus_cells(&self, inner: &Region, grid: &Grid) -> Vec<(usize, f64)> {
        self.weighted_cells(grid)
            .into_iter()
            .filter_map(|(i, w)| {
                let rest = w - inner.cell_weight(grid.multi_index(i));
                (rest > 0.0).then_some((i, rest))
            })
            .collect()
    }
}

/// Which cubes a supremum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Every grid-aligned cube with at most `max_side` cells per side (all sizes when absent).
    All {
        #[serde(default)]
        max_side: Option<usize>,
    },
    /// Dyadic cubes: side `2^k`, corner a multiple of `2^k`.
    Dyadic,
}

impl Default for FamilyKind {
    fn default() -> Self {
        FamilyKind::All { max_side: None }
    }
}

impl FamilyKind {
    pub fn label(&self) -> String {
        match self {
            FamilyKind::All { max_side: None } => "all grid-aligned cubes".into(),
            FamilyKind::All { max_side: Some(m) } => format!("grid-aligned cubes of side <= {m}"),
            FamilyKind::Dyadic => "dyadic cubes".into(),
        }
    }
}

/// An admissible family of cubes on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFamily {
    grid: Grid,
    kind: FamilyKind,
}

/// One size class of a family inside a region: all cubes of side `side` whose
/// corners are `start + stride * k` per axis, `k < count`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SizeClass {
    pub side: usize,
    pub stride: usize,
    pub start: [usize; MAX_DIM],
    pub count: [usize; MAX_DIM],
}

impl SizeClass {
    pub fn len(&self) -> usize {
        self.count[0] * self.count[1]
    }

    pub fn cube(&self, dim: usize, k: usize) -> Cube {
        let (k0, k1) = (k / self.count[1], k % self.count[1]);
        let mut c = [0; MAX_DIM];
        c[0] = self.start[0] + self.stride * k0;
        if dim == 2 {
            c[1] = self.start[1] + self.stride * k1;
        }
        Cube::raw(dim, c, self.side)
    }
}

impl CubeFamily {
    pub fn new(grid: Grid, kind: FamilyKind) -> Self {
        Self { grid, kind }
    }

    pub fn all(grid: Grid) -> Self {
        Self::new(grid, FamilyKind::All { max_side: None })
    }

    pub fn dyadic(grid: Grid) -> Self {
        Self::new(grid, FamilyKind::Dyadic)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn max_side(&self) -> usize {
        match self.kind {
            FamilyKind::All { max_side } => max_side
                .unwrap_or(self.grid.cells_per_side())
                .min(self.grid.cells_per_side()),
            FamilyKind::Dyadic => self.grid.cells_per_side(),
        }
    }

    pub fn is_member(&self, c: &Cube) -> bool {
        c.fits(&self.grid)
            && c.side() <= self.max_side()
            && match self.kind {
                FamilyKind::All { .. } => true,
                FamilyKind::Dyadic => c.is_dyadic(),
            }
    }

    /// Size classes of the member cubes lying inside `region`, smallest first.
    pub(crate) fn size_classes(&self, region: &Cube) -> Vec<SizeClass> {
        let dim = self.grid.dim();
        let s = region.side();
        let rc = region.corner_array();
        let max = self.max_side().min(s);
        let mut out = Vec::new();
        let sides: Vec<usize> = match self.kind {
            FamilyKind::All { .. } => (1..=max).collect(),
            FamilyKind::Dyadic => (0..)
                .map(|k| 1usize << k)
                .take_while(|&m| m <= max)
                .collect(),
        };
        for m in sides {
            let stride = match self.kind {
                FamilyKind::All { .. } => 1,
                FamilyKind::Dyadic => m,
            };
            let mut start = [0; MAX_DIM];
            let mut count = [1; MAX_DIM];
            let mut empty = false;
            for a in 0..dim {
                let first = rc[a].div_ceil(stride) * stride;
                let last_corner = rc[a] + s - m;
                if first > last_corner {
                    empty = true;
                    break;
                }
                start[a] = first;
                count[a] = (last_corner - first) / stride + 1;
            }
            if !empty {
                out.push(SizeClass {
                    side: m,
                    stride,
                    start,
                    count,
                });
            }
        }
        out
    }

    /// Member cubes inside `region`, ordered lexicographically by corner then size.
    pub fn enumerate_within(&self, region: &Cube) -> Vec<Cube> {
        let dim = self.grid.dim();
        let mut out: Vec<Cube> = self
            .size_classes(region)
            .iter()
            .flat_map(|sc| (0..sc.len()).map(move |k| sc.cube(dim, k)))
            .collect();
        out.sort();
        out
    }
}

/// Cubes of `family`, optionally only those containing cell `containing`,
/// ordered lexicographically by corner then size.
pub fn enumerate_cubes(family: &CubeFamily, containing: Option<usize>) -> Vec<Cube> {
    let all = family.enumerate_within(&Cube::whole(family.grid()));
    match containing {
        None => all,
        Some(cell) => {
            let mi = family.grid().multi_index(cell);
            all.into_iter().filter(|c| c.contains_cell(mi)).collect()
        }
    }
}

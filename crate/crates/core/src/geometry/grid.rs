use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 2;

/// A point of the ambient space; unused trailing coordinates are zero.
pub type Point = [f64; MAX_DIM];

/// Uniform grid of `N^dim` cells over the cube `origin + [0, L]^dim`.
///
/// Samples live at cell centers. Cells are numbered lexicographically by
/// their multi-index, so in 2D the linear index is `i0 * N + i1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    cells_per_side: usize,
    side_length: f64,
    origin: Point,
}

/// Serialized form of a [`Grid`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub cells_per_side: usize,
    pub side_length: f64,
    pub origin: Vec<f64>,
}

impl TryFrom<GridSpec> for Grid {
    type Error = crate::Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.dim, spec.cells_per_side, spec.side_length, &spec.origin)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dim: g.dim,
            cells_per_side: g.cells_per_side,
            side_length: g.side_length,
            origin: g.origin[..g.dim].to_vec(),
        }
    }
}

impl Grid {
    pub fn new(dim: usize, cells_per_side: usize, side_length: f64, origin: &[f64]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(config(format!("dimension must be 1 or 2, got {dim}")));
        }
        if cells_per_side == 0 || !cells_per_side.is_power_of_two() {
            return Err(config(format!(
                "cells per side must be a power of two, got {cells_per_side}"
            )));
        }
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(config(format!("side length must be positive, got {side_length}")));
        }
        if origin.len() != dim || origin.iter().any(|o| !o.is_finite()) {
            return Err(config(format!(
                "origin must have {dim} finite coordinates, got {origin:?}"
            )));
        }
        let mut o = [0.0; MAX_DIM];
        o[..dim].copy_from_slice(origin);
        Ok(Self {
            dim,
            cells_per_side,
            side_length,
            origin: o,
        })
    }

    /// Grid over `[0, 1]^dim`.
    pub fn unit(dim: usize, cells_per_side: usize) -> Result<Self> {
        Self::new(dim, cells_per_side, 1.0, &vec![0.0; dim])
    }

    /// Same domain with a different resolution.
    pub fn with_cells(&self, cells_per_side: usize) -> Result<Self> {
        Self::new(self.dim, cells_per_side, self.side_length, &self.origin[..self.dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn cell_width(&self) -> f64 {
        self.side_length / self.cells_per_side as f64
    }

    /// Measure of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.dim as u32)
    }

    /// Euclidean diameter of the domain.
    pub fn diameter(&self) -> f64 {
        self.side_length * (self.dim as f64).sqrt()
    }

    pub fn multi_index(&self, linear: usize) -> [usize; MAX_DIM] {
        let n = self.cells_per_side;
        match self.dim {
            1 => [linear, 0],
            _ => [linear / n, linear % n],
        }
    }

    pub fn linear_index(&self, mi: [usize; MAX_DIM]) -> usize {
        match self.dim {
            1 => mi[0],
            _ => mi[0] * self.cells_per_side + mi[1],
        }
    }

    pub fn cell_center(&self, linear: usize) -> Point {
        let mi = self.multi_index(linear);
        let h = self.cell_width();
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = self.origin[a] + (mi[a] as f64 + 0.5) * h;
        }
        p
    }

    /// Cell whose half-open box contains `p`, if any.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let h = self.cell_width();
        let mut mi = [0usize; MAX_DIM];
        for a in 0..self.dim {
            let u = (p[a] - self.origin[a]) / h;
            if !(u >= 0.0 && u < self.cells_per_side as f64) {
                return None;
            }
            mi[a] = u.floor() as usize;
        }
        Some(self.linear_index(mi))
    }

    /// Cell nearest to `p`, clamping coordinates to the domain.
    pub fn nearest_cell(&self, p: &Point) -> usize {
        let h = self.cell_width();
        let mut mi = [0usize; MAX_DIM];
        for a in 0..self.dim {
            let u = ((p[a] - self.origin[a]) / h).floor();
            mi[a] = u.clamp(0.0, (self.cells_per_side - 1) as f64) as usize;
        }
        self.linear_index(mi)
    }

    /// Lower corner of cell `linear` in physical coordinates.
    pub fn cell_lower(&self, linear: usize) -> Point {
        let mi = self.multi_index(linear);
        let h = self.cell_width();
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = self.origin[a] + mi[a] as f64 * h;
        }
        p
    }

    pub fn center(&self) -> Point {
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = self.origin[a] + 0.5 * self.side_length;
        }
        p
    }

    /// Whether the domain is symmetric under `x -> -x`.
    pub fn is_centered(&self) -> bool {
        self.origin().iter().all(|&o| (o + 0.5 * self.side_length).abs() <= 1e-12 * self.side_length)
    }
}

/// Euclidean distance between two points of dimension `dim`.
pub fn distance(dim: usize, x: &Point, y: &Point) -> f64 {
    match dim {
        1 => (x[0] - y[0]).abs(),
        _ => (x[0] - y[0]).hypot(x[1] - y[1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 4, 1.0, &[0.0; 3]).is_err());
        assert!(Grid::new(1, 6, 1.0, &[0.0]).is_err());
        assert!(Grid::new(1, 4, 0.0, &[0.0]).is_err());
        assert!(Grid::new(2, 4, 1.0, &[0.0]).is_err());
    }

    #[test]
    fn index_round_trip_and_centers() {
        let g = Grid::new(2, 4, 2.0, &[-1.0, 0.0]).unwrap();
        for i in 0..g.cell_count() {
            assert_eq!(g.linear_index(g.multi_index(i)), i);
            assert_eq!(g.locate(&g.cell_center(i)), Some(i));
        }
        assert_eq!(g.cell_center(0), [-0.75, 0.25]);
        assert_eq!(g.multi_index(5), [1, 1]);
        assert_eq!(g.locate(&[1.0, 0.5]), None);
        assert_eq!(g.nearest_cell(&[5.0, -3.0]), g.linear_index([3, 0]));
    }

    #[test]
    fn serde_form() {
        let g = Grid::new(1, 8, 1.0, &[-0.5]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"dim":1,"cells_per_side":8,"side_length":1.0,"origin":[-0.5]}"#);
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(g.is_centered());
    }
}

//! Single-point evaluators used to re-check witnesses. They enumerate the
//! cubes containing one cell instead of sweeping size classes.

use crate::geometry::{Cube, CubeFamily, Grid, Region, SampledFunction};
use crate::maximal::{fractional_average, sharp_level, sharp_median_sorted};
use crate::operators::Kernel;
use crate::young::Gauge;

fn containing(family: &CubeFamily, region: &Cube, cell: usize) -> Vec<Cube> {
    let mi = family.grid().multi_index(cell);
    family
        .enumerate_within(region)
        .into_iter()
        .filter(|c| c.contains_cell(mi))
        .collect()
}

/// `M_{gamma,A} f` at one cell.
pub fn fractional_at(f: &SampledFunction, gamma: f64, a: &dyn Gauge, family: &CubeFamily, cell: usize) -> f64 {
    containing(family, &Cube::whole(f.grid()), cell)
        .iter()
        .map(|q| fractional_average(f, gamma, a, q))
        .fold(0.0, f64::max)
}

/// Sharp median by trying every midpoint of two values as the center.
pub fn sharp_median_brute(v: &[f64], s: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i..] {
            best = best.min(sharp_level(v, s, 0.5 * (a + b)));
        }
    }
    best
}

/// `M#_{0,s,Q0} f` at one cell.
pub fn local_sharp_at(f: &SampledFunction, s: f64, q0: &Cube, family: &CubeFamily, cell: usize) -> f64 {
    containing(family, q0, cell)
        .iter()
        .map(|q| {
            let mut v = f.cube_values(q);
            v.sort_by(f64::total_cmp);
            sharp_median_sorted(&v, s)
        })
        .fold(0.0, f64::max)
}

/// `sup_{x in Q, Q inside Q0} inf_Q g` at one cell.
pub fn sup_inf_at(g: &SampledFunction, q0: &Cube, family: &CubeFamily, cell: usize) -> f64 {
    containing(family, q0, cell)
        .iter()
        .map(|q| g.cube_values(q).into_iter().fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `int_Q values`, summed cell by cell.
pub fn cube_integral(grid: &Grid, values: &[f64], q: &Cube) -> f64 {
    let mut s = 0.0;
    for i in q.cells(grid) {
        s += values[i];
    }
    s * grid.cell_volume()
}

/// `int values` over the grid, summed cell by cell.
pub fn total_integral(grid: &Grid, values: &[f64]) -> f64 {
    values.iter().sum::<f64>() * grid.cell_volume()
}

/// Mean of `values` over a clipped region, normalized by its unclipped measure.
pub fn region_mean(grid: &Grid, values: &[f64], region: &Region) -> f64 {
    let mut s = 0.0;
    for (i, w) in region.weighted_cells(grid) {
        s += values[i] * w;
    }
    s * grid.cell_volume() / region.measure(grid)
}

/// `Tf` at one cell by a direct sum over source cells.
pub fn kernel_at(k: &dyn Kernel, f: &SampledFunction, cell: usize) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    let h = grid.cell_width();
    let vol = grid.cell_volume();
    let x = grid.cell_center(cell);
    let sing = k.singular_points(&x);
    let mut s = 0.0;
    for (j, fj) in f.values().iter().enumerate() {
        let lo = grid.cell_lower(j);
        let hit = sing.iter().any(|p| (0..dim).all(|a| p[a] >= lo[a] && p[a] <= lo[a] + h));
        if hit {
            s += k.singular_cell(&x, &lo, h) * fj;
        } else {
            s += k.value(&x, &grid.cell_center(j)) * vol * fj;
        }
    }
    s
}

/// Largest value of `term` over the cubes of `family`, scanned in order.
pub fn family_sup(family: &CubeFamily, term: impl Fn(&Cube) -> f64) -> (f64, Option<Cube>) {
    let mut best = (0.0, None);
    for q in family.enumerate_within(&Cube::whole(family.grid())) {
        let v = term(&q);
        if best.1.is_none() || v > best.0 {
            best = (v, Some(q));
        }
    }
    best
}

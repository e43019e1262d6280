//! Per-cube value tables and their reduction to per-cell maxima.

use rayon::prelude::*;

use super::cube::{Cube, CubeFamily, SizeClass};
use super::grid::Grid;
use super::function::LocalFunction;

/// Summed-area table for O(1) cube sums.
#[derive(Clone, Debug)]
pub struct PrefixSums {
    dim: usize,
    n: usize,
    table: Vec<f64>,
}

impl PrefixSums {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        let n = grid.cells_per_side();
        let dim = grid.dim();
        let table = if dim == 1 {
            let mut t = vec![0.0; n + 1];
            for i in 0..n {
                t[i + 1] = t[i] + values[i];
            }
            t
        } else {
            let w = n + 1;
            let mut t = vec![0.0; w * w];
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += values[i * n + j];
                    t[(i + 1) * w + j + 1] = t[i * w + j + 1] + row;
                }
            }
            t
        };
        Self { dim, n, table }
    }

    /// Sum of the values over the cells of `q`.
    pub fn sum(&self, q: &Cube) -> f64 {
        let c = q.corner_array();
        let m = q.side();
        if self.dim == 1 {
            self.table[c[0] + m] - self.table[c[0]]
        } else {
            let w = self.n + 1;
            let (a0, a1, b0, b1) = (c[0], c[1], c[0] + m, c[1] + m);
            self.table[b0 * w + b1] - self.table[a0 * w + b1] - self.table[b0 * w + a1]
                + self.table[a0 * w + a1]
        }
    }

    pub fn mean(&self, q: &Cube) -> f64 {
        self.sum(q) / q.cell_count() as f64
    }
}

/// Values of a function of cubes on every cube of one size class.
pub(crate) struct ClassValues {
    pub class: SizeClass,
    pub values: Vec<f64>,
}

/// Evaluates `value` on every family cube inside `region`, one entry per size class.
pub(crate) fn cube_values<F>(family: &CubeFamily, region: &Cube, value: F) -> Vec<ClassValues>
where
    F: Fn(&Cube) -> f64 + Sync,
{
    let dim = family.grid().dim();
    family
        .size_classes(region)
        .into_iter()
        .map(|class| {
            let values = (0..class.len())
                .into_par_iter()
                .map(|k| value(&class.cube(dim, k)))
                .collect();
            ClassValues { class, values }
        })
        .collect()
}

/// Sliding-window maximum of width `w` with the position of the first maximizer.
fn window_max(values: &[(f64, usize)], w: usize) -> Vec<(f64, usize)> {
    use std::collections::VecDeque;
    let mut out = Vec::with_capacity(values.len() + 1 - w.min(values.len()));
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (i, &(v, _)) in values.iter().enumerate() {
        while let Some(&b) = dq.back() {
            if values[b].0 < v {
                dq.pop_back();
            } else {
                break;
            }
        }
        dq.push_back(i);
        if let Some(&f) = dq.front() {
            if f + w <= i {
                dq.pop_front();
            }
        }
        if i + 1 >= w {
            out.push(values[*dq.front().unwrap()]);
        }
    }
    out
}

/// Maximizer over the cubes of one class containing each cell, as (value, cube index).
///
/// Entries are `None` for cells not covered by any cube of the class.
fn class_cell_max(class: &SizeClass, values: &[f64], dim: usize, n: usize) -> Vec<Option<(f64, usize)>> {
    let cnt = class.count;
    let mut out = vec![None; n.pow(dim as u32)];
    if class.stride != 1 {
        for k in 0..class.len() {
            let cube = class.cube(dim, k);
            for cell in cube_cells(&cube, n) {
                out[cell] = Some((values[k], k));
            }
        }
        return out;
    }
    let m = class.side;
    // Along an axis, corner j covers cells j..j+m; cell i is covered by corners i-m+1..=i.
    // Padding the corner row with -inf on both sides turns this into a plain window.
    let pad = |row: Vec<(f64, usize)>| -> Vec<(f64, usize)> {
        let mut p = vec![(f64::NEG_INFINITY, usize::MAX); m - 1];
        p.extend(row);
        p.extend(std::iter::repeat((f64::NEG_INFINITY, usize::MAX)).take(m - 1));
        p
    };
    if dim == 1 {
        let row: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
        let maxed = window_max(&pad(row), m);
        for (j, e) in maxed.into_iter().enumerate() {
            let cell = class.start[0] + j;
            if e.1 != usize::MAX && cell < n {
                out[cell] = Some(e);
            }
        }
        return out;
    }
    // Axis 1 first, then axis 0.
    let len1 = cnt[1] + m - 1;
    let mut stage = vec![(f64::NEG_INFINITY, usize::MAX); cnt[0] * len1];
    for k0 in 0..cnt[0] {
        let row: Vec<(f64, usize)> = (0..cnt[1])
            .map(|k1| (values[k0 * cnt[1] + k1], k0 * cnt[1] + k1))
            .collect();
        let maxed = window_max(&pad(row), m);
        stage[k0 * len1..(k0 + 1) * len1].copy_from_slice(&maxed);
    }
    for j1 in 0..len1 {
        let col: Vec<(f64, usize)> = (0..cnt[0]).map(|k0| stage[k0 * len1 + j1]).collect();
        let maxed = window_max(&pad(col), m);
        for (j0, e) in maxed.into_iter().enumerate() {
            if e.1 == usize::MAX {
                continue;
            }
            let (c0, c1) = (class.start[0] + j0, class.start[1] + j1);
            out[c0 * n + c1] = Some(e);
        }
    }
    out
}

fn cube_cells(c: &Cube, n: usize) -> Vec<usize> {
    let k = c.corner_array();
    let m = c.side();
    if c.dim() == 1 {
        (k[0]..k[0] + m).collect()
    } else {
        let mut v = Vec::with_capacity(m * m);
        for i in k[0]..k[0] + m {
            for j in k[1]..k[1] + m {
                v.push(i * n + j);
            }
        }
        v
    }
}

/// Per-cell maximum over the cubes of the table containing the cell, with an attaining cube.
///
/// Ties keep the smallest cube, then the earliest corner. Cells outside `region` are absent.
pub(crate) fn scatter_max(grid: &Grid, region: &Cube, table: &[ClassValues]) -> (LocalFunction, Vec<Option<Cube>>) {
    let dim = grid.dim();
    let n = grid.cells_per_side();
    let mut best: Vec<Option<(f64, Cube)>> = vec![None; grid.cell_count()];
    let per_class: Vec<Vec<Option<(f64, usize)>>> = table
        .par_iter()
        .map(|cv| class_cell_max(&cv.class, &cv.values, dim, n))
        .collect();
    for (cv, cells) in table.iter().zip(per_class) {
        for (cell, e) in cells.into_iter().enumerate() {
            if let Some((v, k)) = e {
                let replace = match &best[cell] {
                    None => true,
                    Some((b, _)) => v > *b,
                };
                if replace {
                    best[cell] = Some((v, cv.class.cube(dim, k)));
                }
            }
        }
    }
    let mut vals = vec![None; grid.cell_count()];
    let mut arg = vec![None; grid.cell_count()];
    let mi_in = |i: usize| region.contains_cell(grid.multi_index(i));
    for (i, b) in best.into_iter().enumerate() {
        if let (Some((v, c)), true) = (b, mi_in(i)) {
            vals[i] = Some(v);
            arg[i] = Some(c);
        }
    }
    (LocalFunction::new(grid.clone(), *region, vals), arg)
}

/// Minimum of `values` over each cube of a class.
pub(crate) fn class_min(grid: &Grid, class: &SizeClass, values: &[f64]) -> Vec<f64> {
    let dim = grid.dim();
    let n = grid.cells_per_side();
    if class.stride != 1 {
        return (0..class.len())
            .map(|k| {
                cube_cells(&class.cube(dim, k), n)
                    .into_iter()
                    .map(|c| values[c])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
    }
    let m = class.side;
    let neg = |row: Vec<f64>| -> Vec<(f64, usize)> { row.into_iter().map(|v| (-v, 0)).collect() };
    let cnt = class.count;
    let s = class.start;
    if dim == 1 {
        let row = values[s[0]..s[0] + cnt[0] + m - 1].to_vec();
        return window_max(&neg(row), m).into_iter().map(|e| -e.0).collect();
    }
    // Rows over the covered range, min along axis 1, then along axis 0.
    let rows0 = cnt[0] + m - 1;
    let mut stage = vec![0.0; rows0 * cnt[1]];
    for r in 0..rows0 {
        let i = s[0] + r;
        let row = values[i * n + s[1]..i * n + s[1] + cnt[1] + m - 1].to_vec();
        for (k1, e) in window_max(&neg(row), m).into_iter().enumerate() {
            stage[r * cnt[1] + k1] = -e.0;
        }
    }
    let mut out = vec![0.0; class.len()];
    for k1 in 0..cnt[1] {
        let col: Vec<f64> = (0..rows0).map(|r| stage[r * cnt[1] + k1]).collect();
        for (k0, e) in window_max(&neg(col), m).into_iter().enumerate() {
            out[k0 * cnt[1] + k1] = -e.0;
        }
    }
    out
}

/// `sup_{x in Q, Q in family, Q inside region} min_{y in Q} values(y)` at every cell of `region`.
pub fn sup_inf(family: &CubeFamily, region: &Cube, values: &[f64]) -> (LocalFunction, Vec<Option<Cube>>) {
    let grid = family.grid();
    let table: Vec<ClassValues> = family
        .size_classes(region)
        .into_iter()
        .map(|class| ClassValues {
            values: class_min(grid, &class, values),
            class,
        })
        .collect();
    scatter_max(grid, region, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cube::{enumerate_cubes, FamilyKind};

    fn brute_max(family: &CubeFamily, values: impl Fn(&Cube) -> f64) -> Vec<f64> {
        let g = family.grid();
        let cubes = enumerate_cubes(family, None);
        (0..g.cell_count())
            .map(|i| {
                let mi = g.multi_index(i);
                cubes
                    .iter()
                    .filter(|c| c.contains_cell(mi))
                    .map(&values)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    fn pseudo(c: &Cube) -> f64 {
        let k = c.corner();
        let s = k.iter().fold(c.side() * 7919, |a, &x| a * 31 + x * 17);
        ((s % 1009) as f64).sin()
    }

    #[test]
    fn scatter_matches_brute_force() {
        for (dim, n) in [(1, 16), (2, 8)] {
            let g = Grid::unit(dim, n).unwrap();
            for kind in [
                FamilyKind::All { max_side: None },
                FamilyKind::All { max_side: Some(3) },
                FamilyKind::Dyadic,
            ] {
                let fam = CubeFamily::new(g.clone(), kind);
                let whole = Cube::whole(&g);
                let table = cube_values(&fam, &whole, pseudo);
                let (got, arg) = scatter_max(&g, &whole, &table);
                let want = brute_max(&fam, pseudo);
                for i in 0..g.cell_count() {
                    assert_eq!(got.get(i).unwrap(), want[i]);
                    let c = arg[i].unwrap();
                    assert!(c.contains_cell(g.multi_index(i)));
                    assert_eq!(pseudo(&c), want[i]);
                }
            }
        }
    }

    #[test]
    fn sup_inf_matches_brute_force() {
        for (dim, n) in [(1, 16), (2, 8)] {
            let g = Grid::unit(dim, n).unwrap();
            let vals: Vec<f64> = (0..g.cell_count()).map(|i| ((i * 37 % 11) as f64).cos()).collect();
            for fam in [CubeFamily::all(g.clone()), CubeFamily::dyadic(g.clone())] {
                let region = if dim == 1 {
                    Cube::new(&[2], 12).unwrap()
                } else {
                    Cube::new(&[1, 2], 6).unwrap()
                };
                let (got, _) = sup_inf(&fam, &region, &vals);
                let cubes = fam.enumerate_within(&region);
                for i in 0..g.cell_count() {
                    let mi = g.multi_index(i);
                    if !region.contains_cell(mi) {
                        assert!(got.get(i).is_none());
                        continue;
                    }
                    let want = cubes
                        .iter()
                        .filter(|c| c.contains_cell(mi))
                        .map(|c| c.cells(&g).map(|j| vals[j]).fold(f64::INFINITY, f64::min))
                        .fold(f64::NEG_INFINITY, f64::max);
                    assert_eq!(got.get(i).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn prefix_sums() {
        let g = Grid::unit(2, 4).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let ps = PrefixSums::new(&g, &vals);
        let c = Cube::new(&[1, 1], 2).unwrap();
        assert_eq!(ps.sum(&c), 5.0 + 6.0 + 9.0 + 10.0);
    }
}

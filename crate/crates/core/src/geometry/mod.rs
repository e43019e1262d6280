//! Grids, grid-aligned cubes, cube families and sampled functions.

mod cube;
mod function;
mod grid;
mod table;

pub use cube::{enumerate_cubes, Cube, CubeFamily, CubeSpec, FamilyKind, Region};
pub use function::{LocalFunction, SampledFunction};
pub use grid::{distance, Grid, GridSpec, Point, MAX_DIM};
pub use table::{sup_inf, PrefixSums};

pub(crate) use table::{cube_values, scatter_max};

use crate::error::Result;

/// Midpoint-rule integral of `f` over `q`.
///
/// Power-of-two cubes are summed through their dyadic children, so the
/// integral over a dyadic cube is exactly the sum over its children.
pub fn integrate(f: &SampledFunction, q: &Cube) -> Result<f64> {
    q.check(f.grid())?;
    Ok(integrate_unchecked(f.grid(), f.values(), q))
}

pub(crate) fn integrate_unchecked(grid: &Grid, values: &[f64], q: &Cube) -> f64 {
    if q.side() == 1 {
        let i = grid.linear_index(corner2(q));
        return values[i] * grid.cell_volume();
    }
    if q.side().is_power_of_two() {
        return q
            .children()
            .iter()
            .map(|c| integrate_unchecked(grid, values, c))
            .sum();
    }
    q.cells(grid).map(|i| values[i]).sum::<f64>() * grid.cell_volume()
}

fn corner2(q: &Cube) -> [usize; MAX_DIM] {
    let mut c = [0; MAX_DIM];
    c[..q.dim()].copy_from_slice(q.corner());
    c
}

/// Measure `(m h)^dim` of `q`.
pub fn measure(grid: &Grid, q: &Cube) -> f64 {
    q.measure(grid)
}

/// Integral of `values` over a region, with cells weighted by their covered fraction.
pub(crate) fn integrate_region(grid: &Grid, values: &[f64], region: &Region) -> f64 {
    region
        .weighted_cells(grid)
        .into_iter()
        .map(|(i, w)| values[i] * w)
        .sum::<f64>()
        * grid.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn integrate_examples() {
        let g = Grid::unit(1, 4).unwrap();
        let f = SampledFunction::new(g.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(integrate(&f, &Cube::whole(&g)).unwrap(), 2.5);
        let one = SampledFunction::constant(&g, 1.0);
        assert_eq!(integrate(&one, &Cube::new(&[1], 1).unwrap()).unwrap(), 0.25);
        let zero = SampledFunction::constant(&g, 0.0);
        assert_eq!(integrate(&zero, &Cube::whole(&g)).unwrap(), 0.0);
        assert!(integrate(&f, &Cube::new(&[3], 2).unwrap()).is_err());
        let g2 = Grid::unit(2, 4).unwrap();
        let one2 = SampledFunction::constant(&g2, 1.0);
        assert_eq!(integrate(&one2, &Cube::new(&[0, 2], 2).unwrap()).unwrap(), 0.25);
    }

    fn grid_and_values() -> impl Strategy<Value = (Grid, Vec<f64>, Vec<f64>)> {
        (1usize..=2, 1u32..=4).prop_flat_map(|(dim, k)| {
            let g = Grid::unit(dim, 1 << k).unwrap();
            let len = g.cell_count();
            (
                Just(g),
                prop::collection::vec(-10.0f64..10.0, len),
                prop::collection::vec(-10.0f64..10.0, len),
            )
        })
    }

    proptest! {
        #[test]
        fn integrate_is_linear((g, u, v) in grid_and_values(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let fu = SampledFunction::new(g.clone(), u).unwrap();
            let fv = SampledFunction::new(g.clone(), v).unwrap();
            let comb = fu.combine(a, &fv, b).unwrap();
            for q in enumerate_cubes(&CubeFamily::all(g.clone()), None) {
                let lhs = integrate(&comb, &q).unwrap();
                let rhs = a * integrate(&fu, &q).unwrap() + b * integrate(&fv, &q).unwrap();
                let scale = integrate(&fu.abs(), &q).unwrap() * a.abs()
                    + integrate(&fv.abs(), &q).unwrap() * b.abs();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
            }
        }

        #[test]
        fn dyadic_additivity_is_exact((g, u, _v) in grid_and_values()) {
            let f = SampledFunction::new(g.clone(), u).unwrap();
            for q in enumerate_cubes(&CubeFamily::dyadic(g.clone()), None) {
                if q.side() > 1 {
                    let whole = integrate(&f, &q).unwrap();
                    let parts: f64 = q.children().iter().map(|c| integrate(&f, c).unwrap()).sum();
                    prop_assert_eq!(whole, parts);
                }
            }
        }

        #[test]
        fn clipped_dilations_are_bounded(dim in 1usize..=2, k in 2u32..=5, m in 1u32..=4, seed in 0usize..1000) {
            let g = Grid::unit(dim, 1 << k).unwrap();
            let cubes = enumerate_cubes(&CubeFamily::all(g.clone()), None);
            let q = cubes[seed % cubes.len()];
            let one = vec![1.0; g.cell_count()];
            let clipped = integrate_region(&g, &one, &Region::dilate(&q, 1 << m));
            let bound = ((1u64 << (m as usize * dim)) as f64) * q.measure(&g);
            prop_assert!(clipped <= bound * (1.0 + 1e-12));
            prop_assert!((Region::dilate(&q, 1 << m).measure(&g) - bound).abs() <= 1e-12 * bound);
        }
    }
}

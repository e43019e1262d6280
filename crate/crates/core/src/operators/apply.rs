use rayon::prelude::*;

use super::kernel::{Kernel, KernelSpec};
use crate::error::{config, Result};
use crate::geometry::{Grid, Point, SampledFunction, MAX_DIM};

/// `Tf(x_i) = sum_j k(x_i, y_j) f_j h^n`, with cells holding a singular point
/// integrated by the kernel's singular-cell rule.
pub fn apply_kernel(k: &dyn Kernel, f: &SampledFunction) -> Result<SampledFunction> {
    let grid = f.grid();
    if grid.dim() != k.dim() {
        return Err(config(format!("kernel is {}D but the function is {}D", k.dim(), grid.dim())));
    }
    let values = if k.translation_invariant() {
        convolve(k, grid, f.values())
    } else {
        direct(k, grid, f.values())
    };
    Ok(SampledFunction::from_raw(grid.clone(), values))
}

/// Builds the kernel described by `spec` and applies it.
pub fn apply_spec(spec: &KernelSpec, f: &SampledFunction) -> Result<SampledFunction> {
    let k = spec.build(f.grid().dim())?;
    apply_kernel(k.as_ref(), f)
}

fn convolve(k: &dyn Kernel, grid: &Grid, f: &[f64]) -> Vec<f64> {
    let n = grid.cells_per_side();
    let dim = grid.dim();
    let h = grid.cell_width();
    let vol = grid.cell_volume();
    let span = 2 * n - 1;
    let offsets = if dim == 1 { span } else { span * span };
    let zero = [0.0; MAX_DIM];
    let half = [0.5 * h, if dim == 2 { 0.5 * h } else { 0.0 }];
    let table: Vec<f64> = (0..offsets)
        .into_par_iter()
        .map(|t| {
            let d = if dim == 1 { [t, n - 1] } else { [t / span, t % span] };
            let dx = [(d[0] as f64 - (n - 1) as f64) * h, (d[1] as f64 - (n - 1) as f64) * h];
            let origin = dim == 1 && d[0] == n - 1 || dim == 2 && d == [n - 1, n - 1];
            if origin {
                k.singular_cell(&half, &zero, h)
            } else {
                let x = if dim == 1 { [dx[0], 0.0] } else { dx };
                k.value(&x, &zero) * vol
            }
        })
        .collect();
    (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let xi = grid.multi_index(i);
            let mut s = 0.0;
            if dim == 1 {
                for (j, fj) in f.iter().enumerate() {
                    s += table[xi[0] + n - 1 - j] * fj;
                }
            } else {
                for j0 in 0..n {
                    let row = (xi[0] + n - 1 - j0) * span + xi[1] + n - 1;
                    let fr = &f[j0 * n..(j0 + 1) * n];
                    for (j1, fj) in fr.iter().enumerate() {
                        s += table[row - j1] * fj;
                    }
                }
            }
            s
        })
        .collect()
}

/// Cells whose closure contains `p`.
fn cells_touching(grid: &Grid, p: &Point, out: &mut Vec<usize>) {
    let n = grid.cells_per_side();
    let h = grid.cell_width();
    let mut axes: [Vec<usize>; MAX_DIM] = [Vec::new(), Vec::new()];
    for (a, ax) in axes.iter_mut().enumerate().take(grid.dim()) {
        let u = (p[a] - grid.origin()[a]) / h;
        if !(u >= 0.0 && u <= n as f64) {
            return;
        }
        let c = (u.floor() as usize).min(n - 1);
        ax.push(c);
        // A point on a face touches the neighbouring cell too.
        let lo = grid.origin()[a] + c as f64 * h;
        if c > 0 && p[a] == lo {
            ax.push(c - 1);
        }
        if c + 1 < n && p[a] == lo + h {
            ax.push(c + 1);
        }
    }
    if grid.dim() == 1 {
        for &c in &axes[0] {
            out.push(c);
        }
    } else {
        for &c0 in &axes[0] {
            for &c1 in &axes[1] {
                out.push(grid.linear_index([c0, c1]));
            }
        }
    }
}

fn direct(k: &dyn Kernel, grid: &Grid, f: &[f64]) -> Vec<f64> {
    let h = grid.cell_width();
    let vol = grid.cell_volume();
    let centers: Vec<Point> = (0..grid.cell_count()).map(|j| grid.cell_center(j)).collect();
    (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let x = centers[i];
            let mut singular = Vec::new();
            for p in k.singular_points(&x) {
                cells_touching(grid, &p, &mut singular);
            }
            singular.sort_unstable();
            singular.dedup();
            let mut s = 0.0;
            for (j, fj) in f.iter().enumerate() {
                if singular.binary_search(&j).is_ok() {
                    s += k.singular_cell(&x, &grid.cell_lower(j), h) * fj;
                } else {
                    s += k.value(&x, &centers[j]) * vol * fj;
                }
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::kernel::{Coefficient, Homogeneous, Riesz, SphereFunction};
    use crate::young::ModulusOmega;
    use proptest::prelude::*;

    #[test]
    fn riesz_on_indicator() {
        let g = Grid::unit(1, 256).unwrap();
        let one = SampledFunction::constant(&g, 1.0);
        let k = Riesz::new(1, 0.5).unwrap();
        let t = apply_kernel(&k, &one).unwrap();
        let want = 2.0 * 2.0 * 0.5f64.sqrt();
        // Cells 127 and 128 straddle 0.5; average them.
        let mid = 0.5 * (t.value(127) + t.value(128));
        assert!((mid - want).abs() < 0.02 * want, "{mid}");
    }

    #[test]
    fn homogeneous_reduces_to_riesz() {
        let g = Grid::new(1, 64, 2.0, &[-1.0]).unwrap();
        let f = SampledFunction::from_fn(&g, |p| (3.0 * p[0]).sin() + p[0] * p[0]).unwrap();
        let r = apply_kernel(&Riesz::new(1, 0.3).unwrap(), &f).unwrap();
        let hom = Homogeneous::new(1, 0.3, &[Coefficient::Scalar(1.0)], &[0.7]).unwrap();
        let t = apply_kernel(&hom, &f).unwrap();
        let scale = r.max_abs();
        for i in 0..64 {
            assert!((r.value(i) - t.value(i)).abs() <= 1e-12 * scale, "cell {i}");
        }
    }

    #[test]
    fn odd_dini_kills_even_functions() {
        let g = Grid::unit(1, 64).unwrap();
        let f = SampledFunction::from_fn(&g, |p| (-(p[0] - 0.5).powi(2) * 20.0).exp()).unwrap();
        let spec = KernelSpec::Dini {
            sphere: SphereFunction::OneD { plus: 1.0, minus: -1.0 },
            modulus: ModulusOmega::Holder(1.0),
            gamma: 0.5,
        };
        let t = apply_spec(&spec, &f).unwrap();
        // The center is a cell face; its value is the mean of the two adjacent cells.
        assert!((t.value(31) + t.value(32)).abs() < 1e-10);
        for i in 0..32 {
            assert!((t.value(i) + t.value(63 - i)).abs() < 1e-10);
        }
    }

    #[test]
    fn riesz_2d_positive() {
        let g = Grid::unit(2, 16).unwrap();
        let f = SampledFunction::from_fn(&g, |p| if p[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let t = apply_kernel(&Riesz::new(2, 0.5).unwrap(), &f).unwrap();
        assert!(t.values().iter().all(|&v| v > 0.0));
        // Symmetry under reflection in the second axis.
        for i0 in 0..16 {
            for i1 in 0..8 {
                let a = t.value(g.linear_index([i0, i1]));
                let b = t.value(g.linear_index([i0, 15 - i1]));
                assert!((a - b).abs() < 1e-12 * a);
            }
        }
    }

    #[test]
    fn homogeneous_2d_runs() {
        let g = Grid::new(2, 8, 2.0, &[-1.0, -1.0]).unwrap();
        let m = [[-1.0, 0.0], [0.0, -1.0]];
        let hom = Homogeneous::new(2, 0.5, &[Coefficient::Matrix([[1.0, 0.0], [0.0, 1.0]]), Coefficient::Matrix(m)], &[0.5, 0.5]).unwrap();
        let one = SampledFunction::constant(&g, 1.0);
        let t = apply_kernel(&hom, &one).unwrap();
        assert!(t.values().iter().all(|v| v.is_finite() && *v > 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn linear(u in prop::collection::vec(-3.0f64..3.0, 32), v in prop::collection::vec(-3.0f64..3.0, 32), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let g = Grid::unit(1, 32).unwrap();
            let f = SampledFunction::new(g.clone(), u).unwrap();
            let h = SampledFunction::new(g.clone(), v).unwrap();
            let k = Riesz::new(1, 0.5).unwrap();
            let lhs = apply_kernel(&k, &f.combine(a, &h, b).unwrap()).unwrap();
            let rhs = apply_kernel(&k, &f).unwrap().combine(a, &apply_kernel(&k, &h).unwrap(), b).unwrap();
            let scale = lhs.max_abs().max(rhs.max_abs()).max(1e-300);
            for i in 0..32 {
                prop_assert!((lhs.value(i) - rhs.value(i)).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn riesz_positivity(u in prop::collection::vec(0.0f64..3.0, 64)) {
            let g = Grid::unit(1, 64).unwrap();
            let f = SampledFunction::new(g, u).unwrap();
            let t = apply_kernel(&Riesz::new(1, 0.25).unwrap(), &f).unwrap();
            prop_assert!(t.values().iter().all(|&v| v >= 0.0));
        }
    }
}

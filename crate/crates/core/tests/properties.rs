use hartool_core::geometry::{Cube, CubeFamily, Grid, SampledFunction};
use hartool_core::maximal::{fractional_maximal, local_sharp_maximal};
use hartool_core::operators::{apply_spec, KernelSpec};
use hartool_core::weights::{bump_condition, BumpExponents};
use hartool_core::young::YoungFunction;
use proptest::prelude::*;

const N: usize = 32;

fn sampled(grid: &Grid, v: Vec<f64>) -> SampledFunction {
    SampledFunction::new(grid.clone(), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn explicit_constant_on_every_cube(u in prop::collection::vec(0.0f64..3.0, N), gamma in 0.2f64..0.8, c in 0usize..N, m in 1usize..=N) {
        let grid = Grid::unit(1, N).unwrap();
        let f = sampled(&grid, u);
        let side = m.min(N - c);
        let q = Cube::new(&[c], side).unwrap();
        let i = apply_spec(&KernelSpec::Riesz { gamma }, &f).unwrap();
        let mass: f64 = q.cells(&grid).map(|k| f.value(k)).sum::<f64>() * grid.cell_volume();
        let lhs = q.measure(&grid).powf(gamma - 1.0) * mass;
        for x in q.cells(&grid) {
            prop_assert!(lhs <= 1.05 * i.value(x) + 1e-12, "cell {x}: {lhs} > 1.05 * {}", i.value(x));
        }
    }

    #[test]
    fn fractional_maximal_is_monotone(u in prop::collection::vec(-2.0f64..2.0, N), bump in prop::collection::vec(0.0f64..1.0, N), gamma in 0.0f64..0.9) {
        let grid = Grid::unit(1, N).unwrap();
        let fam = CubeFamily::all(grid.clone());
        let small = sampled(&grid, u.clone());
        let large = sampled(&grid, u.iter().zip(&bump).map(|(a, b)| a.signum() * (a.abs() + b)).collect());
        let a = fractional_maximal(&small, gamma, &YoungFunction::Linear(1.0), &fam).unwrap();
        let b = fractional_maximal(&large, gamma, &YoungFunction::Linear(1.0), &fam).unwrap();
        for k in 0..N {
            prop_assert!(a.function.get(k).unwrap() <= b.function.get(k).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sharp_maximal_decreases_in_s(u in prop::collection::vec(-2.0f64..2.0, N), s1 in 0.05f64..0.5, s2 in 0.05f64..0.5) {
        let grid = Grid::unit(1, N).unwrap();
        let fam = CubeFamily::all(grid.clone());
        let f = sampled(&grid, u);
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let whole = Cube::whole(&grid);
        let a = local_sharp_maximal(&f, hi, &whole, &fam).unwrap();
        let b = local_sharp_maximal(&f, lo, &whole, &fam).unwrap();
        for k in 0..N {
            prop_assert!(a.function.get(k).unwrap() <= b.function.get(k).unwrap());
        }
    }

    #[test]
    fn bump_condition_is_monotone(w in prop::collection::vec(0.1f64..4.0, 16), v in prop::collection::vec(0.1f64..4.0, 16), up in prop::collection::vec(1.0f64..2.0, 16)) {
        let grid = Grid::unit(1, 16).unwrap();
        let fam = CubeFamily::dyadic(grid.clone());
        let e = BumpExponents::new(2.0, 4.0, 1.0, 0.25).unwrap();
        let (a, b) = (YoungFunction::Power(5.0), YoungFunction::Power(3.0));
        let base = bump_condition(&sampled(&grid, w.clone()), &sampled(&grid, v.clone()), &a, &b, e, &fam).unwrap().value;
        let heavier = sampled(&grid, w.iter().zip(&up).map(|(x, k)| x * k).collect());
        let lighter = sampled(&grid, v.iter().zip(&up).map(|(x, k)| x / k).collect());
        let moved = bump_condition(&heavier, &lighter, &a, &b, e, &fam).unwrap().value;
        prop_assert!(base <= moved * (1.0 + 1e-9), "{base} > {moved}");
    }
}

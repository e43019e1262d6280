use super::median::sharp_median_sorted;
use crate::error::{config, Result};
use crate::geometry::{cube_values, integrate_region, scatter_max, sup_inf, Cube, CubeFamily, Grid, LocalFunction, Point, PrefixSums, Region, SampledFunction};
use crate::operators::LambdaSequence;
use crate::young::{norm_fast, Gauge};

/// A maximal function together with an attaining cube at every defined cell.
#[derive(Clone, Debug)]
pub struct Maximal {
    pub function: LocalFunction,
    pub argmax: Vec<Option<Cube>>,
}

fn check_grid(f: &SampledFunction, family: &CubeFamily) -> Result<()> {
    if f.grid() != family.grid() {
        return Err(config("function and cube family live on different grids"));
    }
    Ok(())
}

/// `M#_{0,s,Q0} f(x) = sup_{x in Q, Q in family, Q inside Q0} m#_f(1-s, Q)` on the cells of `Q0`.
pub fn local_sharp_maximal(f: &SampledFunction, s: f64, q0: &Cube, family: &CubeFamily) -> Result<Maximal> {
    check_grid(f, family)?;
    q0.check(f.grid())?;
    let table = cube_values(family, q0, |q| {
        let mut v = f.cube_values(q);
        v.sort_by(f64::total_cmp);
        sharp_median_sorted(&v, s)
    });
    let (function, argmax) = scatter_max(f.grid(), q0, &table);
    Ok(Maximal { function, argmax })
}

/// `|Q|^gamma ||f||_{A, Q}` with the mean-normalized Luxemburg norm.
pub fn fractional_average(f: &SampledFunction, gamma: f64, a: &dyn Gauge, q: &Cube) -> f64 {
    let w = 1.0 / q.cell_count() as f64;
    let items: Vec<(f64, f64)> = q.cells(f.grid()).map(|i| (f.value(i), w)).collect();
    q.measure(f.grid()).powf(gamma) * norm_fast(a, &items, 1.0)
}

/// `M_{gamma,A} f(x) = sup_{x in Q} |Q|^gamma ||f||_{A,Q}` over the family.
pub fn fractional_maximal(f: &SampledFunction, gamma: f64, a: &dyn Gauge, family: &CubeFamily) -> Result<Maximal> {
    check_grid(f, family)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(config(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    let whole = Cube::whole(f.grid());
    let table = match a.power_exponent() {
        Some(p) => {
            let pw: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
            let sums = PrefixSums::new(f.grid(), &pw);
            cube_values(family, &whole, |q| q.measure(f.grid()).powf(gamma) * sums.mean(q).max(0.0).powf(1.0 / p))
        }
        None => cube_values(family, &whole, |q| fractional_average(f, gamma, a, q)),
    };
    let (function, argmax) = scatter_max(f.grid(), &whole, &table);
    Ok(Maximal { function, argmax })
}

/// `sum_m lambda_m |2^m Q|^gamma ((1/|2^m Q|) int_{2^m Q} |f|^r)^{1/r}`, integrals clipped to the grid.
pub fn lemma41_rhs(f: &SampledFunction, q: &Cube, lambda: &LambdaSequence, gamma: f64, r: f64) -> Result<f64> {
    q.check(f.grid())?;
    if !(r >= 1.0) {
        return Err(config(format!("r must be >= 1, got {r}")));
    }
    let grid = f.grid();
    let pw: Vec<f64> = f.values().iter().map(|v| v.abs().powf(r)).collect();
    let mut total = 0.0;
    for (k, lam) in lambda.values.iter().enumerate() {
        if *lam == 0.0 {
            continue;
        }
        let region = Region::dilate(q, 1 << (k + 1));
        let big = region.measure(grid);
        let mean = integrate_region(grid, &pw, &region) / big;
        total += lam * big.powf(gamma) * mean.powf(1.0 / r);
    }
    Ok(total)
}

/// `g(map(y))` resampled at the nearest cell, so that `g` may be composed with a coordinate change.
pub fn resample(g: &SampledFunction, map: impl Fn(&Point) -> Point) -> SampledFunction {
    let grid: &Grid = g.grid();
    let values = (0..grid.cell_count())
        .map(|i| g.value(grid.nearest_cell(&map(&grid.cell_center(i)))))
        .collect();
    SampledFunction::from_raw(grid.clone(), values)
}

/// `sup_{x in Q, Q inside Q0} inf_{y in Q} g(y)` on the cells of `Q0`.
pub fn sup_inf_maximal(g: &SampledFunction, q0: &Cube, family: &CubeFamily) -> Result<Maximal> {
    check_grid(g, family)?;
    q0.check(g.grid())?;
    let (function, argmax) = sup_inf(family, q0, g.values());
    Ok(Maximal { function, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_cubes;
    use crate::maximal::median::{sharp_level, sharp_median};
    use crate::operators::{omega_lambda, LambdaSource};
    use crate::young::{ModulusOmega, YoungFunction};

    #[test]
    fn constant_and_degenerate() {
        let g = Grid::unit(1, 16).unwrap();
        let fam = CubeFamily::all(g.clone());
        let c = SampledFunction::constant(&g, 3.0);
        let q0 = Cube::new(&[2], 8).unwrap();
        let m = local_sharp_maximal(&c, 0.5, &q0, &fam).unwrap();
        assert!(m.function.defined().iter().all(|&(_, v)| v == 0.0));
        assert_eq!(m.function.get(0), None);
        let f = SampledFunction::from_fn(&g, |p| (7.0 * p[0]).sin()).unwrap();
        let m = local_sharp_maximal(&f, 0.5, &q0, &fam).unwrap();
        let single = sharp_median(&f, 0.5, &q0);
        assert!(m.function.defined().iter().all(|&(_, v)| v >= single));
        // Inside a one-cell region the family reduces to that cell.
        let cell = Cube::new(&[5], 1).unwrap();
        let m = local_sharp_maximal(&f, 0.5, &cell, &fam).unwrap();
        assert_eq!(m.function.defined(), vec![(5, 0.0)]);
    }

    #[test]
    fn sharp_maximal_brute_force() {
        let g = Grid::unit(1, 32).unwrap();
        let f = SampledFunction::from_fn(&g, |p| if p[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let fam = CubeFamily::all(g.clone());
        let q0 = Cube::whole(&g);
        let m = local_sharp_maximal(&f, 0.5, &q0, &fam).unwrap();
        let cubes = enumerate_cubes(&fam, None);
        for i in 0..32 {
            let best = cubes
                .iter()
                .filter(|c| c.contains_cell(g.multi_index(i)))
                .map(|c| {
                    let v = f.cube_values(c);
                    let mut cand: Vec<f64> = v.clone();
                    for a in &v {
                        for b in &v {
                            cand.push(0.5 * (a + b));
                        }
                    }
                    cand.iter().map(|&x| sharp_level(&v, 0.5, x)).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            assert_eq!(m.function.get(i), Some(best));
        }
    }

    #[test]
    fn smaller_s_is_larger() {
        let g = Grid::unit(1, 32).unwrap();
        let f = SampledFunction::from_fn(&g, |p| (11.0 * p[0]).cos() + p[0]).unwrap();
        let fam = CubeFamily::all(g.clone());
        let q0 = Cube::whole(&g);
        let a = local_sharp_maximal(&f, 0.5, &q0, &fam).unwrap();
        let b = local_sharp_maximal(&f, 0.25, &q0, &fam).unwrap();
        for i in 0..32 {
            assert!(a.function.get(i).unwrap() <= b.function.get(i).unwrap());
        }
    }

    #[test]
    fn fractional_examples() {
        let g = Grid::unit(1, 16).unwrap();
        let one = SampledFunction::constant(&g, 1.0);
        let m = fractional_maximal(&one, 0.5, &YoungFunction::Linear(1.0), &CubeFamily::all(g.clone())).unwrap();
        for (_, v) in m.function.defined() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let d = fractional_maximal(&one, 0.5, &YoungFunction::Linear(1.0), &CubeFamily::dyadic(g.clone())).unwrap();
        assert!(d.function.defined().iter().all(|&(_, v)| (v - 1.0).abs() < 1e-14));

        let g = Grid::new(1, 512, 2.0, &[0.0]).unwrap();
        let f = SampledFunction::from_fn(&g, |p| if p[0] < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let m = fractional_maximal(&f, 0.5, &YoungFunction::Linear(1.0), &CubeFamily::all(g.clone())).unwrap();
        let x = g.locate(&[1.5, 0.0]).unwrap();
        let want = 1.0 / 1.5f64.sqrt();
        assert!((m.function.get(x).unwrap() - want).abs() < 0.02 * want);
        let m2 = fractional_maximal(&f, 0.5, &YoungFunction::Linear(2.0), &CubeFamily::all(g.clone())).unwrap();
        for i in 0..512 {
            assert!(m.function.get(i).unwrap() <= m2.function.get(i).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn general_gauges_agree_with_power_route() {
        let g = Grid::unit(1, 16).unwrap();
        let f = SampledFunction::from_fn(&g, |p| (5.0 * p[0]).sin()).unwrap();
        let fam = CubeFamily::all(g.clone());
        let a = fractional_maximal(&f, 0.25, &YoungFunction::Power(2.0), &fam).unwrap();
        let b = fractional_maximal(&f, 0.25, &YoungFunction::PowerScaled(2.0, 1.0), &fam).unwrap();
        for i in 0..16 {
            let (x, y) = (a.function.get(i).unwrap(), b.function.get(i).unwrap());
            assert!((x - y).abs() < 1e-12 * x);
        }
    }

    #[test]
    fn dilate_sum_examples() {
        let g = Grid::unit(1, 64).unwrap();
        let q = Cube::new(&[28], 8).unwrap();
        let lam = omega_lambda(&ModulusOmega::Holder(1.0), 4, 1.0).unwrap();
        let zero = SampledFunction::constant(&g, 0.0);
        assert_eq!(lemma41_rhs(&zero, &q, &lam, 0.5, 1.0).unwrap(), 0.0);
        let none = LambdaSequence {
            values: vec![0.0; 4],
            clipped: vec![false; 4],
            source: LambdaSource::FromOmega,
        };
        let one = SampledFunction::constant(&g, 1.0);
        assert_eq!(lemma41_rhs(&one, &q, &none, 0.5, 1.0).unwrap(), 0.0);
        // Dilates of side 16, 32, 64, 128 around cell 32: the last covers half its measure.
        let got = lemma41_rhs(&one, &q, &lam, 0.0, 1.0).unwrap();
        let want = 0.5 + 0.25 + 0.125 + 0.0625 * 0.5;
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn composed_sup_inf() {
        let g = Grid::new(1, 8, 2.0, &[-1.0]).unwrap();
        let f = SampledFunction::from_fn(&g, |p| p[0]).unwrap();
        let flipped = resample(&f, |p| [-p[0], 0.0]);
        for i in 0..8 {
            assert_eq!(flipped.value(i), f.value(7 - i));
        }
        let fam = CubeFamily::all(g.clone());
        let m = sup_inf_maximal(&f, &Cube::whole(&g), &fam).unwrap();
        // The singleton cube is optimal for an increasing function.
        for i in 0..8 {
            assert_eq!(m.function.get(i), Some(f.value(i)));
        }
    }
}

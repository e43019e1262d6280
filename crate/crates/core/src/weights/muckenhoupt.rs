use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config, domain, Result};
use crate::geometry::{Cube, CubeFamily, PrefixSums, SampledFunction};
use crate::young::{norm_fast, Gauge};

/// A supremum over cubes with an attaining cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubeSup {
    pub value: f64,
    pub cube: Option<Cube>,
}

fn sup_over<F>(family: &CubeFamily, f: F) -> CubeSup
where
    F: Fn(&Cube) -> f64 + Sync,
{
    let cubes = family.enumerate_within(&Cube::whole(family.grid()));
    let vals: Vec<f64> = cubes.par_iter().map(&f).collect();
    let mut out = CubeSup { value: 0.0, cube: None };
    for (q, v) in cubes.iter().zip(vals) {
        if out.cube.is_none() || v > out.value {
            out = CubeSup { value: v, cube: Some(*q) };
        }
    }
    out
}

fn positive(w: &SampledFunction, family: &CubeFamily) -> Result<()> {
    if w.grid() != family.grid() {
        return Err(config("weight and cube family live on different grids"));
    }
    if !w.is_positive() {
        return Err(domain("weight has a zero or negative cell"));
    }
    Ok(())
}

/// `sup_Q (mean_Q w) (mean_Q w^{-1/(p-1)})^{p-1}`.
pub fn ap_constant(w: &SampledFunction, p: f64, family: &CubeFamily) -> Result<CubeSup> {
    if !(p > 1.0) {
        return Err(domain(format!("A_p needs p > 1, got {p}")));
    }
    positive(w, family)?;
    let g = w.grid();
    let direct = PrefixSums::new(g, w.values());
    let dual: Vec<f64> = w.values().iter().map(|x| x.powf(-1.0 / (p - 1.0))).collect();
    let dual = PrefixSums::new(g, &dual);
    Ok(sup_over(family, |q| direct.mean(q) * dual.mean(q).powf(p - 1.0)))
}

/// `sup_Q (mean_Q w) exp(mean_Q log(1/w))`.
pub fn ainfty_constant(w: &SampledFunction, family: &CubeFamily) -> Result<CubeSup> {
    positive(w, family)?;
    let g = w.grid();
    let direct = PrefixSums::new(g, w.values());
    let logs: Vec<f64> = w.values().iter().map(|x| -x.ln()).collect();
    let logs = PrefixSums::new(g, &logs);
    Ok(sup_over(family, |q| direct.mean(q) * logs.mean(q).exp()))
}

/// Exponents of the two-weight bump expression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpExponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
}

impl BumpExponents {
    pub fn new(p: f64, q: f64, r: f64, gamma: f64) -> Result<Self> {
        if !(r >= 1.0 && r < p && p < q && q.is_finite()) {
            return Err(config(format!("bump condition needs 1 <= r < p < q, got r = {r}, p = {p}, q = {q}")));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(config(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        Ok(Self { p, q, r, gamma })
    }
}

/// `|Q|^{gamma r + r/q - r/p} ||w^{r/q}||_{A,Q} ||v^{-r/p}||_{B,Q}` on one cube.
pub fn bump_value(w: &SampledFunction, v: &SampledFunction, a: &dyn Gauge, b: &dyn Gauge, e: BumpExponents, q: &Cube) -> f64 {
    let BumpExponents { p, q: qq, r, gamma } = e;
    let g = w.grid();
    let n = q.cell_count() as f64;
    let wi: Vec<(f64, f64)> = q.cells(g).map(|i| (w.value(i).powf(r / qq), 1.0 / n)).collect();
    let nw = norm_fast(a, &wi, 1.0);
    if nw == 0.0 {
        return 0.0;
    }
    let vi: Vec<(f64, f64)> = q.cells(g).map(|i| (v.value(i).powf(-r / p), 1.0 / n)).collect();
    q.measure(g).powf(gamma * r + r / qq - r / p) * nw * norm_fast(b, &vi, 1.0)
}

/// Supremum of [`bump_value`] over the family.
pub fn bump_condition(w: &SampledFunction, v: &SampledFunction, a: &dyn Gauge, b: &dyn Gauge, e: BumpExponents, family: &CubeFamily) -> Result<CubeSup> {
    if w.grid() != family.grid() {
        return Err(config("weight and cube family live on different grids"));
    }
    if !w.is_weight() {
        return Err(domain("w must be nonnegative"));
    }
    positive(v, family)?;
    Ok(sup_over(family, |q| bump_value(w, v, a, b, e, q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::young::YoungFunction;

    #[test]
    fn ap_examples() {
        let g = Grid::unit(1, 8).unwrap();
        let fam = CubeFamily::all(g.clone());
        let one = SampledFunction::constant(&g, 1.0);
        for p in [1.5, 2.0, 4.0] {
            assert!((ap_constant(&one, p, &fam).unwrap().value - 1.0).abs() < 1e-14);
        }
        assert!((ainfty_constant(&SampledFunction::constant(&g, 3.0), &fam).unwrap().value - 1.0).abs() < 1e-14);
        let g2 = Grid::unit(1, 2).unwrap();
        let m = 9.0;
        let w = SampledFunction::new(g2.clone(), vec![1.0, m]).unwrap();
        let f2 = CubeFamily::all(g2.clone());
        let want = (1.0 + m) / 2.0 * ((1.0 + 1.0 / m) / 2.0);
        assert!((ap_constant(&w, 2.0, &f2).unwrap().value - want).abs() < 1e-13);
        let e2 = std::f64::consts::E.powi(2);
        let w = SampledFunction::new(g2.clone(), vec![1.0, e2]).unwrap();
        let want = (1.0 + e2) / 2.0 / std::f64::consts::E;
        assert!((ainfty_constant(&w, &f2).unwrap().value - want).abs() < 1e-13);
        let zero = SampledFunction::new(g2.clone(), vec![0.0, 1.0]).unwrap();
        assert!(ap_constant(&zero, 2.0, &f2).is_err());
    }

    #[test]
    fn ap_power_weights_refine() {
        let run = |n: usize, a: f64| {
            let g = Grid::unit(1, n).unwrap();
            let w = SampledFunction::from_fn(&g, |x| (x[0] - 0.5).abs().powf(a)).unwrap();
            ap_constant(&w, 2.0, &CubeFamily::dyadic(g)).unwrap().value
        };
        let (a1, a2) = (run(256, 0.5), run(1024, 0.5));
        assert!(a2 / a1 < 1.1, "{a1} {a2}");
        let (b1, b2) = (run(256, 1.5), run(1024, 1.5));
        assert!(b2 / b1 > 1.5, "{b1} {b2}");
    }

    #[test]
    fn bump_examples() {
        let g = Grid::unit(1, 16).unwrap();
        let fam = CubeFamily::all(g.clone());
        let one = SampledFunction::constant(&g, 1.0);
        let (p, q) = (2.0, 4.0);
        let e = BumpExponents::new(p, q, 1.0, 1.0 / p - 1.0 / q).unwrap();
        let lin = YoungFunction::Linear(1.0);
        let b = bump_condition(&one, &one, &lin, &lin, e, &fam).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        let zero = SampledFunction::constant(&g, 0.0);
        assert_eq!(bump_condition(&zero, &one, &lin, &lin, e, &fam).unwrap().value, 0.0);
        assert!(BumpExponents::new(2.0, 2.0, 1.0, 0.0).is_err());
        // Raising w and lowering v can only increase the supremum.
        let w = SampledFunction::from_fn(&g, |x| 1.0 + x[0]).unwrap();
        let v = SampledFunction::from_fn(&g, |x| 2.0 - x[0]).unwrap();
        let base = bump_condition(&w, &v, &YoungFunction::Power(2.0), &lin, e, &fam).unwrap().value;
        let up = bump_condition(&w.map(|x| 1.5 * x), &v.map(|x| 0.5 * x), &YoungFunction::Power(2.0), &lin, e, &fam).unwrap().value;
        assert!(up >= base);
    }
}

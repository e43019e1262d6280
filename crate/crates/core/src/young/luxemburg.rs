use super::gauge::Gauge;
use crate::error::Result;
use crate::geometry::{Cube, Region, SampledFunction};

/// Smallest `lambda` with `sum_i w_i A(|v_i| / lambda) <= budget`, by bisection.
///
/// `items` are `(value, weight)` pairs. Returns 0 when every value vanishes.
pub fn luxemburg_solve(g: &dyn Gauge, items: &[(f64, f64)], budget: f64) -> f64 {
    let top = items.iter().fold(0.0f64, |m, &(v, w)| if w > 0.0 { m.max(v.abs()) } else { m });
    if top == 0.0 {
        return 0.0;
    }
    let load = |lam: f64| -> f64 {
        let mut s = 0.0;
        for &(v, w) in items {
            if w > 0.0 && v != 0.0 {
                s += w * g.value(v.abs() / lam);
            }
        }
        s
    };
    let mut hi = top;
    while !(load(hi) <= budget) {
        hi *= 2.0;
        if hi > top * 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi;
    loop {
        let next = lo / 2.0;
        if next < top * 1e-300 {
            lo = 0.0;
            break;
        }
        if load(next) <= budget {
            hi = next;
            lo = next;
        } else {
            lo = next;
            break;
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if load(mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Closed form `(sum_i w_i |v_i|^p / budget)^{1/p}` for a pure power gauge.
pub(crate) fn power_norm(p: f64, items: &[(f64, f64)], budget: f64) -> f64 {
    let s: f64 = items.iter().map(|&(v, w)| w * v.abs().powf(p)).sum();
    (s / budget).powf(1.0 / p)
}

/// Luxemburg norm through the closed form when the gauge is a pure power.
pub(crate) fn norm_fast(g: &dyn Gauge, items: &[(f64, f64)], budget: f64) -> f64 {
    match g.power_exponent() {
        Some(p) => power_norm(p, items, budget),
        None => luxemburg_solve(g, items, budget),
    }
}

fn cube_items(f: &SampledFunction, q: &Cube, weight: f64) -> Vec<(f64, f64)> {
    q.cells(f.grid()).map(|i| (f.value(i), weight)).collect()
}

/// `inf{lambda > 0 : (1/|Q|) int_Q A(|f|/lambda) <= 1}`.
pub fn luxemburg_mean_norm(f: &SampledFunction, q: &Cube, a: &dyn Gauge) -> Result<f64> {
    q.check(f.grid())?;
    let w = 1.0 / q.cell_count() as f64;
    Ok(luxemburg_solve(a, &cube_items(f, q, w), 1.0))
}

/// `inf{lambda > 0 : int_Q A(|f|/lambda) <= 1}`.
pub fn luxemburg_raw_norm(f: &SampledFunction, q: &Cube, a: &dyn Gauge) -> Result<f64> {
    q.check(f.grid())?;
    let w = f.grid().cell_volume();
    Ok(luxemburg_solve(a, &cube_items(f, q, w), 1.0))
}

/// Raw norm over a region clipped to the grid, cells weighted by their covered fraction.
pub(crate) fn raw_norm_region(values: &[f64], grid: &crate::geometry::Grid, region: &Region, a: &dyn Gauge) -> f64 {
    let h = grid.cell_volume();
    let items: Vec<(f64, f64)> = region
        .weighted_cells(grid)
        .into_iter()
        .map(|(i, w)| (values[i], w * h))
        .collect();
    norm_fast(a, &items, 1.0)
}

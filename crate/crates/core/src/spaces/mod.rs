//! Orlicz-Morrey norms, Orlicz-Campanato seminorms and the comparison
//! quantities between them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config, hypothesis, Result};
use crate::geometry::{Cube, CubeFamily, Grid, Region, SampledFunction};
use crate::young::{inverse, norm_fast, raw_norm_region, Gauge, MorreyWeight, YoungFunction};

pub use crate::weights::CubeSup;

/// `A^{-1}(u)`, in closed form for pure powers.
pub fn gauge_inverse(a: &dyn Gauge, u: f64) -> f64 {
    match a.power_exponent() {
        Some(p) => u.powf(1.0 / p),
        None => inverse(a, u).unwrap_or(f64::NAN),
    }
}

fn raw_items(values: &[f64], grid: &Grid, q: &Cube, shift: f64) -> Vec<(f64, f64)> {
    let h = grid.cell_volume();
    q.cells(grid).map(|i| (values[i] - shift, h)).collect()
}

/// `(1/phi(l)) Phi^{-1}(1/|Q|) ||f - c||_{Phi, Q}` on one cube.
pub fn morrey_term(f: &SampledFunction, phi_gauge: &dyn Gauge, phi: &MorreyWeight, q: &Cube, c: f64) -> f64 {
    let g = f.grid();
    let norm = norm_fast(phi_gauge, &raw_items(f.values(), g, q, c), 1.0);
    gauge_inverse(phi_gauge, 1.0 / q.measure(g)) * norm / phi.value(q.side_length(g))
}

fn sup_cubes<F>(family: &CubeFamily, term: F) -> CubeSup
where
    F: Fn(&Cube) -> f64 + Sync,
{
    let cubes = family.enumerate_within(&Cube::whole(family.grid()));
    let vals: Vec<f64> = cubes.par_iter().map(&term).collect();
    let mut out = CubeSup { value: 0.0, cube: None };
    for (q, v) in cubes.iter().zip(vals) {
        if out.cube.is_none() || v > out.value {
            out = CubeSup { value: v, cube: Some(*q) };
        }
    }
    out
}

fn same_grid(f: &SampledFunction, family: &CubeFamily) -> Result<()> {
    if f.grid() != family.grid() {
        return Err(config("function and cube family live on different grids"));
    }
    Ok(())
}

/// `sup_Q (1/phi(x, l)) Phi^{-1}(1/|Q|) ||f||_{Phi, Q}` with the raw Luxemburg norm,
/// `x` the center and `l` the side of `Q`.
pub fn morrey_norm(f: &SampledFunction, phi_gauge: &dyn Gauge, phi: &MorreyWeight, family: &CubeFamily) -> Result<CubeSup> {
    same_grid(f, family)?;
    Ok(sup_cubes(family, |q| morrey_term(f, phi_gauge, phi, q, 0.0)))
}

/// Relative width at which the search for the best constant stops.
pub const CAMPANATO_TOL: f64 = 1e-12;
const GOLDEN_MAX_STEPS: usize = 200;

/// `inf_c ||f - c||_{Phi, Q}` by golden-section search over `[min f, max f]`.
pub fn best_constant(f: &SampledFunction, phi_gauge: &dyn Gauge, q: &Cube) -> (f64, f64) {
    let g = f.grid();
    let v = f.cube_values(q);
    let (lo0, hi0) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let cost = |c: f64| norm_fast(phi_gauge, &raw_items(f.values(), g, q, c), 1.0);
    if hi0 == lo0 {
        return (lo0, 0.0);
    }
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo0, hi0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    let floor = (CAMPANATO_TOL * (hi0 - lo0)).max(4.0 * f64::EPSILON * lo0.abs().max(hi0.abs()));
    for _ in 0..GOLDEN_MAX_STEPS {
        if b - a <= floor {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = cost(x2);
        }
    }
    let c = 0.5 * (a + b);
    let fc = cost(c);
    [(x1, f1), (x2, f2), (c, fc)]
        .into_iter()
        .fold((c, fc), |best, e| if e.1 < best.1 { e } else { best })
}

/// `sup_Q (1/phi(x, l)) Phi^{-1}(1/|Q|) inf_c ||f - c||_{Phi, Q}`.
pub fn campanato_seminorm(f: &SampledFunction, phi_gauge: &dyn Gauge, phi: &MorreyWeight, family: &CubeFamily) -> Result<CubeSup> {
    same_grid(f, family)?;
    let g = f.grid();
    Ok(sup_cubes(family, |q| {
        let (_, norm) = best_constant(f, phi_gauge, q);
        gauge_inverse(phi_gauge, 1.0 / q.measure(g)) * norm / phi.value(q.side_length(g))
    }))
}

/// Both sides of the local estimates for `||M_gamma f||_{Psi, Q}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop51Gap {
    pub lhs: f64,
    pub rhs_i: f64,
    pub rhs_ii: f64,
    /// Smallest and largest side, in cells, of the centered cubes `Q(x, t)` used.
    pub t_cells: (usize, usize),
    /// The smallest admissible `Q(x, t)` already covers the grid.
    pub beyond_grid: bool,
}

/// Exponent `q` with `Psi^{-1}(t) = t^{-gamma} Phi^{-1}(t)` when `Phi = t^p`.
pub fn matched_exponent(p: f64, gamma: f64) -> Result<f64> {
    let inv = 1.0 / p - gamma;
    if !(inv > 0.0) {
        return Err(hypothesis("Psi^{-1}(t) = t^{-gamma} Phi^{-1}(t)", format!("1/p - gamma = {inv} must be positive")));
    }
    Ok(1.0 / inv)
}

/// Checks that `Phi = t^p`, `Psi = t^q` with `1/q = 1/p - gamma`.
pub fn check_matched(phi: &YoungFunction, psi: &YoungFunction, gamma: f64) -> Result<(f64, f64)> {
    let (p, q) = match (phi, psi) {
        (YoungFunction::Power(p), YoungFunction::Power(q)) => (*p, *q),
        _ => {
            return Err(hypothesis(
                "Psi^{-1}(t) = t^{-gamma} Phi^{-1}(t)",
                "only realized for Phi and Psi in the power family",
            ))
        }
    };
    let want = matched_exponent(p, gamma)?;
    if (q - want).abs() > 1e-9 * want {
        return Err(hypothesis(
            "Psi^{-1}(t) = t^{-gamma} Phi^{-1}(t)",
            format!("power q = {q} but 1/(1/p - gamma) = {want}"),
        ));
    }
    Ok((p, q))
}

/// Side, in cells, from which a cube centered like `q` covers the grid.
pub fn covering_side(grid: &Grid, q: &Cube) -> usize {
    let n2 = 2 * grid.cells_per_side();
    (0..grid.dim())
        .map(|a| {
            let twice_center = 2 * q.corner()[a] + q.side();
            twice_center.max(n2 - twice_center)
        })
        .max()
        .unwrap_or(0)
}

/// Evaluates both sides of the local estimates on `q`.
///
/// `mgf` is `M_gamma f` on the same grid; `cd` is the product `c_n d_n`.
pub fn prop51_gap(f: &SampledFunction, mgf: &SampledFunction, phi: &YoungFunction, psi: &YoungFunction, gamma: f64, q: &Cube, cd: f64) -> Result<Prop51Gap> {
    let (p, qq) = check_matched(phi, psi, gamma)?;
    if !(cd >= 1.0) {
        return Err(hypothesis("c_n d_n >= 1", format!("got {cd}")));
    }
    let g = f.grid();
    q.check(g)?;
    let psi_inv = |u: f64| u.powf(1.0 / qq);
    let lhs = raw_norm_region(mgf.values(), g, &Region::of_cube(q), psi);
    let first = (cd * q.side() as f64 - 1e-9).ceil() as usize;
    let cover = covering_side(g, q);
    let last = cover.max(first);
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut sup_i = 0.0f64;
    let mut sup_ii = 0.0f64;
    for m in first..=last {
        let region = Region::centered(q, m as u64);
        let big = region.measure(g);
        let int: f64 = region.weighted_cells(g).iter().map(|&(i, w)| abs[i] * w).sum::<f64>() * g.cell_volume();
        sup_i = sup_i.max(int / big.powf(1.0 - gamma));
        sup_ii = sup_ii.max(psi_inv(1.0 / big) * raw_norm_region(f.values(), g, &region, phi));
    }
    let scale = 1.0 / psi_inv(1.0 / q.measure(g));
    let near = raw_norm_region(f.values(), g, &Region::dilate(q, 2), &YoungFunction::Power(p));
    Ok(Prop51Gap {
        lhs,
        rhs_i: near + scale * sup_i,
        rhs_ii: scale * sup_ii,
        t_cells: (first, last),
        beyond_grid: first >= cover,
    })
}

/// Supremum of a compatibility expression, with where it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Compat {
    pub value: f64,
    pub r: f64,
    pub t: f64,
    /// The inner supremum over `t` sits at the truncation radius and is still growing there.
    pub incompatible: bool,
}

/// `sup_{r <= t} t^{n gamma} phi(t) / psi(r)` over multiples of the cell width up to the domain side.
pub fn compat_52(phi: &MorreyWeight, psi: &MorreyWeight, gamma: f64, grid: &Grid) -> Compat {
    let h = grid.cell_width();
    let n = grid.cells_per_side();
    let e = grid.dim() as f64 * gamma;
    let lifted: Vec<f64> = (1..=n).map(|m| (m as f64 * h).powf(e) * phi.value(m as f64 * h)).collect();
    let mut best = Compat {
        value: 0.0,
        r: h,
        t: h,
        incompatible: false,
    };
    // Suffix maxima of the lifted weight give the inner sup over t >= r.
    let mut tail = vec![(f64::NEG_INFINITY, 0usize); n + 1];
    for m in (0..n).rev() {
        tail[m] = if lifted[m] > tail[m + 1].0 { (lifted[m], m) } else { tail[m + 1] };
    }
    for r in 0..n {
        let (v, t) = tail[r];
        let val = v / psi.value((r + 1) as f64 * h);
        if val > best.value {
            best = Compat {
                value: val,
                r: (r + 1) as f64 * h,
                t: (t + 1) as f64 * h,
                incompatible: false,
            };
        }
    }
    best.incompatible = n >= 2 && tail[0].1 == n - 1 && lifted[n - 1] > lifted[n - 2];
    best
}

const COMPAT53_PANELS: usize = 2000;

/// `sup_l psi(l) int_l^D dt / (t phi(t))`, `D` the domain diameter, `l` over multiples of the cell width.
pub fn compat_53(phi: &MorreyWeight, psi: &MorreyWeight, grid: &Grid) -> Compat {
    let h = grid.cell_width();
    let d = grid.diameter();
    let integral = |l: f64| -> f64 {
        if l >= d {
            return 0.0;
        }
        let (a, b) = (l.ln(), d.ln());
        let n = COMPAT53_PANELS;
        let w = (b - a) / n as f64;
        let f = |u: f64| 1.0 / phi.value(u.exp());
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * w);
        }
        s * w / 3.0
    };
    let mut best = Compat {
        value: 0.0,
        r: h,
        t: d,
        incompatible: false,
    };
    for m in 1..=grid.cells_per_side() {
        let l = m as f64 * h;
        let v = psi.value(l) * integral(l);
        if v > best.value {
            best.value = v;
            best.r = l;
        }
    }
    best
}

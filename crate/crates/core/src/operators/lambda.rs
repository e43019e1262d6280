use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::{Kernel, KernelSpec};
use crate::error::{config, domain, Result};
use crate::geometry::{Cube, Grid, Point, Region};
use crate::young::{norm_fast, Gauge, ModulusOmega};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    FromOmega,
    FromHormander,
}

/// Coefficients `lambda_1, ..., lambda_M`. `clipped[m-1]` marks entries whose
/// annulus was cut by the grid boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSequence {
    pub values: Vec<f64>,
    pub clipped: Vec<bool>,
    pub source: LambdaSource,
}

impl LambdaSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |s, v| {
                *s += v;
                Some(*s)
            })
            .collect()
    }
}

/// Default dimensional constant `2 sqrt(n)`.
pub fn default_c_n(dim: usize) -> f64 {
    2.0 * (dim as f64).sqrt()
}

/// `lambda_m = omega(c_n 2^{-m})`, `m = 1..M`.
pub fn omega_lambda(omega: &ModulusOmega, m: usize, c_n: f64) -> Result<LambdaSequence> {
    if m == 0 {
        return Err(domain("omega_lambda needs M >= 1"));
    }
    Ok(LambdaSequence {
        values: (1..=m).map(|k| omega.value(c_n * 0.5f64.powi(k as i32))).collect(),
        clipped: vec![false; m],
        source: LambdaSource::FromOmega,
    })
}

/// Largest number of `(u, v)` pairs evaluated before switching to sampling.
pub const MAX_PAIRS: usize = 10_000;

/// `lambda_m = sup_{u,v in Q} |2^{m+1}Q|^{1-gamma} || 1_{2^{m+1}Q \ 2^m Q} (k(u,.) - k(v,.)) ||_{A, 2^{m+1}Q}`,
/// with `u, v` ranging over cell centers of `Q`.
pub fn hormander_lambda(k: &dyn Kernel, grid: &Grid, q: &Cube, m: usize, a: &dyn Gauge, seed: u64) -> Result<LambdaSequence> {
    if m == 0 {
        return Err(domain("hormander_lambda needs M >= 1"));
    }
    if k.dim() != grid.dim() {
        return Err(config("kernel and grid dimensions differ"));
    }
    q.check(grid)?;
    let centers: Vec<Point> = q.cells(grid).map(|i| grid.cell_center(i)).collect();
    let nc = centers.len();
    let all = nc * (nc - 1) / 2;
    let pairs: Vec<(usize, usize)> = if all <= MAX_PAIRS {
        (0..nc).flat_map(|u| (u + 1..nc).map(move |v| (u, v))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..MAX_PAIRS)
            .map(|_| {
                let u = rng.gen_range(0..nc);
                let mut v = rng.gen_range(0..nc - 1);
                if v >= u {
                    v += 1;
                }
                (u, v)
            })
            .collect()
    };
    let gamma = k.gamma();
    let mut values = Vec::with_capacity(m);
    let mut clipped = Vec::with_capacity(m);
    for level in 1..=m {
        let outer = Region::dilate(q, 1 << (level + 1));
        let inner = Region::dilate(q, 1 << level);
        let cells = outer.annulus_cells(&inner, grid);
        clipped.push(!outer.inside_grid(grid) || cells.is_empty());
        if cells.is_empty() || pairs.is_empty() {
            values.push(0.0);
            continue;
        }
        let big = outer.measure(grid);
        let w = grid.cell_volume() / big;
        let ys: Vec<(Point, f64)> = cells.iter().map(|&(j, f)| (grid.cell_center(j), f * w)).collect();
        let best = pairs
            .par_iter()
            .map(|&(u, v)| {
                let items: Vec<(f64, f64)> = ys
                    .iter()
                    .map(|(y, wt)| (k.value(&centers[u], y) - k.value(&centers[v], y), *wt))
                    .collect();
                norm_fast(a, &items, 1.0)
            })
            .reduce(|| 0.0, f64::max);
        values.push(big.powf(1.0 - gamma) * best);
    }
    Ok(LambdaSequence {
        values,
        clipped,
        source: LambdaSource::FromHormander,
    })
}

/// Hormander coefficients from a kernel description.
pub fn hormander_lambda_spec(spec: &KernelSpec, grid: &Grid, q: &Cube, m: usize, a: &dyn Gauge, seed: u64) -> Result<LambdaSequence> {
    let k = spec.build(grid.dim())?;
    hormander_lambda(k.as_ref(), grid, q, m, a, seed)
}

/// One sampled configuration of the smoothness test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothnessSample {
    /// `|x - y| / l`, with `l` the side of `Q`.
    pub distance_ratio: f64,
    pub ratio: f64,
}

/// Samples `(Q, x, x' in Q, y outside 2Q)` and returns
/// `|k(x,y) - k(x',y)| |x-y|^{n(1-gamma)} / omega(|x-x'|/|x-y|)` for each.
pub fn smoothness_samples(k: &dyn Kernel, omega: &ModulusOmega, n_samples: usize, seed: u64) -> Result<Vec<SmoothnessSample>> {
    if !matches!(k.name(), "riesz" | "dini") {
        return Err(config(format!("smoothness ratio needs a convolution kernel, got {}", k.name())));
    }
    let dim = k.dim();
    let beta = dim as f64 * (1.0 - k.gamma());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let l = 10f64.powf(rng.gen_range(-3.0..0.0));
        let mut center = [0.0; 2];
        let mut x = [0.0; 2];
        let mut xp = [0.0; 2];
        for a in 0..dim {
            center[a] = rng.gen_range(0.0..1.0);
            x[a] = center[a] + l * rng.gen_range(-0.5..0.5);
            xp[a] = center[a] + l * rng.gen_range(-0.5..0.5);
        }
        // y at sup-distance rho from the center, rho log-uniform in (l, 100 l].
        let rho = l * 10f64.powf(rng.gen_range(0.0..2.0));
        let mut y = center;
        let face = rng.gen_range(0..dim);
        for a in 0..dim {
            y[a] += if a == face {
                if rng.gen_bool(0.5) {
                    rho
                } else {
                    -rho
                }
            } else {
                rho * rng.gen_range(-1.0..1.0)
            };
        }
        let dxy = crate::geometry::distance(dim, &x, &y);
        let dxx = crate::geometry::distance(dim, &x, &xp);
        let ratio = if dxx == 0.0 {
            0.0
        } else {
            (k.value(&x, &y) - k.value(&xp, &y)).abs() * dxy.powf(beta) / omega.value(dxx / dxy)
        };
        out.push(SmoothnessSample {
            distance_ratio: rho / l,
            ratio,
        });
    }
    Ok(out)
}

/// Maximum of [`smoothness_samples`].
pub fn kernel_smoothness_ratio(spec: &KernelSpec, dim: usize, omega: &ModulusOmega, n_samples: usize, seed: u64) -> Result<f64> {
    let k = spec.build(dim)?;
    let s = smoothness_samples(k.as_ref(), omega, n_samples, seed)?;
    Ok(s.iter().map(|x| x.ratio).fold(0.0, f64::max))
}

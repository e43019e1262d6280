mod morrey;
mod pointwise;
mod twoweight;
mod weighted;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, VRule};
use super::registry::Inequality;
use super::suite::{SuiteSpec, CUBE_STREAM};
use crate::error::{config, hypothesis, Result};
use crate::geometry::{Cube, CubeFamily, Grid, Region, SampledFunction};
use crate::maximal::fractional_maximal;
use crate::operators::KernelSpec;
use crate::young::{dini_integral, YoungFunction};

/// Every registered inequality, in a fixed order.
pub fn all() -> Vec<Box<dyn Inequality>> {
    vec![
        Box::new(pointwise::Eq12),
        Box::new(pointwise::Thm21),
        Box::new(pointwise::Thm22),
        Box::new(pointwise::Thm23),
        Box::new(weighted::Thm31),
        Box::new(weighted::Eq33),
        Box::new(pointwise::Lem41),
        Box::new(twoweight::Eq45Check),
        Box::new(twoweight::Thm42),
        Box::new(morrey::Prop51),
        Box::new(morrey::Thm52),
        Box::new(morrey::Thm53),
        Box::new(morrey::Eq19),
    ]
}

const DEFAULT_SUPPORT: Option<[f64; 2]> = None;

/// Five each of indicators, steps, Gaussians and oscillating bumps.
const FUNCTIONS_20: &[SuiteSpec] = &[
    SuiteSpec::Indicator { count: 5, support: DEFAULT_SUPPORT },
    SuiteSpec::Step { count: 5, support: DEFAULT_SUPPORT },
    SuiteSpec::Gaussian { count: 5, support: DEFAULT_SUPPORT },
    SuiteSpec::Oscillating { count: 5, support: DEFAULT_SUPPORT },
];

const FUNCTIONS_12: &[SuiteSpec] = &[
    SuiteSpec::Indicator { count: 3, support: DEFAULT_SUPPORT },
    SuiteSpec::Step { count: 3, support: DEFAULT_SUPPORT },
    SuiteSpec::Gaussian { count: 3, support: DEFAULT_SUPPORT },
    SuiteSpec::Oscillating { count: 3, support: DEFAULT_SUPPORT },
];

const FUNCTIONS_10: &[SuiteSpec] = &[
    SuiteSpec::Indicator { count: 3, support: DEFAULT_SUPPORT },
    SuiteSpec::Step { count: 3, support: DEFAULT_SUPPORT },
    SuiteSpec::Gaussian { count: 2, support: DEFAULT_SUPPORT },
    SuiteSpec::Oscillating { count: 2, support: DEFAULT_SUPPORT },
];

const NARROW: Option<[f64; 2]> = Some([0.375, 0.625]);

/// Compactly supported functions well inside the domain, for whole-space estimates.
const FUNCTIONS_NARROW: &[SuiteSpec] = &[
    SuiteSpec::Indicator { count: 3, support: NARROW },
    SuiteSpec::Step { count: 3, support: NARROW },
    SuiteSpec::Gaussian { count: 2, support: NARROW },
    SuiteSpec::Oscillating { count: 2, support: NARROW },
];

const WEIGHTS_10: &[SuiteSpec] = &[
    SuiteSpec::PowerWeight { count: 5, support: DEFAULT_SUPPORT },
    SuiteSpec::NoiseWeight { count: 5, amplitude: 1.0 },
];

fn check_gamma(g: f64) -> Result<()> {
    if g > 0.0 && g < 1.0 {
        Ok(())
    } else {
        Err(hypothesis("0 < gamma < 1", format!("got gamma = {g}")))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s <= 0.5 {
        Ok(())
    } else {
        Err(hypothesis("0 < s <= 1/2", format!("got s = {s}")))
    }
}

fn check_r(g: f64, r: f64) -> Result<()> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(hypothesis("1 <= r < inf", format!("got r = {r}")));
    }
    if !(g * r < 1.0) {
        return Err(hypothesis("gamma r < 1", format!("gamma r = {}", g * r)));
    }
    Ok(())
}

/// The kernel must carry a smoothness modulus satisfying the Dini condition.
fn check_dini(cfg: &ExperimentConfig, k: &KernelSpec) -> Result<()> {
    k.build(cfg.dim)?;
    let Some(w) = k.modulus() else {
        return Err(hypothesis(
            "Dini smoothness of the kernel",
            format!("{} kernels carry no smoothness modulus", k.variant()),
        ));
    };
    let d = dini_integral(&w, cfg.c_n())?;
    if d.divergent {
        return Err(hypothesis("Dini smoothness of the kernel", format!("int_0^1 omega(c_n t) dt/t diverges for {w:?}")));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.5 && t < 1.0 {
        Ok(())
    } else {
        Err(hypothesis("1/2 < t < 1", format!("got t = {t}")))
    }
}

/// `M_{gamma,r} f` on the whole domain.
fn m_gamma_r(f: &SampledFunction, gamma: f64, r: f64, family: &CubeFamily) -> Result<SampledFunction> {
    Ok(fractional_maximal(f, gamma, &YoungFunction::Power(r), family)?.function.extend(0.0))
}

/// `M w`, `M_2 w = M(w^2)^{1/2}` or `w` itself.
fn second_weight(rule: VRule, w: &SampledFunction, family: &CubeFamily) -> Result<SampledFunction> {
    Ok(match rule {
        VRule::Mw => m_gamma_r(w, 0.0, 1.0, family)?,
        VRule::Mrw => m_gamma_r(w, 0.0, MRW_ORDER, family)?,
        VRule::W => w.clone(),
    })
}

/// Order `r` of `v = M_r w`.
const MRW_ORDER: f64 = 2.0;

fn check_weight(label: &str, w: &SampledFunction) -> Result<()> {
    if w.is_positive() {
        Ok(())
    } else {
        Err(config(format!("weight `{label}` is not strictly positive")))
    }
}

/// `count` random cubes of side at most `max_side` on the coarsest grid, refined to `grid`.
fn random_cubes(cfg: &ExperimentConfig, grid: &Grid, count: usize, divisor: usize) -> Result<Vec<Cube>> {
    let n0 = *cfg.grid_sizes.iter().min().ok_or_else(|| config("no grid sizes"))?;
    let n = grid.cells_per_side();
    if n % n0 != 0 {
        return Err(config(format!("grid size {n} is not a multiple of the coarsest size {n0}")));
    }
    let max_side = (n0 / divisor).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(CUBE_STREAM);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let side = rng.gen_range(1..=max_side);
        let corner: Vec<usize> = (0..cfg.dim).map(|_| rng.gen_range(0..=n0 - side)).collect();
        out.push(Cube::new(&corner, side)?.refined(n / n0));
    }
    Ok(out)
}

/// Smallest `k >= 1` with `2^k Q` covering the grid.
fn covering_depth(grid: &Grid, q: &Cube) -> usize {
    let mut k = 1;
    while !Region::dilate(q, 1 << k).covers_grid(grid) {
        k += 1;
    }
    k
}

fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

fn is_coarsest(cfg: &ExperimentConfig, grid: &Grid) -> bool {
    cfg.grid_sizes.iter().min() == Some(&grid.cells_per_side())
}

fn point(s: &super::registry::Sample) -> Result<usize> {
    s.point.ok_or_else(|| config("sample has no grid point"))
}

fn cube(s: &super::registry::Sample) -> Result<Cube> {
    s.cube.ok_or_else(|| config("sample has no cube"))
}

fn integral(grid: &Grid, v: impl Iterator<Item = f64>) -> f64 {
    v.sum::<f64>() * grid.cell_volume()
}

//! Brute-force oracle suites, shared by the CLI and the acceptance target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{config, Result};
use crate::geometry::{Cube, CubeFamily, Grid, SampledFunction};
use crate::harness::probe::sharp_median_brute;
use crate::maximal::{median_sorted, sharp_median_sorted};
use crate::spaces::morrey_norm;
use crate::weights::{condition_f_constant, ConditionFParams};
use crate::young::{bump_norm, dini_integral, luxemburg_mean_norm, luxemburg_raw_norm, Gauge, ModulusOmega, MorreyWeight, YoungFunction};

/// Outcome of one oracle suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest relative discrepancy, or the number of mismatches for exact suites.
    pub worst: f64,
    pub detail: String,
}

pub const ORACLES: &[&str] = &["luxemburg", "sharp_median", "median", "condition_f", "dini_bump", "morrey"];

pub const LUXEMBURG_TOL: f64 = 1e-9;
pub const CONDITION_F_TOL: f64 = 1e-9;
pub const MORREY_TOL: f64 = 1e-9;

pub fn run(name: &str, seed: u64) -> Result<OracleOutcome> {
    match name {
        "luxemburg" => luxemburg(seed, 100),
        "sharp_median" => sharp_median(seed, 200),
        "median" => median(seed, 200),
        "condition_f" => condition_f(seed, 50),
        "dini_bump" => dini_bump(),
        "morrey" => morrey(seed, 20),
        other => Err(config(format!("unknown oracle `{other}`; known: {}", ORACLES.join(", ")))),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// A power gauge that hides its exponent, forcing the bisection solver.
struct Opaque(f64);

impl Gauge for Opaque {
    fn value(&self, t: f64) -> f64 {
        t.powf(self.0)
    }

    fn label(&self) -> String {
        format!("opaque t^{}", self.0)
    }
}

fn random_function(rng: &mut ChaCha8Rng, grid: &Grid) -> SampledFunction {
    let values = (0..grid.cell_count()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    SampledFunction::new(grid.clone(), values).expect("finite values")
}

fn random_cube(rng: &mut ChaCha8Rng, grid: &Grid) -> Cube {
    let n = grid.cells_per_side();
    let side = rng.gen_range(1..=n);
    let corner: Vec<usize> = (0..grid.dim()).map(|_| rng.gen_range(0..=n - side)).collect();
    Cube::new(&corner, side).expect("positive side")
}

/// Mean and raw Luxemburg norms of `t^p` against `(mean |f|^p)^{1/p}` and `(int |f|^p)^{1/p}`.
pub fn luxemburg(seed: u64, trials: usize) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..trials {
        let dim = 1 + k % 2;
        let grid = Grid::unit(dim, if dim == 1 { 64 } else { 16 })?;
        let f = random_function(&mut rng, &grid);
        let q = random_cube(&mut rng, &grid);
        let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
        let sum: f64 = q.cells(&grid).map(|i| f.value(i).abs().powf(p)).sum();
        let mean = (sum / q.cell_count() as f64).powf(1.0 / p);
        let raw = (sum * grid.cell_volume()).powf(1.0 / p);
        worst = worst.max(rel(luxemburg_mean_norm(&f, &q, &Opaque(p))?, mean));
        worst = worst.max(rel(luxemburg_raw_norm(&f, &q, &Opaque(p))?, raw));
    }
    Ok(OracleOutcome {
        name: "luxemburg",
        passed: worst <= LUXEMBURG_TOL,
        cases: trials,
        worst,
        detail: format!("largest relative error {worst:e}, tolerance {LUXEMBURG_TOL:e}"),
    })
}

/// Values on a quarter-integer lattice, so that midpoints and distances are exact.
fn lattice_values(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.gen_range(1..=64);
    let spread = rng.gen_range(1..=64);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..=spread) as f64 / 4.0).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Sliding-window sharp median against every midpoint of two values as the center.
pub fn sharp_median(seed: u64, trials: usize) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..trials {
        let v = lattice_values(&mut rng);
        let s = [0.5, 0.25, 0.1, rng.gen_range(0.01..=0.5)][rng.gen_range(0..4)];
        if sharp_median_sorted(&v, s) != sharp_median_brute(&v, s) {
            mismatches += 1;
        }
    }
    Ok(OracleOutcome {
        name: "sharp_median",
        passed: mismatches == 0,
        cases: trials,
        worst: mismatches as f64,
        detail: format!("{mismatches} of {trials} value sets differ"),
    })
}

/// Order-statistic median against the defining count `#{v < M} <= t n`, scanned over the values.
pub fn median(seed: u64, trials: usize) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..trials {
        let v = lattice_values(&mut rng);
        let t = rng.gen_range(0.05..0.95);
        let n = v.len() as f64;
        let brute = v
            .iter()
            .copied()
            .filter(|&m| v.iter().filter(|&&x| x < m).count() as f64 <= t * n + 1e-9)
            .fold(f64::NEG_INFINITY, f64::max);
        if median_sorted(&v, t) != brute {
            mismatches += 1;
        }
    }
    Ok(OracleOutcome {
        name: "median",
        passed: mismatches == 0,
        cases: trials,
        worst: mismatches as f64,
        detail: format!("{mismatches} of {trials} value sets differ"),
    })
}

/// Required condition F constant of one cube by enumerating every subset.
fn exhaustive_cube(w: &[f64], v: &[f64], alpha: f64, beta: f64) -> f64 {
    let n = w.len();
    let kmax = ((alpha * n as f64) + 1e-9).floor() as usize;
    let total: f64 = v.iter().sum();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > kmax {
            continue;
        }
        let (mut we, mut ve) = (0.0, 0.0);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                we += w[i];
                ve += v[i];
            }
        }
        let rest = total - ve;
        let r = if rest > 0.0 {
            we / rest
        } else if we > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        best = best.max(r / (k as f64 / n as f64).powf(beta));
    }
    best
}

/// Condition F constant over dyadic cubes against subset enumeration, on grids of at most 16 cells per cube.
pub fn condition_f(seed: u64, trials: usize) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..trials {
        let dim = 1 + k % 2;
        let grid = Grid::unit(dim, if dim == 1 { 16 } else { 4 })?;
        let cells = grid.cell_count();
        let w: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.05..4.0f64).powi(2)).collect();
        let v: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.05..4.0)).collect();
        let alpha = rng.gen_range(0.1..0.9);
        let beta = rng.gen_range(0.2..2.0);
        let ws = SampledFunction::new(grid.clone(), w.clone())?;
        let vs = SampledFunction::new(grid.clone(), v.clone())?;
        let family = CubeFamily::dyadic(grid.clone());
        let got = condition_f_constant(&ws, &vs, ConditionFParams::new(alpha, beta)?, &family)?.c_emp;
        let mut want = 0.0f64;
        for q in family.enumerate_within(&Cube::whole(&grid)) {
            let idx: Vec<usize> = q.cells(&grid).collect();
            let wq: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
            let vq: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
            want = want.max(exhaustive_cube(&wq, &vq, alpha, beta));
        }
        worst = worst.max(rel(got, want));
    }
    Ok(OracleOutcome {
        name: "condition_f",
        passed: worst <= CONDITION_F_TOL,
        cases: trials,
        worst,
        detail: format!("largest relative error {worst:e}, tolerance {CONDITION_F_TOL:e}"),
    })
}

/// Dini classification of three moduli and `B_2` membership of four powers.
pub fn dini_bump() -> Result<OracleOutcome> {
    let mut wrong = Vec::new();
    let moduli = [
        (ModulusOmega::Holder(1.0), false),
        (ModulusOmega::Holder(0.5), false),
        (ModulusOmega::LogBorderline, true),
    ];
    for (w, divergent) in moduli {
        if dini_integral(&w, 2.0)?.divergent != divergent {
            wrong.push(format!("{w:?}"));
        }
    }
    for (s, inside) in [(1.0, true), (1.5, true), (2.0, false), (3.0, false)] {
        let b = bump_norm(&YoungFunction::Power(s), 0.0, 2.0)?;
        if b.divergent == inside {
            wrong.push(format!("Power({s})"));
        }
    }
    Ok(OracleOutcome {
        name: "dini_bump",
        passed: wrong.is_empty(),
        cases: 7,
        worst: wrong.len() as f64,
        detail: if wrong.is_empty() {
            "all classifications correct".into()
        } else {
            format!("misclassified: {}", wrong.join(", "))
        },
    })
}

/// Morrey norm with `Phi = t^p`, `phi = t^sigma` against `max_Q l^{-sigma} |Q|^{-1/p} ||f||_{L^p(Q)}`.
pub fn morrey(seed: u64, trials: usize) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..trials {
        let dim = 1 + k % 2;
        let grid = Grid::unit(dim, if dim == 1 { 32 } else { 8 })?;
        let f = random_function(&mut rng, &grid);
        let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
        let sigma = -rng.gen_range(0.05..(dim as f64 / p));
        let family = CubeFamily::all(grid.clone());
        let got = morrey_norm(&f, &YoungFunction::Power(p), &MorreyWeight::power_law(sigma)?, &family)?.value;
        let mut want = 0.0f64;
        for q in family.enumerate_within(&Cube::whole(&grid)) {
            let lp: f64 = q.cells(&grid).map(|i| f.value(i).abs().powf(p)).sum::<f64>() * grid.cell_volume();
            let l = q.side_length(&grid);
            want = want.max(l.powf(-sigma) * q.measure(&grid).powf(-1.0 / p) * lp.powf(1.0 / p));
        }
        worst = worst.max(rel(got, want));
    }
    Ok(OracleOutcome {
        name: "morrey",
        passed: worst <= MORREY_TOL,
        cases: trials,
        worst,
        detail: format!("largest relative error {worst:e}, tolerance {MORREY_TOL:e}"),
    })
}

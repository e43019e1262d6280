use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::registry::{lookup, Check, Inequality, Sample};
use crate::error::{config, Result};
use crate::geometry::{Cube, Grid};
use crate::operators::{PRODUCT_SUBCELLS, SINGULAR_DEPTH};

pub const SCHEMA_VERSION: u32 = 1;

/// Ratios whose right-hand side falls below this fraction of the largest one are excluded.
pub const RHS_FLOOR: f64 = 1e-14;

/// Relative agreement required between a witness and its re-evaluation.
pub const WITNESS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cube: Option<Cube>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `null` when the right-hand side vanishes.
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reevaluated_ratio: Option<f64>,
    pub reproduced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridStats {
    pub cells_per_side: usize,
    /// Largest ratio over the suite; `null` encodes `+inf`.
    pub c_emp: f64,
    pub samples: usize,
    pub skipped: usize,
    pub excluded: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_maxima: Option<Vec<Witness>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub grids: Vec<GridStats>,
    /// `c_emp(finest) / c_emp(second finest)`.
    pub ratio: Option<f64>,
    pub stable: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub inequality_id: String,
    pub summary: String,
    pub config: ExperimentConfig,
    pub metadata: BTreeMap<String, Value>,
    pub variant: String,
    pub variants: BTreeMap<String, BTreeMap<String, f64>>,
    pub series: BTreeMap<String, SeriesReport>,
    pub checks: BTreeMap<String, Check>,
    pub notes: BTreeMap<String, BTreeMap<String, Value>>,
    pub verdict: bool,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// The `c_emp` of `series` on each grid, coarsest first.
    pub fn c_emp(&self, series: &str) -> Vec<f64> {
        self.series.get(series).map(|s| s.grids.iter().map(|g| g.c_emp).collect()).unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record the largest ratio of every suite case, not just the overall witness.
    pub witnesses: bool,
    /// Keep every sample for CSV output.
    pub keep_samples: bool,
}

pub struct RunOutput {
    pub report: Report,
    /// Samples per grid size, in evaluation order.
    pub samples: BTreeMap<usize, Vec<Sample>>,
}

struct Tally {
    c_emp: f64,
    best: Option<usize>,
    samples: usize,
    skipped: usize,
    excluded: usize,
    failures: usize,
    per_case: BTreeMap<String, usize>,
}

fn ratio(s: &Sample) -> f64 {
    if s.rhs == 0.0 {
        f64::INFINITY
    } else {
        s.lhs / s.rhs
    }
}

fn tally(samples: &[&Sample]) -> Tally {
    let scale = samples.iter().map(|s| s.rhs.abs()).fold(0.0, f64::max);
    let mut t = Tally {
        c_emp: 0.0,
        best: None,
        samples: samples.len(),
        skipped: 0,
        excluded: 0,
        failures: 0,
        per_case: BTreeMap::new(),
    };
    for (k, s) in samples.iter().enumerate() {
        if s.lhs == 0.0 && s.rhs == 0.0 {
            t.skipped += 1;
            continue;
        }
        if s.rhs == 0.0 {
            t.failures += 1;
        } else if s.rhs.abs() < RHS_FLOOR * scale {
            t.excluded += 1;
            continue;
        }
        let r = ratio(s);
        if t.best.is_none() || r > t.c_emp {
            t.c_emp = r;
            t.best = Some(k);
        }
        match t.per_case.get(&s.case) {
            Some(&j) if ratio(samples[j]) >= r => {}
            _ => {
                t.per_case.insert(s.case.clone(), k);
            }
        }
    }
    t
}

fn witness(ineq: &dyn Inequality, cfg: &ExperimentConfig, grid: &Grid, s: &Sample, recheck: bool) -> Result<Witness> {
    let r = ratio(s);
    let (reevaluated_ratio, reproduced) = if recheck {
        let (l, rr) = ineq.reevaluate(cfg, grid, s)?;
        let again = if rr == 0.0 { f64::INFINITY } else { l / rr };
        let ok = again == r || (again - r).abs() <= WITNESS_TOL * r.abs();
        (Some(again), ok)
    } else {
        (None, true)
    };
    Ok(Witness {
        case: s.case.clone(),
        point: s.point,
        coordinates: s.point.map(|i| grid.cell_center(i)[..grid.dim()].to_vec()),
        cube: s.cube,
        lhs: s.lhs,
        rhs: s.rhs,
        ratio: r,
        reevaluated_ratio,
        reproduced,
    })
}

fn metadata(ineq: &dyn Inequality, cfg: &ExperimentConfig, grids: &[Grid]) -> BTreeMap<String, Value> {
    let g = &grids[grids.len() - 1];
    let mut m = BTreeMap::new();
    m.insert("c_n".into(), json!(cfg.c_n()));
    m.insert("d_n".into(), json!(cfg.d_n()));
    m.insert("truncation_radius".into(), json!(g.diameter()));
    m.insert("domain_origin".into(), json!(g.origin()[..g.dim()].to_vec()));
    m.insert("domain_side".into(), json!(g.side_length()));
    m.insert(
        "singular_cell_policy".into(),
        json!(format!(
            "1D: closed form for Riesz and Dini, product integration over {PRODUCT_SUBCELLS} subcells for homogeneous kernels; 2D: dyadic subdivision to depth {SINGULAR_DEPTH}, innermost level dropped"
        )),
    );
    m.insert("cube_convention".into(), json!("Q(x, l): x is the cube center, l its side length"));
    m.insert("ainfty_form".into(), json!("sup_Q (mean_Q w) exp(mean_Q log(1/w))"));
    m.insert("rhs_floor".into(), json!(RHS_FLOOR));
    m.insert("witness_tolerance".into(), json!(WITNESS_TOL));
    m.insert("stability_factor".into(), json!(cfg.stability_factor));
    m.insert("rng".into(), json!("ChaCha8, stream 0 functions, 1 weights, 2 cubes"));
    m.extend(ineq.metadata(cfg));
    m
}

/// Runs the configured inequality on every grid and assembles the report.
pub fn run_with(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunOutput> {
    cfg.validate_common()?;
    let ineq = lookup(&cfg.inequality_id)?;
    ineq.validate(cfg)?;
    let grids = cfg.grids(ineq.centered())?;
    let variants = ineq.variants(cfg);
    let series = ineq.series();

    let mut runs = Vec::with_capacity(grids.len());
    for g in &grids {
        runs.push(ineq.evaluate(cfg, g)?);
    }

    // Per (variant, series, grid) tallies.
    let mut tallies: Vec<Vec<Vec<(Tally, Vec<&Sample>)>>> = Vec::new();
    for v in 0..variants.len() {
        let mut per_series = Vec::new();
        for s in series {
            let mut per_grid = Vec::new();
            for run in &runs {
                let picked: Vec<&Sample> = run.samples.iter().filter(|x| x.variant == v && x.series == *s).collect();
                per_grid.push((tally(&picked), picked));
            }
            per_series.push(per_grid);
        }
        tallies.push(per_series);
    }

    let finest = |v: usize, s: usize| tallies[v][s].last().map_or(0.0, |t| t.0.c_emp);
    let mut chosen = 0;
    let mut chosen_score = f64::INFINITY;
    let mut scan = BTreeMap::new();
    for (v, label) in variants.iter().enumerate() {
        let score = (0..series.len()).map(|s| finest(v, s)).fold(0.0, f64::max);
        scan.insert(label.clone(), series.iter().enumerate().map(|(s, name)| (name.to_string(), finest(v, s))).collect());
        if v == 0 || score < chosen_score {
            chosen = v;
            chosen_score = score;
        }
    }

    let mut series_reports = BTreeMap::new();
    let mut verdict = true;
    for (si, name) in series.iter().enumerate() {
        let mut stats = Vec::new();
        for (gi, (t, picked)) in tallies[chosen][si].iter().enumerate() {
            let g = &grids[gi];
            let w = match t.best {
                Some(k) => Some(witness(ineq.as_ref(), cfg, g, picked[k], true)?),
                None => None,
            };
            if let Some(w) = &w {
                verdict &= w.reproduced;
            }
            let case_maxima = if opts.witnesses {
                let mut list = Vec::new();
                for &k in t.per_case.values() {
                    list.push(witness(ineq.as_ref(), cfg, g, picked[k], false)?);
                }
                Some(list)
            } else {
                None
            };
            stats.push(GridStats {
                cells_per_side: g.cells_per_side(),
                c_emp: t.c_emp,
                samples: t.samples,
                skipped: t.skipped,
                excluded: t.excluded,
                failures: t.failures,
                witness: w,
                case_maxima,
            });
        }
        let (ratio, stable) = if stats.len() >= 2 {
            let a = stats[stats.len() - 1].c_emp;
            let b = stats[stats.len() - 2].c_emp;
            let r = if a == 0.0 && b == 0.0 { 1.0 } else { a / b };
            let ok = a.is_finite() && b.is_finite() && r <= cfg.stability_factor;
            (Some(r), Some(ok))
        } else {
            (None, None)
        };
        verdict &= stable.unwrap_or(true) && stats.iter().all(|s| s.c_emp.is_finite());
        series_reports.insert(name.to_string(), SeriesReport { grids: stats, ratio, stable });
    }

    let mut checks = BTreeMap::new();
    let mut notes = BTreeMap::new();
    for (g, run) in grids.iter().zip(&runs) {
        let n = g.cells_per_side();
        for (k, c) in &run.checks {
            verdict &= c.passed;
            checks.insert(format!("{k}@N={n}"), c.clone());
        }
        if !run.notes.is_empty() {
            notes.insert(format!("N={n}"), run.notes.clone());
        }
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        inequality_id: ineq.id().to_string(),
        summary: ineq.summary().to_string(),
        config: cfg.clone(),
        metadata: metadata(ineq.as_ref(), cfg, &grids),
        variant: variants[chosen].clone(),
        variants: if variants.len() > 1 { scan } else { BTreeMap::new() },
        series: series_reports,
        checks,
        notes,
        verdict,
    };
    let samples = if opts.keep_samples {
        grids.iter().zip(runs).map(|(g, r)| (g.cells_per_side(), r.samples)).collect()
    } else {
        BTreeMap::new()
    };
    Ok(RunOutput { report, samples })
}

/// Runs the inequality with default options.
pub fn run_inequality(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(run_with(cfg, RunOptions::default())?.report)
}

/// Like [`run_inequality`], but insists on two or more grids so that stability is judged.
pub fn refinement_study(cfg: &ExperimentConfig) -> Result<Report> {
    if cfg.grid_sizes.len() < 2 {
        return Err(config("a refinement study needs at least two grid sizes"));
    }
    run_inequality(cfg)
}

/// Writes one CSV of per-sample sides for every grid.
pub fn write_csv(out: &RunOutput, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let variants: Vec<String> = lookup(&out.report.inequality_id)?.variants(&out.report.config);
    for (n, samples) in &out.samples {
        let path = dir.join(format!("{}_N{n}.csv", out.report.inequality_id));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["variant", "series", "case", "point", "cube_corner", "cube_side", "lhs", "rhs"])?;
        for s in samples {
            let (corner, side) = match &s.cube {
                Some(c) => (
                    c.corner().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                    c.side().to_string(),
                ),
                None => (String::new(), String::new()),
            };
            w.write_record([
                variants.get(s.variant).cloned().unwrap_or_default(),
                s.series.to_string(),
                s.case.clone(),
                s.point.map(|p| p.to_string()).unwrap_or_default(),
                corner,
                side,
                format!("{:e}", s.lhs),
                format!("{:e}", s.rhs),
            ])?;
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

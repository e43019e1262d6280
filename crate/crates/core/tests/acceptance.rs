use std::process::ExitCode;
use std::time::Instant;

use hartool_core::harness::{run_inequality, ExperimentConfig, Report};
use hartool_core::oracle;
use serde_json::{json, Value};

/// Largest allowed `c_emp(finest) / c_emp(second)` and its reciprocal.
const STABILITY: f64 = 2.0;
const EQ12_SLACK: f64 = 1.05;

type Outcome = Result<String, String>;

fn report(cfg: Value) -> Result<Report, String> {
    let cfg = ExperimentConfig::from_json(&cfg.to_string()).map_err(|e| e.to_string())?;
    run_inequality(&cfg).map_err(|e| e.to_string())
}

/// Finite, reproduced and refinement stable in every series.
fn stable(r: &Report) -> Outcome {
    let mut parts = Vec::new();
    for (name, s) in &r.series {
        for g in &s.grids {
            if !g.c_emp.is_finite() {
                return Err(format!("{name}: c_emp infinite at N={}", g.cells_per_side));
            }
            if let Some(w) = &g.witness {
                if !w.reproduced {
                    return Err(format!("{name}: witness at N={} not reproduced", g.cells_per_side));
                }
            }
        }
        let c: Vec<String> = s.grids.iter().map(|g| format!("{:.4}", g.c_emp)).collect();
        if let Some(ratio) = s.ratio {
            if !(1.0 / STABILITY..=STABILITY).contains(&ratio) {
                return Err(format!("{name}: c_emp {} ratio {ratio:.4} outside [1/{STABILITY}, {STABILITY}]", c.join(" -> ")));
            }
            parts.push(format!("{name}: c_emp {} ratio {ratio:.4}", c.join(" -> ")));
        } else {
            parts.push(format!("{name}: c_emp {}", c.join(" -> ")));
        }
    }
    if r.series.is_empty() {
        return Err("no series".into());
    }
    Ok(parts.join("; "))
}

fn checks_pass(r: &Report) -> Result<(), String> {
    match r.checks.iter().find(|(_, c)| !c.passed) {
        Some((name, c)) => Err(format!("check {name} failed: {}", c.detail)),
        None => Ok(()),
    }
}

fn oracle_outcome(name: &str) -> Outcome {
    let o = oracle::run(name, 2024).map_err(|e| e.to_string())?;
    if o.passed {
        Ok(format!("{} cases, {}", o.cases, o.detail))
    } else {
        Err(o.detail)
    }
}

fn luxemburg() -> Outcome {
    oracle_outcome("luxemburg")
}

fn medians() -> Outcome {
    let a = oracle_outcome("sharp_median")?;
    let b = oracle_outcome("median")?;
    Ok(format!("sharp median {a}; median {b}"))
}

fn condition_f() -> Outcome {
    oracle_outcome("condition_f")
}

fn eq12() -> Outcome {
    let mut worst: f64 = 0.0;
    for dim in [1usize, 2] {
        let n: usize = if dim == 1 { 256 } else { 64 };
        for gamma in [0.25, 0.5, 0.75] {
            let r = report(json!({ "inequality_id": "eq12", "dim": dim, "grid_sizes": [n], "gamma": gamma, "seed": 11 }))?;
            checks_pass(&r)?;
            let bound = (dim as f64).powf(dim as f64 * (1.0 - gamma) / 2.0) * EQ12_SLACK;
            let c = r.c_emp("main")[0];
            if !(c <= bound) {
                return Err(format!("n={dim}, gamma={gamma}: largest ratio {c} exceeds {bound}"));
            }
            let g = &r.series["main"].grids[0];
            if g.samples != 20 * n.pow(dim as u32) {
                return Err(format!("n={dim}, gamma={gamma}: {} samples", g.samples));
            }
            worst = worst.max(c / bound);
        }
    }
    Ok(format!("largest ratio / explicit bound {worst:.4} over 6 settings"))
}

fn thm21() -> Outcome {
    let r = report(json!({ "inequality_id": "thm21", "grid_sizes": [128, 256], "gamma": 0.5, "s": 0.5, "r": 1, "seed": 3 }))?;
    stable(&r)
}

fn thm23() -> Outcome {
    let r = report(json!({
        "inequality_id": "thm23",
        "grid_sizes": [128, 256],
        "gamma": 0.5,
        "seed": 5,
        "kernel": { "variant": "homogeneous", "gamma": 0.5, "exponents": [0.25, 0.25], "coeffs": [1.0, -1.0] }
    }))?;
    stable(&r)
}

fn lem41() -> Outcome {
    let r = report(json!({
        "inequality_id": "lem41",
        "grid_sizes": [128, 256],
        "kernel": { "variant": "riesz", "gamma": 0.5 },
        "cubes": 20,
        "seed": 7
    }))?;
    checks_pass(&r)?;
    stable(&r)
}

fn thm31() -> Outcome {
    let r = report(json!({
        "inequality_id": "thm31",
        "grid_sizes": [128, 256],
        "gamma": 0.5,
        "r": 1,
        "gauges": { "Phi": { "family": "linear", "r": 1.0 } },
        "v_rule": "mw",
        "seed": 9
    }))?;
    let g = &r.series["main"].grids[0];
    if g.samples != 100 {
        return Err(format!("{} function-weight pairs, expected 100", g.samples));
    }
    stable(&r).map(|s| format!("{s}; best {}", r.variant))
}

fn dini_bump() -> Outcome {
    oracle_outcome("dini_bump")
}

fn thm52() -> Outcome {
    let r = report(json!({
        "inequality_id": "thm52",
        "grid_sizes": [128, 256],
        "gamma": 0.25,
        "p": 2,
        "morrey": { "phi": { "family": "power_law", "sigma": -0.5 }, "psi": { "family": "power_law", "sigma": -0.25 } },
        "seed": 13
    }))?;
    checks_pass(&r)?;
    let s = stable(&r)?;
    let m = oracle_outcome("morrey")?;
    Ok(format!("{s}; morrey {m}"))
}

fn determinism() -> Outcome {
    let configs = [
        json!({ "inequality_id": "eq12", "dim": 2, "grid_sizes": [16, 32], "gamma": 0.5, "seed": 1 }),
        json!({ "inequality_id": "thm31", "grid_sizes": [64, 128], "seed": 1 }),
        json!({ "inequality_id": "lem41", "grid_sizes": [64, 128], "seed": 1 }),
        json!({ "inequality_id": "prop51", "grid_sizes": [64, 128], "seed": 1 }),
    ];
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    for cfg in configs {
        let id = cfg["inequality_id"].clone();
        let a = one.install(|| report(cfg.clone()))?.to_json().map_err(|e| e.to_string())?;
        let b = many.install(|| report(cfg))?.to_json().map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{id}: reports differ between 1 and 4 threads"));
        }
    }
    Ok("4 configs byte-identical with 1 and 4 threads".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Outcome); 11] = [
        ("luxemburg oracle", 1.0, luxemburg),
        ("median and sharp median exactness", 5.0, medians),
        ("condition F exactness", 30.0, condition_f),
        ("eq12 explicit constant", 120.0, eq12),
        ("thm21 sharp maximal bound", 300.0, thm21),
        ("thm23 homogeneous kernel", 300.0, thm23),
        ("lem41 median oscillation", 120.0, lem41),
        ("thm31 weighted bound", 300.0, thm31),
        ("dini and bump classification", 10.0, dini_bump),
        ("thm52 Morrey bound", 180.0, thm52),
        ("thread determinism", f64::INFINITY, determinism),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let out = match out {
            Ok(d) if secs > *limit => Err(format!("{d}; took {secs:.2} s, limit {limit} s")),
            o => o,
        };
        match out {
            Ok(d) => println!("PASS {:>2} {name}: {d} ({secs:.2} s)", k + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} ({secs:.2} s)", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

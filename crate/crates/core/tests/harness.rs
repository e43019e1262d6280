use hartool_core::geometry::{Cube, Grid};
use hartool_core::harness::{
    generate_suite, lookup, median_decay_check, refinement_study, registry, run_inequality, run_with, write_csv, ExperimentConfig, Report,
    RunOptions, Shape, SuiteSpec,
};
use hartool_core::operators::KernelSpec;
use hartool_core::Error;
use serde_json::{json, Value};

fn cfg(v: Value) -> ExperimentConfig {
    ExperimentConfig::from_json(&v.to_string()).expect("valid config")
}

fn run(v: Value) -> Report {
    run_inequality(&cfg(v)).expect("run succeeds")
}

fn hypothesis_of(v: Value) -> &'static str {
    match run_inequality(&cfg(v)) {
        Err(Error::Hypothesis { name, .. }) => name,
        other => panic!("expected a hypothesis violation, got {other:?}"),
    }
}

#[test]
fn registry_holds_every_inequality() {
    let ids: Vec<&str> = registry().keys().copied().collect();
    let mut want = vec![
        "eq12", "thm21", "thm22", "thm23", "thm31", "eq33", "lem41", "eq45_check", "thm42", "prop51", "thm52", "thm53", "eq19",
    ];
    want.sort();
    assert_eq!(ids, want);
    for id in want {
        assert_eq!(lookup(id).unwrap().id(), id);
    }
    assert!(matches!(lookup("thm99"), Err(Error::UnknownInequality(_))));
}

#[test]
fn unknown_config_fields_are_rejected() {
    assert!(ExperimentConfig::from_json(r#"{"inequality_id":"eq12","grid_sizes":[8],"gamm":0.5}"#).is_err());
}

#[test]
fn hypotheses_are_named() {
    assert!(hypothesis_of(json!({ "inequality_id": "thm21", "grid_sizes": [16], "gamma": 0.6, "r": 2 })).contains("gamma r < 1"));
    assert!(hypothesis_of(json!({ "inequality_id": "thm42", "grid_sizes": [16], "p": 5, "q": 4 })).contains("r < p < q"));
    assert!(hypothesis_of(json!({ "inequality_id": "thm42", "grid_sizes": [16], "p": 2, "q": 4, "alpha1": 0.1, "alpha2": 0.1 }))
        .contains("alpha1 + alpha2"));
    assert!(hypothesis_of(json!({ "inequality_id": "eq12", "grid_sizes": [16], "gamma": 1.2 })).contains("gamma"));
    let psi = json!({ "inequality_id": "prop51", "grid_sizes": [16], "gamma": 0.25, "p": 2, "gauges": { "Psi": { "family": "power", "p": 3 } } });
    assert!(!hypothesis_of(psi).is_empty());
}

#[test]
fn admissible_configs_are_accepted() {
    let r = run(json!({ "inequality_id": "thm42", "grid_sizes": [32], "p": 2, "q": 4, "alpha1": 0.1, "alpha2": 0.15 }));
    assert_eq!(r.inequality_id, "thm42");
    let r = run(json!({ "inequality_id": "prop51", "grid_sizes": [32], "gamma": 0.25, "p": 2, "gauges": { "Psi": { "family": "power", "p": 4 } } }));
    assert_eq!(r.schema_version, 1);
}

#[test]
fn zero_function_skips_every_ratio() {
    let r = run(json!({ "inequality_id": "eq12", "grid_sizes": [32, 64], "suite": [{ "kind": "constant", "value": 0.0 }] }));
    for g in &r.series["main"].grids {
        assert_eq!(g.c_emp, 0.0);
        assert_eq!(g.skipped, g.cells_per_side);
        assert_eq!(g.samples, g.skipped);
        assert_eq!(g.failures, 0);
    }
    assert!(r.verdict);
}

#[test]
fn constant_suite_is_stable() {
    let r = refinement_study(&cfg(json!({
        "inequality_id": "eq12",
        "grid_sizes": [32, 64, 128],
        "suite": [{ "kind": "constant", "value": 1.0 }]
    })))
    .unwrap();
    let s = &r.series["main"];
    assert_eq!(s.stable, Some(true));
    assert!((s.ratio.unwrap() - 1.0).abs() < 0.05);
    assert!(r.verdict);
}

#[test]
fn single_grid_refinement_is_a_config_error() {
    let c = cfg(json!({ "inequality_id": "eq12", "grid_sizes": [32] }));
    assert!(matches!(refinement_study(&c), Err(Error::Config(_))));
    assert!(run_inequality(&c).is_ok());
}

#[test]
fn incompatible_morrey_pair_fails() {
    let compat = |side: f64| {
        let r = run(json!({
            "inequality_id": "thm52",
            "grid_sizes": [32, 64],
            "side_length": side,
            "gamma": 0.25,
            "p": 2,
            "morrey": { "phi": { "family": "power_law", "sigma": -0.1 }, "psi": { "family": "power_law", "sigma": -0.5 } }
        }));
        assert!(!r.verdict);
        assert!(r.checks.values().all(|c| !c.passed));
        r.checks["compatibility@N=64"].value.unwrap()
    };
    let growth: Vec<f64> = [1.0, 2.0, 4.0].into_iter().map(compat).collect();
    assert!(growth.windows(2).all(|w| w[1] > w[0]), "{growth:?}");
}

#[test]
fn compatible_morrey_pair_passes() {
    let r = run(json!({
        "inequality_id": "thm52",
        "grid_sizes": [32, 64],
        "gamma": 0.25,
        "p": 2,
        "morrey": { "phi": { "family": "power_law", "sigma": -0.5 }, "psi": { "family": "power_law", "sigma": -0.25 } }
    }));
    assert!(r.verdict, "{:?}", r.checks);
}

#[test]
fn reports_are_reproducible() {
    let v = json!({ "inequality_id": "thm31", "grid_sizes": [32, 64], "seed": 4 });
    assert_eq!(run(v.clone()).to_json().unwrap(), run(v).to_json().unwrap());
    let a = run(json!({ "inequality_id": "lem41", "grid_sizes": [64], "seed": 1 }));
    let b = run(json!({ "inequality_id": "lem41", "grid_sizes": [64], "seed": 2 }));
    assert_ne!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn witnesses_reproduce() {
    let configs = [
        json!({ "inequality_id": "eq12", "dim": 2, "grid_sizes": [16] }),
        json!({ "inequality_id": "thm21", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm22", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm23", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm31", "grid_sizes": [64] }),
        json!({ "inequality_id": "eq33", "grid_sizes": [64] }),
        json!({ "inequality_id": "lem41", "grid_sizes": [64] }),
        json!({ "inequality_id": "eq45_check", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm42", "grid_sizes": [64] }),
        json!({ "inequality_id": "prop51", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm52", "grid_sizes": [64] }),
        json!({ "inequality_id": "thm53", "grid_sizes": [64] }),
        json!({ "inequality_id": "eq19", "grid_sizes": [64] }),
    ];
    for v in configs {
        let out = run_with(&cfg(v.clone()), RunOptions { witnesses: true, keep_samples: false }).unwrap();
        for (name, s) in &out.report.series {
            for g in &s.grids {
                assert!(g.c_emp >= 0.0);
                let w = g.witness.as_ref().unwrap_or_else(|| panic!("{v}: {name} has no witness"));
                assert!(w.reproduced, "{v}: {name} witness {w:?}");
                assert_eq!(w.ratio, g.c_emp);
                let maxima = g.case_maxima.as_ref().expect("per-case witnesses");
                assert!(maxima.iter().all(|m| m.reproduced && m.ratio <= g.c_emp));
            }
        }
    }
}

#[test]
fn t_scan_reports_the_best_variant() {
    let r = run(json!({ "inequality_id": "thm31", "grid_sizes": [32, 64], "t_scan": [0.6, 0.8] }));
    assert_eq!(r.variants.len(), 2);
    let best = r.variants[&r.variant].values().copied().fold(f64::NEG_INFINITY, f64::max);
    for scan in r.variants.values() {
        assert!(best <= scan.values().copied().fold(f64::NEG_INFINITY, f64::max));
    }
}

#[test]
fn csv_rows_match_samples() {
    let dir = std::env::temp_dir().join(format!("hartool-csv-{}", std::process::id()));
    let out = run_with(&cfg(json!({ "inequality_id": "lem41", "grid_sizes": [32, 64] })), RunOptions { witnesses: false, keep_samples: true }).unwrap();
    write_csv(&out, &dir).unwrap();
    for n in [32, 64] {
        let text = std::fs::read_to_string(dir.join(format!("lem41_N{n}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "variant,series,case,point,cube_corner,cube_side,lhs,rhs");
        assert_eq!(lines.count(), out.samples[&n].len());
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn suites_are_deterministic() {
    let specs = [
        SuiteSpec::Indicator { count: 3, support: None },
        SuiteSpec::Step { count: 3, support: None },
        SuiteSpec::Gaussian { count: 2, support: None },
        SuiteSpec::NoiseWeight { count: 2, amplitude: 1.0 },
    ];
    for dim in [1, 2] {
        let a = generate_suite(&specs, 9, 0, dim).unwrap();
        let b = generate_suite(&specs, 9, 0, dim).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(a, generate_suite(&specs, 10, 0, dim).unwrap());
        assert_ne!(a, generate_suite(&specs, 9, 1, dim).unwrap());
    }
}

#[test]
fn suite_members_have_their_defining_properties() {
    let grid = Grid::unit(1, 256).unwrap();
    let specs = [SuiteSpec::Indicator { count: 8, support: None }, SuiteSpec::Step { count: 8, support: None }];
    for m in generate_suite(&specs, 3, 0, 1).unwrap() {
        let f = m.sample(&grid).unwrap();
        match &m.shape {
            Shape::Box { lo, hi } => {
                let integral: f64 = f.values().iter().sum::<f64>() * grid.cell_volume();
                assert!((integral - (hi[0] - lo[0])).abs() < 1e-12);
            }
            Shape::Step { .. } => {
                let mut v: Vec<f64> = f.values().to_vec();
                v.sort_by(f64::total_cmp);
                v.dedup();
                assert!(v.len() >= 3);
            }
            _ => unreachable!(),
        }
    }
    let weights = [SuiteSpec::PowerWeight { count: 5, support: None }, SuiteSpec::NoiseWeight { count: 5, amplitude: 2.0 }];
    for dim in [1, 2] {
        let g = Grid::unit(dim, 32).unwrap();
        for m in generate_suite(&weights, 5, 1, dim).unwrap() {
            assert!(m.sample(&g).unwrap().values().iter().all(|&x| x > 0.0 && x.is_finite()));
        }
    }
}

#[test]
fn median_decay_flags() {
    let grid = Grid::unit(1, 256).unwrap();
    let riesz = KernelSpec::Riesz { gamma: 0.5 };
    let zero = hartool_core::geometry::SampledFunction::constant(&grid, 0.0);
    let z = median_decay_check(&riesz, &zero, 0.75).unwrap();
    assert!(z.flag && z.medians.iter().all(|&(_, m)| m == 0.0));
    let bump = hartool_core::geometry::SampledFunction::from_fn(&grid, |x| (-(x[0] - 0.5).powi(2) / 0.001).exp()).unwrap();
    let b = median_decay_check(&riesz, &bump, 0.75).unwrap();
    assert!(b.flag, "{b:?}");
    assert!(b.medians.windows(2).all(|w| w[1].1 < w[0].1));
    let one = hartool_core::geometry::SampledFunction::constant(&grid, 1.0);
    let c = median_decay_check(&riesz, &one, 0.75).unwrap();
    assert!(!c.flag, "{c:?}");
    assert_eq!(b.medians.last().unwrap().0, Cube::whole(&grid).side());
}

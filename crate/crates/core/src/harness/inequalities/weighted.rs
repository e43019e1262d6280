use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::*;
use crate::geometry::FamilyKind;
use crate::harness::decay::median_decay;
use crate::harness::registry::{functions, member, pair_label, sample_all, split_pair, weights, Check, GridRun, Sample};
use crate::maximal::{median, median_sorted};
use crate::operators::apply_spec;
use crate::weights::{condition_f_constant, ConditionFParams};
use crate::young::Gauge;

const DEFAULT_T_SCAN: [f64; 4] = [0.55, 0.65, 0.75, 0.85];

struct WeightedParams {
    gamma: f64,
    r: f64,
    kernel: KernelSpec,
    phi: YoungFunction,
    rule: VRule,
}

fn params(cfg: &ExperimentConfig) -> WeightedParams {
    let kernel = cfg.kernel_or_riesz(cfg.gamma_or(0.5));
    WeightedParams {
        gamma: kernel.gamma(),
        r: cfg.r.unwrap_or(1.0),
        kernel,
        phi: cfg.gauge("Phi", YoungFunction::Linear(1.0)),
        rule: cfg.v_rule.unwrap_or(VRule::Mw),
    }
}

fn validate_weighted(cfg: &ExperimentConfig) -> Result<()> {
    let p = params(cfg);
    check_gamma(p.gamma)?;
    check_r(p.gamma, p.r)?;
    check_dini(cfg, &p.kernel)?;
    p.phi.validate()?;
    if p.rule == VRule::Mw && p.phi.power_exponent() != Some(1.0) {
        return Err(hypothesis("v = Mw needs Phi(u) = u", format!("Phi is {}", p.phi.label())));
    }
    Ok(())
}

/// A function-weight pair evaluated on one grid.
struct Pair {
    label: String,
    w: SampledFunction,
    v: SampledFunction,
}

fn pairs(cfg: &ExperimentConfig, grid: &Grid, rule: VRule, family: &CubeFamily) -> Result<Vec<Pair>> {
    let mut out = Vec::new();
    for (label, w) in sample_all(&weights(cfg, WEIGHTS_10)?, grid)? {
        check_weight(&label, &w)?;
        let v = second_weight(rule, &w, family)?;
        out.push(Pair { label, w, v });
    }
    Ok(out)
}

fn lookup_pair(cfg: &ExperimentConfig, grid: &Grid, rule: VRule, family: &CubeFamily, w_label: &str) -> Result<Pair> {
    let w = member(&weights(cfg, WEIGHTS_10)?, w_label)?.sample(grid)?;
    let v = second_weight(rule, &w, family)?;
    Ok(Pair { label: w_label.to_string(), w, v })
}

fn weighted_integral(grid: &Grid, phi: &dyn Gauge, g: &[f64], shift: f64, weight: &SampledFunction) -> f64 {
    integral(grid, g.iter().zip(weight.values()).map(|(x, w)| phi.value((x - shift).abs()) * w))
}

/// `int_{Q0} Phi(|Tf - m_{Tf}(t, Q0)|) w <= c int_{Q0} Phi(M_{gamma,r} f) v`, scanned over `t`.
pub struct Thm31;

impl Thm31 {
    fn t_scan(cfg: &ExperimentConfig) -> Vec<f64> {
        match (&cfg.t_scan, cfg.t) {
            (Some(s), _) => s.clone(),
            (None, Some(t)) => vec![t],
            (None, None) => DEFAULT_T_SCAN.to_vec(),
        }
    }

    fn condition_f_params(cfg: &ExperimentConfig) -> Result<ConditionFParams> {
        ConditionFParams::new(cfg.alpha.unwrap_or(0.5), cfg.beta.unwrap_or(1.0))
    }
}

impl Inequality for Thm31 {
    fn id(&self) -> &'static str {
        "thm31"
    }

    fn summary(&self) -> &'static str {
        "int_{Q0} Phi(|Tf - m_{Tf}(t, Q0)|) w against int_{Q0} Phi(M_{gamma,r} f) v"
    }

    fn required(&self) -> &'static [&'static str] {
        &[
            "gamma (0.5)",
            "r (1)",
            "gauges.Phi (t)",
            "v_rule (mw)",
            "t_scan ([0.55, 0.65, 0.75, 0.85])",
            "alpha, beta (0.5, 1) for condition F diagnostics",
        ]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        validate_weighted(cfg)?;
        let ts = Self::t_scan(cfg);
        if ts.is_empty() {
            return Err(config("t_scan must not be empty"));
        }
        for t in ts {
            check_t(t)?;
        }
        Self::condition_f_params(cfg)?;
        Ok(())
    }

    fn variants(&self, cfg: &ExperimentConfig) -> Vec<String> {
        Self::t_scan(cfg).iter().map(|t| format!("t={t}")).collect()
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let p = params(cfg);
        let ts = Self::t_scan(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        let ps = pairs(cfg, grid, p.rule, &fam)?;
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_10)?, grid)? {
            let tf = apply_spec(&p.kernel, &f)?;
            let mut sorted = tf.values().to_vec();
            sorted.sort_by(f64::total_cmp);
            let meds: Vec<f64> = ts.iter().map(|&t| median_sorted(&sorted, t)).collect();
            let m = m_gamma_r(&f, p.gamma, p.r, &fam)?;
            for pair in &ps {
                let rhs = weighted_integral(grid, &p.phi, m.values(), 0.0, &pair.v);
                for (vi, med) in meds.iter().enumerate() {
                    let lhs = weighted_integral(grid, &p.phi, tf.values(), *med, &pair.w);
                    run.single(vi, "main", &pair_label(&label, &pair.label), Some(Cube::whole(grid)), lhs, rhs);
                }
            }
        }
        if is_coarsest(cfg, grid) {
            let cf = Self::condition_f_params(cfg)?;
            let dy = CubeFamily::dyadic(grid.clone());
            let mut diag = BTreeMap::new();
            for pair in &ps {
                let c = condition_f_constant(&pair.w, &pair.v, cf, &dy)?;
                diag.insert(pair.label.clone(), c.c_emp);
            }
            run.note("condition_f", &diag);
        }
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let p = params(cfg);
        let t = Self::t_scan(cfg)[s.variant];
        let fam = cfg.family(grid, FamilyKind::default());
        let (fl, wl) = split_pair(&s.case)?;
        let f = member(&functions(cfg, FUNCTIONS_10)?, fl)?.sample(grid)?;
        let pair = lookup_pair(cfg, grid, p.rule, &fam, wl)?;
        let tf = apply_spec(&p.kernel, &f)?;
        let med = median(&tf, t, &Cube::whole(grid));
        let m = m_gamma_r(&f, p.gamma, p.r, &fam)?;
        let lhs: Vec<f64> = tf.values().iter().zip(pair.w.values()).map(|(x, w)| p.phi.value((x - med).abs()) * w).collect();
        let rhs: Vec<f64> = m.values().iter().zip(pair.v.values()).map(|(x, v)| p.phi.value(x.abs()) * v).collect();
        Ok((
            crate::harness::probe::total_integral(grid, &lhs),
            crate::harness::probe::total_integral(grid, &rhs),
        ))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        let p = params(cfg);
        BTreeMap::from([
            ("v_rule".to_string(), json!(p.rule)),
            ("m_r_order".to_string(), json!(MRW_ORDER)),
            ("condition_f_family".to_string(), json!(FamilyKind::Dyadic.label())),
        ])
    }
}

/// `int Phi(|Tf|) w <= c int Phi(M_{gamma,r} f) v` for functions whose medians decay.
pub struct Eq33;

impl Eq33 {
    fn t(cfg: &ExperimentConfig) -> f64 {
        cfg.t.unwrap_or(0.75)
    }
}

impl Inequality for Eq33 {
    fn id(&self) -> &'static str {
        "eq33"
    }

    fn summary(&self) -> &'static str {
        "int Phi(|Tf|) w against int Phi(M_{gamma,r} f) v over the domain, for f with decaying medians"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "r (1)", "gauges.Phi (t)", "v_rule (mw)", "t (0.75) for the decay gate"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        validate_weighted(cfg)?;
        check_t(Self::t(cfg))
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let p = params(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        let ps = pairs(cfg, grid, p.rule, &fam)?;
        let mut run = GridRun::default();
        let mut gated = Vec::new();
        let mut passed = 0usize;
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_NARROW)?, grid)? {
            let tf = apply_spec(&p.kernel, &f)?;
            if !median_decay(&tf, Self::t(cfg)).flag {
                gated.push(label);
                continue;
            }
            passed += 1;
            let m = m_gamma_r(&f, p.gamma, p.r, &fam)?;
            for pair in &ps {
                let lhs = weighted_integral(grid, &p.phi, tf.values(), 0.0, &pair.w);
                let rhs = weighted_integral(grid, &p.phi, m.values(), 0.0, &pair.v);
                run.single(0, "main", &pair_label(&label, &pair.label), Some(Cube::whole(grid)), lhs, rhs);
            }
        }
        run.check("median_decay", Check::new(passed > 0, Some(passed as f64), "functions passing the median decay gate"));
        run.note("gated_out", &gated);
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let p = params(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        let (fl, wl) = split_pair(&s.case)?;
        let f = member(&functions(cfg, FUNCTIONS_NARROW)?, fl)?.sample(grid)?;
        let pair = lookup_pair(cfg, grid, p.rule, &fam, wl)?;
        let tf = apply_spec(&p.kernel, &f)?;
        let m = m_gamma_r(&f, p.gamma, p.r, &fam)?;
        let lhs: Vec<f64> = tf.values().iter().zip(pair.w.values()).map(|(x, w)| p.phi.value(x.abs()) * w).collect();
        let rhs: Vec<f64> = m.values().iter().zip(pair.v.values()).map(|(x, v)| p.phi.value(x.abs()) * v).collect();
        Ok((
            crate::harness::probe::total_integral(grid, &lhs),
            crate::harness::probe::total_integral(grid, &rhs),
        ))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        BTreeMap::from([
            ("v_rule".to_string(), json!(params(cfg).rule)),
            ("decay_gate_t".to_string(), json!(Self::t(cfg))),
        ])
    }
}

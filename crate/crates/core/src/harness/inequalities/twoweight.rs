use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::pointwise::SUMMABILITY_TERMS;
use super::*;
use crate::geometry::FamilyKind;
use crate::harness::decay::median_decay;
use crate::harness::probe;
use crate::harness::registry::{functions, member, pair_label, sample_all, split_pair, weights, Check, GridRun, Sample};
use crate::operators::{apply_spec, omega_lambda};
use crate::weights::{bump_condition, bump_value, BumpExponents};
use crate::young::{bump_norm, tail_divergent, Conjugate, Gauge};

struct TwoWeight {
    p: f64,
    q: f64,
    r: f64,
    gamma: f64,
    a: YoungFunction,
    b: YoungFunction,
    rule: VRule,
}

fn params(cfg: &ExperimentConfig) -> TwoWeight {
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(4.0);
    let r = cfg.r.unwrap_or(1.0);
    TwoWeight {
        p,
        q,
        r,
        gamma: cfg.gamma_or(0.25),
        a: cfg.gauge("A", YoungFunction::Power(q + 1.0)),
        b: cfg.gauge("B", YoungFunction::Power(conjugate_exponent(p / r) + 1.0)),
        rule: cfg.v_rule.unwrap_or(VRule::W),
    }
}

impl TwoWeight {
    fn exponents(&self) -> Result<BumpExponents> {
        if !(self.r < self.p && self.p < self.q) {
            return Err(hypothesis("r < p < q", format!("r = {}, p = {}, q = {}", self.r, self.p, self.q)));
        }
        check_r(self.gamma, self.r)?;
        BumpExponents::new(self.p, self.q, self.r, self.gamma)
    }
}

fn weight_pairs(cfg: &ExperimentConfig, grid: &Grid, rule: VRule) -> Result<Vec<(String, SampledFunction, SampledFunction)>> {
    let fam = CubeFamily::all(grid.clone());
    let mut out = Vec::new();
    for (label, w) in sample_all(&weights(cfg, WEIGHTS_10)?, grid)? {
        check_weight(&label, &w)?;
        let v = second_weight(rule, &w, &fam)?;
        out.push((label, w, v));
    }
    Ok(out)
}

fn weight_pair(cfg: &ExperimentConfig, grid: &Grid, rule: VRule, label: &str) -> Result<(SampledFunction, SampledFunction)> {
    let w = member(&weights(cfg, WEIGHTS_10)?, label)?.sample(grid)?;
    let v = second_weight(rule, &w, &CubeFamily::all(grid.clone()))?;
    Ok((w, v))
}

/// The two-weight bump condition, reported as a constant against 1.
pub struct Eq45Check;

impl Inequality for Eq45Check {
    fn id(&self) -> &'static str {
        "eq45_check"
    }

    fn summary(&self) -> &'static str {
        "sup_Q |Q|^{gamma r + r/q - r/p} ||w^{r/q}||_{A,Q} ||v^{-r/p}||_{B,Q} over the weight suite"
    }

    fn required(&self) -> &'static [&'static str] {
        &["p (2)", "q (4)", "r (1)", "gamma (0.25)", "gauges.A (t^{q+1})", "gauges.B (t^{(p/r)'+1})", "v_rule (w)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let t = params(cfg);
        check_gamma(t.gamma)?;
        t.exponents()?;
        t.a.validate()?;
        t.b.validate()
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let t = params(cfg);
        let e = t.exponents()?;
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let mut run = GridRun::default();
        for (label, w, v) in weight_pairs(cfg, grid, t.rule)? {
            let b = bump_condition(&w, &v, &t.a, &t.b, e, &fam)?;
            run.single(0, "main", &label, b.cube, b.value, 1.0);
        }
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let t = params(cfg);
        let e = t.exponents()?;
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let (w, v) = weight_pair(cfg, grid, t.rule, &s.case)?;
        let (value, _) = probe::family_sup(&fam, |q| bump_value(&w, &v, &t.a, &t.b, e, q));
        Ok((value, 1.0))
    }
}

/// `(int |Tf|^q w)^{1/q} <= c (int |f|^p v)^{1/p}` under the bump condition.
pub struct Thm42;

impl Thm42 {
    fn kernel(cfg: &ExperimentConfig, gamma: f64) -> KernelSpec {
        cfg.kernel_or_riesz(gamma)
    }

    fn split(cfg: &ExperimentConfig, t: &TwoWeight) -> (f64, f64) {
        let alpha = 1.0 / t.p - 1.0 / t.q;
        match (cfg.alpha1, cfg.alpha2) {
            (Some(a1), Some(a2)) => (a1, a2),
            (Some(a1), None) => (a1, alpha - a1),
            (None, Some(a2)) => (alpha - a2, a2),
            (None, None) => (alpha, 0.0),
        }
    }

    fn t(cfg: &ExperimentConfig) -> f64 {
        cfg.t.unwrap_or(0.75)
    }
}

fn bump_class(name: &'static str, g: &dyn Gauge, alpha: f64, p: f64) -> Result<()> {
    let b = bump_norm(g, alpha, p).map_err(|e| hypothesis(name, e.to_string()))?;
    if b.divergent || !b.value.is_finite() {
        return Err(hypothesis(name, format!("{} fails the bump integral with alpha = {alpha}, p = {p}", g.label())));
    }
    Ok(())
}

impl Inequality for Thm42 {
    fn id(&self) -> &'static str {
        "thm42"
    }

    fn summary(&self) -> &'static str {
        "(int |Tf|^q w)^{1/q} against (int |f|^p v)^{1/p} for weights satisfying the two-weight bump condition"
    }

    fn required(&self) -> &'static [&'static str] {
        &[
            "p (2)",
            "q (4)",
            "r (1)",
            "gamma (0.25)",
            "alpha1, alpha2 (1/p - 1/q, 0)",
            "gauges.A (t^{q+1})",
            "gauges.B (t^{(p/r)'+1})",
            "kernel (riesz)",
            "v_rule (w)",
            "t (0.75) for the decay gate",
        ]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let t = params(cfg);
        check_gamma(t.gamma)?;
        t.exponents()?;
        t.a.validate()?;
        t.b.validate()?;
        let alpha = 1.0 / t.p - 1.0 / t.q;
        let (a1, a2) = Self::split(cfg, &t);
        if (a1 + a2 - alpha).abs() > 1e-9 || a1 < 0.0 || a2 < 0.0 {
            return Err(hypothesis(
                "alpha = 1/p - 1/q = alpha1 + alpha2",
                format!("alpha = {alpha}, alpha1 = {a1}, alpha2 = {a2}"),
            ));
        }
        let k = Self::kernel(cfg, t.gamma);
        check_dini(cfg, &k)?;
        let abar = Conjugate(t.a);
        let bbar = Conjugate(t.b);
        bump_class("conj(A) in B_{(q/r)'}", &abar, 0.0, conjugate_exponent(t.q / t.r))?;
        bump_class("conj(A) in B^{alpha2}_{q'}", &abar, a2, conjugate_exponent(t.q))?;
        bump_class("conj(B) in B^{alpha1 r}_{p/r}", &bbar, a1 * t.r, t.p / t.r)?;
        let w = k.modulus().expect("checked by check_dini");
        let lam = omega_lambda(&w, SUMMABILITY_TERMS, cfg.c_n())?;
        let n = cfg.dim as f64;
        let terms: Vec<f64> = lam
            .values
            .iter()
            .enumerate()
            .map(|(m, l)| l * 2f64.powf((m + 1) as f64 * n / t.q))
            .collect();
        if tail_divergent(&terms) {
            return Err(hypothesis("sum_m lambda_m 2^{mn/q} < inf", "the weighted coefficients do not decay"));
        }
        check_t(Self::t(cfg))
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let t = params(cfg);
        let e = t.exponents()?;
        let k = Self::kernel(cfg, t.gamma);
        let pairs = weight_pairs(cfg, grid, t.rule)?;
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let mut run = GridRun::default();
        let mut worst = 0.0f64;
        let mut bumps = BTreeMap::new();
        for (label, w, v) in &pairs {
            let b = bump_condition(w, v, &t.a, &t.b, e, &fam)?;
            worst = worst.max(b.value);
            bumps.insert(label.clone(), b.value);
        }
        run.check(
            "bump_condition",
            Check::new(worst.is_finite(), Some(worst), "largest two-weight bump constant over the weight suite"),
        );
        run.note("bump_constants", &bumps);
        let mut gated = Vec::new();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_NARROW)?, grid)? {
            let tf = apply_spec(&k, &f)?;
            if !median_decay(&tf, Self::t(cfg)).flag {
                gated.push(label);
                continue;
            }
            for (wl, w, v) in &pairs {
                let lhs = integral(grid, tf.values().iter().zip(w.values()).map(|(x, w)| x.abs().powf(t.q) * w)).powf(1.0 / t.q);
                let rhs = integral(grid, f.values().iter().zip(v.values()).map(|(x, v)| x.abs().powf(t.p) * v)).powf(1.0 / t.p);
                run.single(0, "main", &pair_label(&label, wl), Some(Cube::whole(grid)), lhs, rhs);
            }
        }
        run.note("gated_out", &gated);
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let t = params(cfg);
        let k = Self::kernel(cfg, t.gamma);
        let (fl, wl) = split_pair(&s.case)?;
        let f = member(&functions(cfg, FUNCTIONS_NARROW)?, fl)?.sample(grid)?;
        let (w, v) = weight_pair(cfg, grid, t.rule, wl)?;
        let tf = apply_spec(&k, &f)?;
        let lhs: Vec<f64> = tf.values().iter().zip(w.values()).map(|(x, w)| x.abs().powf(t.q) * w).collect();
        let rhs: Vec<f64> = f.values().iter().zip(v.values()).map(|(x, v)| x.abs().powf(t.p) * v).collect();
        Ok((
            probe::total_integral(grid, &lhs).powf(1.0 / t.q),
            probe::total_integral(grid, &rhs).powf(1.0 / t.p),
        ))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        let t = params(cfg);
        let (a1, a2) = Self::split(cfg, &t);
        BTreeMap::from([
            ("alpha1".to_string(), json!(a1)),
            ("alpha2".to_string(), json!(a2)),
            ("gauge_A".to_string(), json!(t.a)),
            ("gauge_B".to_string(), json!(t.b)),
            ("v_rule".to_string(), json!(t.rule)),
        ])
    }
}

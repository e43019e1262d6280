use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::*;
use crate::geometry::FamilyKind;
use crate::harness::config::OperatorChoice;
use crate::harness::probe;
use crate::harness::registry::{functions, member, sample_all, Check, GridRun, Sample};
use crate::operators::apply_spec;
use crate::spaces::{best_constant, campanato_seminorm, check_matched, compat_52, compat_53, gauge_inverse, matched_exponent, morrey_norm, morrey_term, prop51_gap};
use crate::young::MorreyWeight;

/// `M_gamma f` on the whole domain over all grid-aligned cubes.
fn m_gamma(f: &SampledFunction, gamma: f64) -> Result<SampledFunction> {
    m_gamma_r(f, gamma, 1.0, &CubeFamily::all(f.grid().clone()))
}

struct Gauges {
    gamma: f64,
    phi: YoungFunction,
    psi: YoungFunction,
}

fn gauges(cfg: &ExperimentConfig) -> Gauges {
    let gamma = cfg.gamma_or(0.25);
    let p = cfg.p.unwrap_or(2.0);
    let psi_default = matched_exponent(p, gamma).map(YoungFunction::Power).unwrap_or(YoungFunction::Power(p));
    Gauges {
        gamma,
        phi: cfg.gauge("Phi", YoungFunction::Power(p)),
        psi: cfg.gauge("Psi", psi_default),
    }
}

fn validate_gauges(cfg: &ExperimentConfig) -> Result<Gauges> {
    let g = gauges(cfg);
    check_gamma(g.gamma)?;
    matched_exponent(cfg.p.unwrap_or(2.0), g.gamma)?;
    check_matched(&g.phi, &g.psi, g.gamma)?;
    Ok(g)
}

/// `sup_Q` of a Morrey-type term, scanned cube by cube.
fn scan(family: &CubeFamily, term: impl Fn(&Cube) -> f64) -> f64 {
    probe::family_sup(family, term).0
}

/// Both local estimates of `||M_gamma f||_{Psi, Q}` on random cubes.
pub struct Prop51;

impl Prop51 {
    fn c_n(cfg: &ExperimentConfig) -> f64 {
        cfg.c_n.unwrap_or(2.0)
    }

    fn cd(cfg: &ExperimentConfig) -> f64 {
        Self::c_n(cfg) * cfg.d_n()
    }

    fn cubes(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<Cube>> {
        random_cubes(cfg, grid, cfg.cubes.unwrap_or(10), 8)
    }
}

impl Inequality for Prop51 {
    fn id(&self) -> &'static str {
        "prop51"
    }

    fn summary(&self) -> &'static str {
        "||M_gamma f||_{Psi,Q} against the two local bounds with sup over t >= c_n d_n l"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.25)", "p (2)", "gauges.Phi (t^p)", "gauges.Psi (matched power)", "c_n (2)", "d_n (2 sqrt(n))", "cubes (10)"]
    }

    fn series(&self) -> &'static [&'static str] {
        &["ii", "i"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        validate_gauges(cfg)?;
        let cd = Self::cd(cfg);
        if !(cd >= 1.0) {
            return Err(hypothesis("c_n d_n >= 1", format!("got {cd}")));
        }
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let g = gauges(cfg);
        let cubes = Self::cubes(cfg, grid)?;
        let mut run = GridRun::default();
        let mut beyond = 0usize;
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_10)?, grid)? {
            let mg = m_gamma(&f, g.gamma)?;
            for q in &cubes {
                let gap = prop51_gap(&f, &mg, &g.phi, &g.psi, g.gamma, q, Self::cd(cfg))?;
                if gap.beyond_grid {
                    beyond += 1;
                    continue;
                }
                run.single(0, "ii", &label, Some(*q), gap.lhs, gap.rhs_ii);
                run.single(0, "i", &label, Some(*q), gap.lhs, gap.rhs_i);
            }
        }
        run.note("beyond_grid", beyond);
        run.note("cubes", &cubes);
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let g = gauges(cfg);
        let q = cube(s)?;
        let f = member(&functions(cfg, FUNCTIONS_10)?, &s.case)?.sample(grid)?;
        let mg = m_gamma(&f, g.gamma)?;
        let gap = prop51_gap(&f, &mg, &g.phi, &g.psi, g.gamma, &q, Self::cd(cfg))?;
        Ok((gap.lhs, if s.series == "i" { gap.rhs_i } else { gap.rhs_ii }))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        BTreeMap::from([
            ("c_n".to_string(), json!(Self::c_n(cfg))),
            ("c_n_d_n".to_string(), json!(Self::cd(cfg))),
        ])
    }
}

/// Morrey data `(phi, psi)` for the Morrey inequalities.
fn morrey_pair(cfg: &ExperimentConfig, default_psi: impl Fn(&MorreyWeight) -> Result<MorreyWeight>) -> Result<(MorreyWeight, MorreyWeight)> {
    let phi = match cfg.morrey_weight("phi") {
        Some(w) => w,
        None => MorreyWeight::power_law(-0.5)?,
    };
    let psi = match cfg.morrey_weight("psi") {
        Some(w) => w,
        None => default_psi(&phi)?,
    };
    Ok((phi, psi))
}

fn lifted_psi(phi: &MorreyWeight, n_gamma: f64) -> Result<MorreyWeight> {
    match phi.exponent() {
        Some(s) if s + n_gamma < 0.0 => MorreyWeight::power_law(s + n_gamma),
        Some(_) => MorreyWeight::constant(1.0),
        None => Err(config("a tabulated phi needs an explicit psi")),
    }
}

/// `||M_gamma f||_{M^{Psi,psi}} <= c ||f||_{M^{Phi,phi}}` when `sup_{t > r} t^{n gamma} phi(t) <= c psi(r)`.
pub struct Thm52;

impl Thm52 {
    fn data(cfg: &ExperimentConfig) -> Result<(Gauges, MorreyWeight, MorreyWeight)> {
        let g = gauges(cfg);
        let ng = cfg.dim as f64 * g.gamma;
        let (phi, psi) = morrey_pair(cfg, |phi| lifted_psi(phi, ng))?;
        Ok((g, phi, psi))
    }
}

impl Inequality for Thm52 {
    fn id(&self) -> &'static str {
        "thm52"
    }

    fn summary(&self) -> &'static str {
        "||M_gamma f|| in M^{Psi,psi} against ||f|| in M^{Phi,phi} for compatible Morrey weights"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.25)", "p (2)", "gauges.Phi (t^p)", "gauges.Psi (matched power)", "morrey.phi (t^-0.5)", "morrey.psi (t^{sigma + n gamma})"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        validate_gauges(cfg)?;
        Self::data(cfg)?;
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let (g, phi, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::default());
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_10)?, grid)? {
            let mg = m_gamma(&f, g.gamma)?;
            let lhs = morrey_norm(&mg, &g.psi, &psi, &fam)?;
            let rhs = morrey_norm(&f, &g.phi, &phi, &fam)?;
            run.single(0, "main", &label, lhs.cube, lhs.value, rhs.value);
        }
        let c = compat_52(&phi, &psi, g.gamma, grid);
        run.check(
            "compatibility",
            Check::new(!c.incompatible && c.value.is_finite(), Some(c.value), format!("sup_(r <= t) t^(n gamma) phi(t) / psi(r), attained at r = {}, t = {}", c.r, c.t)),
        );
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let (g, phi, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::default());
        let f = member(&functions(cfg, FUNCTIONS_10)?, &s.case)?.sample(grid)?;
        let mg = m_gamma(&f, g.gamma)?;
        Ok((
            scan(&fam, |q| morrey_term(&mg, &g.psi, &psi, q, 0.0)),
            scan(&fam, |q| morrey_term(&f, &g.phi, &phi, q, 0.0)),
        ))
    }
}

/// `||S f||_{M^{Psi,psi}} <= c ||f||_{M^{Phi,phi}}` for `S = M_gamma` or `I_gamma`.
pub struct Thm53;

impl Thm53 {
    fn data(cfg: &ExperimentConfig) -> Result<(Gauges, MorreyWeight, MorreyWeight)> {
        let g = gauges(cfg);
        let (phi, psi) = morrey_pair(cfg, |_| MorreyWeight::constant(1.0))?;
        Ok((g, phi, psi))
    }

    fn operator(cfg: &ExperimentConfig) -> OperatorChoice {
        cfg.operator.unwrap_or(OperatorChoice::MGamma)
    }

    fn apply(cfg: &ExperimentConfig, f: &SampledFunction, gamma: f64) -> Result<SampledFunction> {
        match Self::operator(cfg) {
            OperatorChoice::MGamma => m_gamma(f, gamma),
            OperatorChoice::IGamma => apply_spec(&KernelSpec::Riesz { gamma }, f),
        }
    }
}

impl Inequality for Thm53 {
    fn id(&self) -> &'static str {
        "thm53"
    }

    fn summary(&self) -> &'static str {
        "||S f|| in M^{Psi,psi} against ||f|| in M^{Phi,phi} for S = M_gamma or I_gamma"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.25)", "p (2)", "operator (m_gamma)", "morrey.phi (t^-0.5)", "morrey.psi (1)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        validate_gauges(cfg)?;
        Self::data(cfg)?;
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let (g, phi, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::default());
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_10)?, grid)? {
            let sf = Self::apply(cfg, &f, g.gamma)?;
            let lhs = morrey_norm(&sf, &g.psi, &psi, &fam)?;
            let rhs = morrey_norm(&f, &g.phi, &phi, &fam)?;
            run.single(0, "main", &label, lhs.cube, lhs.value, rhs.value);
        }
        let c = compat_53(&phi, &psi, grid);
        run.check(
            "compatibility",
            Check::new(c.value.is_finite(), Some(c.value), format!("sup_l psi(l) int_l^D dt / (t phi(t)), attained at l = {}", c.r)),
        );
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let (g, phi, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::default());
        let f = member(&functions(cfg, FUNCTIONS_10)?, &s.case)?.sample(grid)?;
        let sf = Self::apply(cfg, &f, g.gamma)?;
        Ok((
            scan(&fam, |q| morrey_term(&sf, &g.psi, &psi, q, 0.0)),
            scan(&fam, |q| morrey_term(&f, &g.phi, &phi, q, 0.0)),
        ))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        BTreeMap::from([("operator".to_string(), json!(Self::operator(cfg)))])
    }
}

/// `||Tf||` in the Campanato seminorm against `||M_gamma f||` in the Morrey norm.
pub struct Eq19;

impl Eq19 {
    fn data(cfg: &ExperimentConfig) -> Result<(KernelSpec, YoungFunction, MorreyWeight)> {
        let k = cfg.kernel_or_riesz(cfg.gamma_or(0.5));
        let psi_gauge = cfg.gauge("Psi", YoungFunction::Power(2.0));
        let psi = match cfg.morrey_weight("psi") {
            Some(w) => w,
            None => MorreyWeight::power_law(-0.5)?,
        };
        Ok((k, psi_gauge, psi))
    }
}

impl Inequality for Eq19 {
    fn id(&self) -> &'static str {
        "eq19"
    }

    fn summary(&self) -> &'static str {
        "||Tf|| in L^{Psi,psi} (Campanato) against ||M_gamma f|| in M^{Psi,psi} (Morrey)"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "kernel (riesz)", "gauges.Psi (t^2)", "morrey.psi (t^-0.5)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let (k, psi_gauge, _) = Self::data(cfg)?;
        check_gamma(k.gamma())?;
        check_dini(cfg, &k)?;
        psi_gauge.validate()
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let (k, psi_gauge, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_10)?, grid)? {
            let tf = apply_spec(&k, &f)?;
            let mg = m_gamma(&f, k.gamma())?;
            let lhs = campanato_seminorm(&tf, &psi_gauge, &psi, &fam)?;
            let rhs = morrey_norm(&mg, &psi_gauge, &psi, &fam)?;
            run.single(0, "main", &label, lhs.cube, lhs.value, rhs.value);
        }
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let (k, psi_gauge, psi) = Self::data(cfg)?;
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let f = member(&functions(cfg, FUNCTIONS_10)?, &s.case)?.sample(grid)?;
        let tf = apply_spec(&k, &f)?;
        let mg = m_gamma(&f, k.gamma())?;
        let lhs = scan(&fam, |q| {
            let (_, norm) = best_constant(&tf, &psi_gauge, q);
            gauge_inverse(&psi_gauge, 1.0 / q.measure(grid)) * norm / psi.value(q.side_length(grid))
        });
        Ok((lhs, scan(&fam, |q| morrey_term(&mg, &psi_gauge, &psi, q, 0.0))))
    }
}

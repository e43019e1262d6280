use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::*;
use crate::geometry::FamilyKind;
use crate::harness::probe;
use crate::harness::registry::{defined, functions, member, sample_all, Check, GridRun, Sample};
use crate::maximal::{lemma41_rhs, local_sharp_maximal, resample, sharp_median, sup_inf_maximal};
use crate::operators::{apply_kernel, apply_spec, hormander_lambda, omega_lambda, Coefficient, Homogeneous, LambdaSequence, SphereFunction};
use crate::harness::config::LambdaChoice;
use crate::young::{tail_divergent, Conjugate, ModulusOmega};

fn largest_ratio(lhs: &[Option<f64>], rhs: &[Option<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (l, r) in lhs.iter().zip(rhs) {
        if let (Some(l), Some(r)) = (l, r) {
            if *r > 0.0 {
                worst = worst.max(l / r);
            } else if *l > 0.0 {
                worst = f64::INFINITY;
            }
        }
    }
    worst
}

/// `M_gamma f <= n^{n(1-gamma)/2} I_gamma |f|` at every point.
pub struct Eq12;

impl Eq12 {
    fn gamma(cfg: &ExperimentConfig) -> f64 {
        cfg.gamma_or(0.5)
    }

    fn bound(dim: usize, gamma: f64) -> f64 {
        let n = dim as f64;
        n.powf(n * (1.0 - gamma) / 2.0)
    }
}

/// Slack on the explicit constant of the pointwise comparison.
pub const EQ12_SLACK: f64 = 1.05;

impl Inequality for Eq12 {
    fn id(&self) -> &'static str {
        "eq12"
    }

    fn summary(&self) -> &'static str {
        "M_gamma f(x) <= n^{n(1-gamma)/2} I_gamma(|f|)(x) at every grid point"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        check_gamma(Self::gamma(cfg))?;
        if let Some(k) = &cfg.kernel {
            if !matches!(k, KernelSpec::Riesz { .. }) {
                return Err(hypothesis("T is the Riesz potential", format!("got a {} kernel", k.variant())));
            }
        }
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let g = Self::gamma(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        let riesz = KernelSpec::Riesz { gamma: g }.build(grid.dim())?;
        let mut run = GridRun::default();
        let mut worst = 0.0f64;
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_20)?, grid)? {
            let lhs = fractional_maximal(&f, g, &YoungFunction::Linear(1.0), &fam)?.function;
            let rhs = defined(apply_kernel(riesz.as_ref(), &f.abs())?.values());
            worst = worst.max(largest_ratio(lhs.values(), &rhs));
            run.pointwise(0, "main", &label, lhs.values(), &rhs);
        }
        let bound = Self::bound(grid.dim(), g) * EQ12_SLACK;
        run.check(
            "explicit_constant",
            Check::new(worst <= bound, Some(worst), format!("largest ratio against n^(n(1-gamma)/2) * {EQ12_SLACK} = {bound}")),
        );
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let g = Self::gamma(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        let riesz = KernelSpec::Riesz { gamma: g }.build(grid.dim())?;
        let f = member(&functions(cfg, FUNCTIONS_20)?, &s.case)?.sample(grid)?;
        let cell = point(s)?;
        Ok((
            probe::fractional_at(&f, g, &YoungFunction::Linear(1.0), &fam, cell),
            probe::kernel_at(riesz.as_ref(), &f.abs(), cell),
        ))
    }

    fn metadata(&self, cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        let g = Self::gamma(cfg);
        BTreeMap::from([
            ("explicit_constant".to_string(), json!(Self::bound(cfg.dim, g))),
            ("slack".to_string(), json!(EQ12_SLACK)),
        ])
    }
}

struct SharpParams {
    gamma: f64,
    s: f64,
    r: f64,
    kernel: KernelSpec,
}

fn sharp_params(cfg: &ExperimentConfig, kernel: KernelSpec) -> SharpParams {
    SharpParams {
        gamma: kernel.gamma(),
        s: cfg.s.unwrap_or(0.5),
        r: cfg.r.unwrap_or(1.0),
        kernel,
    }
}

/// Pointwise samples of `M#_{0,s,Q0}(Tf)` against a maximal right-hand side, or its sup-inf
/// version on the whole domain when `cfg.local` is set.
fn sharp_run(
    cfg: &ExperimentConfig,
    grid: &Grid,
    p: &SharpParams,
    family: &CubeFamily,
    default: &[SuiteSpec],
    rhs: impl Fn(&SampledFunction) -> Result<SampledFunction>,
) -> Result<GridRun> {
    let whole = Cube::whole(grid);
    let k = p.kernel.build(grid.dim())?;
    let mut run = GridRun::default();
    for (label, f) in sample_all(&functions(cfg, default)?, grid)? {
        let tf = apply_kernel(k.as_ref(), &f)?;
        let lhs = local_sharp_maximal(&tf, p.s, &whole, family)?.function;
        let m = rhs(&f)?;
        let r = if cfg.local {
            sup_inf_maximal(&m, &whole, family)?.function.values().to_vec()
        } else {
            defined(m.values())
        };
        run.pointwise(0, "main", &label, lhs.values(), &r);
    }
    Ok(run)
}

fn sharp_reevaluate(
    cfg: &ExperimentConfig,
    grid: &Grid,
    p: &SharpParams,
    family: &CubeFamily,
    default: &[SuiteSpec],
    s: &Sample,
    rhs_at: impl Fn(&SampledFunction, usize) -> Result<f64>,
    rhs_full: impl Fn(&SampledFunction) -> Result<SampledFunction>,
) -> Result<(f64, f64)> {
    let whole = Cube::whole(grid);
    let f = member(&functions(cfg, default)?, &s.case)?.sample(grid)?;
    let cell = point(s)?;
    let tf = apply_spec(&p.kernel, &f)?;
    let lhs = probe::local_sharp_at(&tf, p.s, &whole, family, cell);
    let rhs = if cfg.local {
        probe::sup_inf_at(&rhs_full(&f)?, &whole, family, cell)
    } else {
        rhs_at(&f, cell)?
    };
    Ok((lhs, rhs))
}

/// `M#_{0,s,Q0}(Tf)(x) <= c sup_{x in Q in Q0} inf_Q M_{gamma,r} f` for Dini-smooth kernels.
pub struct Thm21;

impl Thm21 {
    fn params(cfg: &ExperimentConfig) -> SharpParams {
        sharp_params(cfg, cfg.kernel_or_riesz(cfg.gamma_or(0.5)))
    }
}

impl Inequality for Thm21 {
    fn id(&self) -> &'static str {
        "thm21"
    }

    fn summary(&self) -> &'static str {
        "M#_{0,s,Q0}(Tf) against M_{gamma,r} f for kernels with a Dini modulus"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "s (0.5)", "r (1)", "kernel (riesz)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let p = Self::params(cfg);
        check_gamma(p.gamma)?;
        check_s(p.s)?;
        check_r(p.gamma, p.r)?;
        check_dini(cfg, &p.kernel)
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let p = Self::params(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        sharp_run(cfg, grid, &p, &fam, FUNCTIONS_12, |f| m_gamma_r(f, p.gamma, p.r, &fam))
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let p = Self::params(cfg);
        let fam = cfg.family(grid, FamilyKind::default());
        sharp_reevaluate(
            cfg,
            grid,
            &p,
            &fam,
            FUNCTIONS_12,
            s,
            |f, cell| Ok(probe::fractional_at(f, p.gamma, &YoungFunction::Power(p.r), &fam, cell)),
            |f| m_gamma_r(f, p.gamma, p.r, &fam),
        )
    }
}

/// `M#_{0,s,Q0}(Tf)(x) <= c sup_{x in Q in Q0} inf_Q M_{gamma,conj(A)} f` under a Hormander condition.
pub struct Thm22;

impl Thm22 {
    fn default_kernel(dim: usize, gamma: f64) -> KernelSpec {
        let sphere = if dim == 1 {
            SphereFunction::OneD { plus: 1.0, minus: -1.0 }
        } else {
            SphereFunction::TwoD {
                cos: vec![1.0],
                sin: Vec::new(),
            }
        };
        KernelSpec::Dini {
            sphere,
            modulus: ModulusOmega::Holder(1.0),
            gamma,
        }
    }

    fn params(cfg: &ExperimentConfig) -> SharpParams {
        let k = cfg.kernel.clone().unwrap_or_else(|| Self::default_kernel(cfg.dim, cfg.gamma_or(0.5)));
        sharp_params(cfg, k)
    }

    fn gauge(cfg: &ExperimentConfig) -> YoungFunction {
        cfg.gauge("A", YoungFunction::Power(2.0))
    }
}

/// Central cube of side `N / 8` on which the Hormander sums are evaluated.
fn central_cube(grid: &Grid) -> Result<Cube> {
    let n = grid.cells_per_side();
    let side = (n / 8).max(1);
    Cube::new(&vec![(n - side) / 2; grid.dim()], side)
}

impl Inequality for Thm22 {
    fn id(&self) -> &'static str {
        "thm22"
    }

    fn summary(&self) -> &'static str {
        "M#_{0,s,Q0}(Tf) against M_{gamma,conj(A)} f for kernels satisfying a Hormander condition"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "s (0.5)", "gauges.A (t^2)", "kernel (odd Dini kernel)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let p = Self::params(cfg);
        check_gamma(p.gamma)?;
        check_s(p.s)?;
        p.kernel.build(cfg.dim)?;
        Self::gauge(cfg).validate()
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let p = Self::params(cfg);
        let a = Self::gauge(cfg);
        let abar = Conjugate(a);
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        let mut run = sharp_run(cfg, grid, &p, &fam, FUNCTIONS_12, |f| {
            Ok(fractional_maximal(f, p.gamma, &abar, &fam)?.function.extend(0.0))
        })?;
        let k = p.kernel.build(grid.dim())?;
        let q = central_cube(grid)?;
        let lam = hormander_lambda(k.as_ref(), grid, &q, covering_depth(grid, &q), &a, cfg.seed)?;
        let total: f64 = lam.values.iter().sum();
        let ok = total.is_finite() && !tail_divergent(&lam.values);
        run.check("hormander_condition", Check::new(ok, Some(total), format!("sum of {} annulus terms on the central cube", lam.len())));
        run.note("hormander_lambda", &lam);
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let p = Self::params(cfg);
        let abar = Conjugate(Self::gauge(cfg));
        let fam = cfg.family(grid, FamilyKind::Dyadic);
        sharp_reevaluate(
            cfg,
            grid,
            &p,
            &fam,
            FUNCTIONS_12,
            s,
            |f, cell| Ok(probe::fractional_at(f, p.gamma, &abar, &fam, cell)),
            |f| Ok(fractional_maximal(f, p.gamma, &abar, &fam)?.function.extend(0.0)),
        )
    }
}

/// `M#_{0,s,Q0}(Tf)(x) <= c sum_i sup_{x in Q in Q0} inf_{y in Q} M_gamma f(A_i^{-1} y)` for homogeneous kernels.
pub struct Thm23;

impl Thm23 {
    fn kernel(cfg: &ExperimentConfig) -> KernelSpec {
        if let Some(k) = &cfg.kernel {
            return k.clone();
        }
        let gamma = cfg.gamma_or(0.5);
        let e = cfg.dim as f64 * (1.0 - gamma) / 2.0;
        let coeffs = if cfg.dim == 1 {
            vec![Coefficient::Scalar(1.0), Coefficient::Scalar(-1.0)]
        } else {
            vec![Coefficient::Matrix([[1.0, 0.0], [0.0, 1.0]]), Coefficient::Matrix([[-1.0, 0.0], [0.0, -1.0]])]
        };
        KernelSpec::Homogeneous {
            coeffs,
            exponents: vec![e, e],
            gamma,
        }
    }

    fn homogeneous(k: &KernelSpec, dim: usize) -> Result<Homogeneous> {
        match k {
            KernelSpec::Homogeneous { coeffs, exponents, gamma } => Homogeneous::new(dim, *gamma, coeffs, exponents),
            other => Err(hypothesis("homogeneous kernel", format!("got a {} kernel", other.variant()))),
        }
    }

    /// `sum_i sup_{x in Q} inf_Q M_gamma f(A_i^{-1} .)`, computed by `sup_inf` for each factor.
    fn rhs(
        f: &SampledFunction,
        h: &Homogeneous,
        gamma: f64,
        fam: &CubeFamily,
        sup_inf: impl Fn(&SampledFunction) -> Result<Vec<Option<f64>>>,
    ) -> Result<Vec<Option<f64>>> {
        let mg = fractional_maximal(f, gamma, &YoungFunction::Linear(1.0), fam)?.function.extend(0.0);
        let m = h.preimages(&f.grid().cell_center(0)).len();
        let mut total = vec![Some(0.0); f.grid().cell_count()];
        for i in 0..m {
            let g = resample(&mg, |y| h.preimages(y)[i]);
            for (t, v) in total.iter_mut().zip(sup_inf(&g)?) {
                *t = match (*t, v) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
            }
        }
        Ok(total)
    }
}

impl Inequality for Thm23 {
    fn id(&self) -> &'static str {
        "thm23"
    }

    fn summary(&self) -> &'static str {
        "M#_{0,s,Q0}(Tf) against sum_i sup-inf of M_gamma f(A_i^{-1} .) for homogeneous kernels"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "s (0.5)", "kernel (homogeneous, A = (1, -1), equal exponents)"]
    }

    fn centered(&self) -> bool {
        true
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let k = Self::kernel(cfg);
        check_gamma(k.gamma())?;
        check_s(cfg.s.unwrap_or(0.5))?;
        Self::homogeneous(&k, cfg.dim)?;
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let k = Self::kernel(cfg);
        let h = Self::homogeneous(&k, grid.dim())?;
        let gamma = k.gamma();
        let s = cfg.s.unwrap_or(0.5);
        let fam = cfg.family(grid, FamilyKind::default());
        let whole = Cube::whole(grid);
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_12)?, grid)? {
            let tf = apply_kernel(&h, &f)?;
            let lhs = local_sharp_maximal(&tf, s, &whole, &fam)?.function;
            let rhs = Self::rhs(&f, &h, gamma, &fam, |g| Ok(sup_inf_maximal(g, &whole, &fam)?.function.values().to_vec()))?;
            run.pointwise(0, "main", &label, lhs.values(), &rhs);
        }
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, smp: &Sample) -> Result<(f64, f64)> {
        let k = Self::kernel(cfg);
        let h = Self::homogeneous(&k, grid.dim())?;
        let s = cfg.s.unwrap_or(0.5);
        let fam = cfg.family(grid, FamilyKind::default());
        let whole = Cube::whole(grid);
        let f = member(&functions(cfg, FUNCTIONS_12)?, &smp.case)?.sample(grid)?;
        let cell = point(smp)?;
        let tf = apply_kernel(&h, &f)?;
        let lhs = probe::local_sharp_at(&tf, s, &whole, &fam, cell);
        let rhs = Self::rhs(&f, &h, k.gamma(), &fam, |g| {
            let mut v = vec![None; grid.cell_count()];
            v[cell] = Some(probe::sup_inf_at(g, &whole, &fam, cell));
            Ok(v)
        })?;
        Ok((lhs, rhs[cell].unwrap_or(f64::NAN)))
    }
}

/// `m#_{Tf}(1/2, Q) <= c sum_m lambda_m |2^m Q|^gamma (mean_{2^m Q} |f|^r)^{1/r}` on random cubes.
pub struct Lem41;

/// Number of terms on which summability of the coefficients is judged.
pub const SUMMABILITY_TERMS: usize = 60;

impl Lem41 {
    fn kernel(cfg: &ExperimentConfig) -> KernelSpec {
        cfg.kernel_or_riesz(cfg.gamma_or(0.5))
    }

    fn r(cfg: &ExperimentConfig) -> f64 {
        cfg.r.unwrap_or(1.0)
    }

    fn source(cfg: &ExperimentConfig) -> LambdaChoice {
        cfg.lambda_source.unwrap_or(LambdaChoice::Omega)
    }

    fn modulus(cfg: &ExperimentConfig, k: &KernelSpec) -> Result<ModulusOmega> {
        cfg.modulus
            .or_else(|| k.modulus())
            .ok_or_else(|| hypothesis("kernel smoothness modulus", format!("{} kernels need an explicit modulus", k.variant())))
    }

    fn lambda(cfg: &ExperimentConfig, grid: &Grid, q: &Cube) -> Result<LambdaSequence> {
        let k = Self::kernel(cfg);
        let m = covering_depth(grid, q);
        match Self::source(cfg) {
            LambdaChoice::Omega => omega_lambda(&Self::modulus(cfg, &k)?, m, cfg.c_n()),
            LambdaChoice::Hormander => {
                let a = YoungFunction::Power(conjugate_exponent(Self::r(cfg)));
                hormander_lambda(k.build(grid.dim())?.as_ref(), grid, q, m, &a, cfg.seed)
            }
        }
    }

    fn cubes(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<Cube>> {
        random_cubes(cfg, grid, cfg.cubes.unwrap_or(20), 4)
    }
}

impl Inequality for Lem41 {
    fn id(&self) -> &'static str {
        "lem41"
    }

    fn summary(&self) -> &'static str {
        "m#_{Tf}(1/2, Q) against sum_m lambda_m |2^m Q|^gamma (mean_{2^m Q} |f|^r)^{1/r} on random cubes"
    }

    fn required(&self) -> &'static [&'static str] {
        &["gamma (0.5)", "r (1)", "kernel (riesz)", "cubes (20)", "lambda_source (omega)"]
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let k = Self::kernel(cfg);
        check_gamma(k.gamma())?;
        k.build(cfg.dim)?;
        let r = Self::r(cfg);
        check_r(k.gamma(), r)?;
        match Self::source(cfg) {
            LambdaChoice::Omega => {
                Self::modulus(cfg, &k)?;
            }
            LambdaChoice::Hormander => {
                if !(r > 1.0) {
                    return Err(hypothesis("r > 1 for Hormander coefficients", format!("got r = {r}")));
                }
            }
        }
        Ok(())
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun> {
        let k = Self::kernel(cfg);
        let gamma = k.gamma();
        let r = Self::r(cfg);
        let cubes = Self::cubes(cfg, grid)?;
        let lambdas = cubes.iter().map(|q| Self::lambda(cfg, grid, q)).collect::<Result<Vec<_>>>()?;
        let kb = k.build(grid.dim())?;
        let mut run = GridRun::default();
        for (label, f) in sample_all(&functions(cfg, FUNCTIONS_12)?, grid)? {
            let tf = apply_kernel(kb.as_ref(), &f)?;
            for (q, lam) in cubes.iter().zip(&lambdas) {
                let lhs = sharp_median(&tf, 0.5, q);
                let rhs = lemma41_rhs(&f, q, lam, gamma, r)?;
                run.single(0, "main", &label, Some(*q), lhs, rhs);
            }
        }
        if let LambdaChoice::Omega = Self::source(cfg) {
            let long = omega_lambda(&Self::modulus(cfg, &k)?, SUMMABILITY_TERMS, cfg.c_n())?;
            let total: f64 = long.values.iter().sum();
            run.check(
                "lambda_summable",
                Check::new(!tail_divergent(&long.values), Some(total), format!("sum of the first {SUMMABILITY_TERMS} coefficients")),
            );
        } else {
            let total = lambdas.iter().map(|l| l.values.iter().sum::<f64>()).fold(0.0, f64::max);
            run.check("lambda_summable", Check::new(total.is_finite(), Some(total), "largest coefficient sum over the cubes"));
        }
        run.note("cubes", &cubes);
        Ok(run)
    }

    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, s: &Sample) -> Result<(f64, f64)> {
        let k = Self::kernel(cfg);
        let r = Self::r(cfg);
        let q = cube(s)?;
        let f = member(&functions(cfg, FUNCTIONS_12)?, &s.case)?.sample(grid)?;
        let tf = apply_spec(&k, &f)?;
        let lhs = probe::sharp_median_brute(&tf.cube_values(&q), 0.5);
        let lam = Self::lambda(cfg, grid, &q)?;
        let pw: Vec<f64> = f.values().iter().map(|v| v.abs().powf(r)).collect();
        let mut rhs = 0.0;
        for (m, l) in lam.values.iter().enumerate() {
            if *l == 0.0 {
                continue;
            }
            let region = Region::dilate(&q, 1 << (m + 1));
            rhs += l * region.measure(grid).powf(k.gamma()) * probe::region_mean(grid, &pw, &region).powf(1.0 / r);
        }
        Ok((lhs, rhs))
    }
}

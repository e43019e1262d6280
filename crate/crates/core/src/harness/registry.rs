use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::config::ExperimentConfig;
use super::inequalities;
use super::suite::{generate_suite, Member, SuiteSpec, FUNCTION_STREAM, WEIGHT_STREAM};
use crate::error::{config, Error, Result};
use crate::geometry::{Cube, Grid, SampledFunction};

/// One evaluated pair of sides of an inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub variant: usize,
    pub series: &'static str,
    /// Suite member label, `f|w` for function-weight pairs.
    pub case: String,
    pub point: Option<usize>,
    pub cube: Option<Cube>,
    pub lhs: f64,
    pub rhs: f64,
}

/// A named pass/fail side condition of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(passed: bool, value: Option<f64>, detail: impl Into<String>) -> Self {
        Self {
            passed,
            value,
            detail: detail.into(),
        }
    }
}

/// Everything an inequality produces on one grid.
#[derive(Clone, Debug, Default)]
pub struct GridRun {
    pub samples: Vec<Sample>,
    pub checks: BTreeMap<String, Check>,
    pub notes: BTreeMap<String, Value>,
}

impl GridRun {
    pub fn check(&mut self, name: &str, c: Check) {
        self.checks.insert(name.to_string(), c);
    }

    pub fn note(&mut self, name: &str, v: impl Serialize) {
        self.notes.insert(name.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// One sample per cell where both sides are defined.
    pub fn pointwise(&mut self, variant: usize, series: &'static str, case: &str, lhs: &[Option<f64>], rhs: &[Option<f64>]) {
        for (i, (l, r)) in lhs.iter().zip(rhs).enumerate() {
            if let (Some(l), Some(r)) = (l, r) {
                self.samples.push(Sample {
                    variant,
                    series,
                    case: case.to_string(),
                    point: Some(i),
                    cube: None,
                    lhs: *l,
                    rhs: *r,
                });
            }
        }
    }

    pub fn single(&mut self, variant: usize, series: &'static str, case: &str, cube: Option<Cube>, lhs: f64, rhs: f64) {
        self.samples.push(Sample {
            variant,
            series,
            case: case.to_string(),
            point: None,
            cube,
            lhs,
            rhs,
        });
    }
}

/// A verifiable inequality, registered by id.
pub trait Inequality: Send + Sync {
    fn id(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Config parameters the inequality needs, with defaults where they exist.
    fn required(&self) -> &'static [&'static str];

    fn series(&self) -> &'static [&'static str] {
        &["main"]
    }

    /// Rejects configs violating a hypothesis, before any computation.
    fn validate(&self, cfg: &ExperimentConfig) -> Result<()>;

    /// Labels of the parameter variants scanned; the best one is reported.
    fn variants(&self, _cfg: &ExperimentConfig) -> Vec<String> {
        vec!["default".to_string()]
    }

    /// Whether the domain defaults to a cube centered at the origin.
    fn centered(&self) -> bool {
        false
    }

    fn evaluate(&self, cfg: &ExperimentConfig, grid: &Grid) -> Result<GridRun>;

    /// Recomputes both sides of `sample` by an independent route.
    fn reevaluate(&self, cfg: &ExperimentConfig, grid: &Grid, sample: &Sample) -> Result<(f64, f64)>;

    /// Metadata specific to the inequality.
    fn metadata(&self, _cfg: &ExperimentConfig) -> BTreeMap<String, Value> {
        BTreeMap::new()
    }
}

/// All registered inequalities by id.
pub fn registry() -> BTreeMap<&'static str, Box<dyn Inequality>> {
    inequalities::all().into_iter().map(|i| (i.id(), i)).collect()
}

pub fn lookup(id: &str) -> Result<Box<dyn Inequality>> {
    inequalities::all()
        .into_iter()
        .find(|i| i.id() == id)
        .ok_or_else(|| Error::UnknownInequality(id.to_string()))
}

/// Suite functions of `cfg`, or `default` when none are configured.
pub fn functions(cfg: &ExperimentConfig, default: &[SuiteSpec]) -> Result<Vec<Member>> {
    let specs = if cfg.suite.is_empty() { default } else { &cfg.suite[..] };
    generate_suite(specs, cfg.seed, FUNCTION_STREAM, cfg.dim)
}

/// Suite weights of `cfg`, or `default` when none are configured.
pub fn weights(cfg: &ExperimentConfig, default: &[SuiteSpec]) -> Result<Vec<Member>> {
    let specs = if cfg.weights.is_empty() { default } else { &cfg.weights[..] };
    generate_suite(specs, cfg.seed, WEIGHT_STREAM, cfg.dim)
}

pub fn sample_all(members: &[Member], grid: &Grid) -> Result<Vec<(String, SampledFunction)>> {
    members.iter().map(|m| Ok((m.label.clone(), m.sample(grid)?))).collect()
}

/// The member labelled `label`.
pub fn member<'a>(members: &'a [Member], label: &str) -> Result<&'a Member> {
    members
        .iter()
        .find(|m| m.label == label)
        .ok_or_else(|| config(format!("no suite member `{label}`")))
}

/// Splits a pair label `f|w`.
pub fn split_pair(case: &str) -> Result<(&str, &str)> {
    case.split_once('|').ok_or_else(|| config(format!("`{case}` is not a function-weight pair")))
}

pub fn pair_label(f: &str, w: &str) -> String {
    format!("{f}|{w}")
}

pub fn defined(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|&x| Some(x)).collect()
}

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::suite::SuiteSpec;
use crate::error::{config, hypothesis, Result};
use crate::geometry::{CubeFamily, FamilyKind, Grid};
use crate::operators::{default_c_n, KernelSpec};
use crate::young::{ModulusOmega, MorreyWeight, YoungFunction};

/// How the second weight of a one-weight pair is derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VRule {
    /// `v = M w`.
    Mw,
    /// `v = M_r w`.
    Mrw,
    /// `v = w`.
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    MGamma,
    IGamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaChoice {
    Omega,
    Hormander,
}

fn default_dim() -> usize {
    1
}

fn default_side() -> f64 {
    1.0
}

fn default_tau() -> f64 {
    2.0
}

/// One experiment: an inequality, its parameters, the grids and the test suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub inequality_id: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub grid_sizes: Vec<usize>,
    #[serde(default = "default_side")]
    pub side_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    /// Gauges by role: `A`, `B`, `Phi`, `Psi`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gauges: BTreeMap<String, YoungFunction>,
    /// Morrey weights by role: `phi`, `psi`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morrey: BTreeMap<String, MorreyWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusOmega>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suite: Vec<SuiteSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<SuiteSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tau")]
    pub stability_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyKind>,
    /// Number of random cubes for cube-indexed inequalities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cubes: Option<usize>,
    /// Use the sup-inf right-hand side on the whole domain instead of the pointwise one.
    #[serde(default)]
    pub local: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_rule: Option<VRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_source: Option<LambdaChoice>,
    /// Median parameters tried for the local weighted estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_scan: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks shared by every inequality.
    pub fn validate_common(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(config(format!("dim must be 1 or 2, got {}", self.dim)));
        }
        if self.grid_sizes.is_empty() {
            return Err(config("grid_sizes must list at least one size"));
        }
        let mut sorted = self.grid_sizes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.grid_sizes.len() {
            return Err(config("grid_sizes must not repeat"));
        }
        if !(self.stability_factor >= 1.0 && self.stability_factor.is_finite()) {
            return Err(config(format!("stability_factor must be >= 1, got {}", self.stability_factor)));
        }
        if let (Some(g), Some(k)) = (self.gamma, &self.kernel) {
            if (g - k.gamma()).abs() > 1e-12 {
                return Err(hypothesis("kernel order", format!("gamma = {g} but the kernel has gamma = {}", k.gamma())));
            }
        }
        self.grids(false)?;
        Ok(())
    }

    /// Order `gamma`, from the config or the kernel.
    pub fn gamma_or(&self, default: f64) -> f64 {
        self.gamma.or(self.kernel.as_ref().map(|k| k.gamma())).unwrap_or(default)
    }

    pub fn require(&self, name: &'static str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| config(format!("{} needs parameter `{name}`", self.inequality_id)))
    }

    /// The kernel, defaulting to the Riesz potential of order `gamma`.
    pub fn kernel_or_riesz(&self, gamma: f64) -> KernelSpec {
        self.kernel.clone().unwrap_or(KernelSpec::Riesz { gamma })
    }

    pub fn gauge(&self, role: &str, default: YoungFunction) -> YoungFunction {
        self.gauges.get(role).copied().unwrap_or(default)
    }

    pub fn morrey_weight(&self, role: &str) -> Option<MorreyWeight> {
        self.morrey.get(role).cloned()
    }

    pub fn c_n(&self) -> f64 {
        self.c_n.unwrap_or_else(|| default_c_n(self.dim))
    }

    pub fn d_n(&self) -> f64 {
        self.d_n.unwrap_or(2.0 * (self.dim as f64).sqrt())
    }

    /// Grids in increasing order of resolution. `centered` puts the origin at the domain center
    /// unless an origin is configured.
    pub fn grids(&self, centered: bool) -> Result<Vec<Grid>> {
        let origin = match &self.origin {
            Some(o) => o.clone(),
            None if centered => vec![-0.5 * self.side_length; self.dim],
            None => vec![0.0; self.dim],
        };
        if origin.len() != self.dim {
            return Err(config(format!("origin has {} entries for dim {}", origin.len(), self.dim)));
        }
        let mut sizes = self.grid_sizes.clone();
        sizes.sort_unstable();
        sizes
            .into_iter()
            .map(|n| Grid::new(self.dim, n, self.side_length, &origin))
            .collect()
    }

    pub fn family(&self, grid: &Grid, default: FamilyKind) -> CubeFamily {
        CubeFamily::new(grid.clone(), self.family.unwrap_or(default))
    }
}

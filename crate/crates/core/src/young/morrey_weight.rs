use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Weights `phi(x, t)` of generalized Morrey spaces. Both variants depend on `t` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MorreySpec", into = "MorreySpec")]
pub enum MorreyWeight {
    /// `t^sigma`, `sigma < 0`.
    PowerLaw(f64),
    /// Positive nonincreasing table `(t_k, phi_k)`, interpolated log-log and
    /// extended by constants outside the table.
    Tabulated { t: Vec<f64>, phi: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MorreySpec {
    PowerLaw { sigma: f64 },
    Tabulated { t: Vec<f64>, phi: Vec<f64> },
}

impl TryFrom<MorreySpec> for MorreyWeight {
    type Error = crate::Error;

    fn try_from(s: MorreySpec) -> Result<Self> {
        match s {
            MorreySpec::PowerLaw { sigma } => MorreyWeight::power_law(sigma),
            MorreySpec::Tabulated { t, phi } => MorreyWeight::tabulated(t, phi),
        }
    }
}

impl From<MorreyWeight> for MorreySpec {
    fn from(m: MorreyWeight) -> Self {
        match m {
            MorreyWeight::PowerLaw(sigma) => MorreySpec::PowerLaw { sigma },
            MorreyWeight::Tabulated { t, phi } => MorreySpec::Tabulated { t, phi },
        }
    }
}

impl MorreyWeight {
    pub fn power_law(sigma: f64) -> Result<Self> {
        if sigma < 0.0 && sigma.is_finite() {
            Ok(MorreyWeight::PowerLaw(sigma))
        } else {
            Err(config(format!("power-law Morrey weight needs sigma < 0, got {sigma}")))
        }
    }

    pub fn tabulated(t: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != phi.len() {
            return Err(config("Morrey table needs matching, nonempty t and phi columns"));
        }
        if !t.iter().all(|&x| x > 0.0 && x.is_finite()) || !t.windows(2).all(|w| w[0] < w[1]) {
            return Err(config("Morrey table t values must be positive and increasing"));
        }
        if !phi.iter().all(|&x| x > 0.0 && x.is_finite()) || !phi.windows(2).all(|w| w[0] >= w[1]) {
            return Err(config("Morrey table phi values must be positive and nonincreasing"));
        }
        Ok(MorreyWeight::Tabulated { t, phi })
    }

    /// A constant weight.
    pub fn constant(c: f64) -> Result<Self> {
        Self::tabulated(vec![1.0], vec![c])
    }

    /// `phi(x, t)` for `t > 0`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            MorreyWeight::PowerLaw(s) => t.powf(*s),
            MorreyWeight::Tabulated { t: ts, phi } => {
                let n = ts.len();
                if t <= ts[0] {
                    return phi[0];
                }
                if t >= ts[n - 1] {
                    return phi[n - 1];
                }
                let k = ts.partition_point(|&x| x <= t) - 1;
                let w = (t / ts[k]).ln() / (ts[k + 1] / ts[k]).ln();
                (phi[k].ln() * (1.0 - w) + phi[k + 1].ln() * w).exp()
            }
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            MorreyWeight::PowerLaw(s) => Some(*s),
            MorreyWeight::Tabulated { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(MorreyWeight::power_law(0.0).is_err());
        assert!(MorreyWeight::power_law(0.5).is_err());
        assert!(MorreyWeight::tabulated(vec![1.0, 2.0], vec![1.0, 2.0]).is_err());
        let w = MorreyWeight::tabulated(vec![1.0, 4.0], vec![4.0, 1.0]).unwrap();
        assert!((w.value(2.0) - 2.0).abs() < 1e-12);
        assert_eq!(w.value(0.1), 4.0);
        assert_eq!(w.value(10.0), 1.0);
        let p: MorreyWeight = serde_json::from_str(r#"{"family":"power_law","sigma":-0.25}"#).unwrap();
        assert_eq!(p.value(16.0), 0.5);
    }
}

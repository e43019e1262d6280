use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};

/// Moduli of continuity `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModulusSpec", into = "ModulusSpec")]
pub enum ModulusOmega {
    /// `t^delta`.
    Holder(f64),
    /// `log(e + 1/t)^{-(1+eps)}`.
    Log(f64),
    /// `1/log(e/t)` on `(0, 1)`, continued by 1.
    LogBorderline,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusSpec {
    Holder { delta: f64 },
    Log { epsilon: f64 },
    LogBorderline,
}

impl TryFrom<ModulusSpec> for ModulusOmega {
    type Error = crate::Error;

    fn try_from(s: ModulusSpec) -> Result<Self> {
        match s {
            ModulusSpec::Holder { delta } if delta > 0.0 && delta.is_finite() => Ok(ModulusOmega::Holder(delta)),
            ModulusSpec::Holder { delta } => Err(config(format!("Holder exponent must be positive, got {delta}"))),
            ModulusSpec::Log { epsilon } if epsilon >= 0.0 && epsilon.is_finite() => Ok(ModulusOmega::Log(epsilon)),
            ModulusSpec::Log { epsilon } => Err(config(format!("log exponent must be >= 0, got {epsilon}"))),
            ModulusSpec::LogBorderline => Ok(ModulusOmega::LogBorderline),
        }
    }
}

impl From<ModulusOmega> for ModulusSpec {
    fn from(m: ModulusOmega) -> Self {
        match m {
            ModulusOmega::Holder(delta) => ModulusSpec::Holder { delta },
            ModulusOmega::Log(epsilon) => ModulusSpec::Log { epsilon },
            ModulusOmega::LogBorderline => ModulusSpec::LogBorderline,
        }
    }
}

impl ModulusOmega {
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            ModulusOmega::Holder(d) => t.powf(d),
            ModulusOmega::Log(e) => (std::f64::consts::E + 1.0 / t).ln().powf(-(1.0 + e)),
            ModulusOmega::LogBorderline => {
                if t < 1.0 {
                    1.0 / (1.0 - t.ln())
                } else {
                    1.0
                }
            }
        }
    }
}

/// Result of a truncated integral together with a divergence verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailIntegral {
    pub value: f64,
    pub divergent: bool,
}

const DINI_LOWER_LOG: f64 = -40.0;
const DINI_PANELS: usize = 100_000;

/// Decay rule for a sequence of consecutive block sums of a nonnegative series.
///
/// The tail is declared divergent when the last ratio exceeds 0.99, or when the
/// blocks decay no faster than `1/k`, judged by the log-log slope over the last
/// third of the blocks.
pub fn tail_divergent(blocks: &[f64]) -> bool {
    let b = blocks;
    let n = b.len();
    if n < 3 {
        return false;
    }
    if b[n - 1] == 0.0 {
        return false;
    }
    if b[n - 2] > 0.0 && b[n - 1] / b[n - 2] > 0.99 {
        return true;
    }
    let k0 = n - 1 - (n / 3).max(1);
    if b[k0] <= 0.0 {
        return false;
    }
    // Blocks are abscissed at their midpoints.
    let slope = (b[n - 1] / b[k0]).ln() / ((n as f64 - 0.5) / (k0 as f64 + 0.5)).ln();
    slope >= -1.0
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

/// `int_0^1 omega(c_n t) dt/t`, with `t = e^u` on `[-40, 0]`.
pub fn dini_integral(omega: &ModulusOmega, c_n: f64) -> Result<TailIntegral> {
    if !(c_n > 0.0 && c_n.is_finite()) {
        return Err(domain(format!("c_n must be positive, got {c_n}")));
    }
    let g = |u: f64| omega.value(c_n * u.exp());
    let value = simpson(g, DINI_LOWER_LOG, 0.0, DINI_PANELS);
    let decade = std::f64::consts::LN_10;
    let full = (-DINI_LOWER_LOG / decade).floor() as usize;
    let per = DINI_PANELS / full;
    let blocks: Vec<f64> = (0..full)
        .map(|k| simpson(g, -((k + 1) as f64) * decade, -(k as f64) * decade, per))
        .collect();
    Ok(TailIntegral {
        value,
        divergent: tail_divergent(&blocks),
    })
}

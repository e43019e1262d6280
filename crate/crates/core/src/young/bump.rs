use super::gauge::Gauge;
use super::modulus::TailIntegral;
use crate::error::{domain, Result};

const LOG_CUTOFF: f64 = 18.420_680_743_952_367; // ln(1e8)
const PANELS: usize = 20_000;

/// `(int_1^inf A(t)^{q/p} t^{-q} dt/t)^{1/q}` with `1/q = 1/p - alpha`.
///
/// The integral is computed in `u = ln t` up to `t = 1e8`; the tail beyond is
/// extrapolated from the local power-law exponent of the integrand, which also
/// decides divergence (exponent at least -1).
pub fn bump_norm(a: &dyn Gauge, alpha: f64, p: f64) -> Result<TailIntegral> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    if !(p > 1.0) {
        return Err(domain(format!("p must exceed 1, got {p}")));
    }
    if alpha > 0.0 && p >= 1.0 / alpha {
        return Err(domain(format!("p = {p} must be below 1/alpha = {}", 1.0 / alpha)));
    }
    let q = 1.0 / (1.0 / p - alpha);
    // Integrand in t, times t (the dt/t measure is absorbed by u = ln t).
    let g = |t: f64| a.value(t).powf(q / p) * t.powf(-q);
    let n = PANELS;
    let h = LOG_CUTOFF / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let u = i as f64 * h;
        let v = g(u.exp());
        if !v.is_finite() {
            return Ok(TailIntegral {
                value: f64::INFINITY,
                divergent: true,
            });
        }
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += w * v;
    }
    let body = s * h / 3.0;
    let big = LOG_CUTOFF.exp();
    let (g_hi, g_mid) = (g(big), g(big / 2.0));
    // Exponent of the integrand A^{q/p} t^{-q-1} in t.
    let e = if g_hi > 0.0 && g_mid > 0.0 {
        (g_hi / g_mid).ln() / std::f64::consts::LN_2 - 1.0
    } else {
        f64::NEG_INFINITY
    };
    if e > -1.0 - 1e-6 {
        return Ok(TailIntegral {
            value: f64::INFINITY,
            divergent: true,
        });
    }
    let tail = if e.is_finite() { g_hi / (-e - 1.0) } else { 0.0 };
    Ok(TailIntegral {
        value: (body + tail).powf(1.0 / q),
        divergent: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{Conjugate, YoungFunction};

    #[test]
    fn examples() {
        let lin = bump_norm(&YoungFunction::Linear(1.0), 0.0, 2.0).unwrap();
        assert!(!lin.divergent && (lin.value - 1.0).abs() < 1e-4);
        assert!(bump_norm(&YoungFunction::Power(2.0), 0.0, 2.0).unwrap().divergent);
        for (s, inside) in [(1.0, true), (1.5, true), (2.0, false), (3.0, false)] {
            let r = bump_norm(&YoungFunction::Power(s), 0.0, 2.0).unwrap();
            assert_eq!(!r.divergent, inside, "s = {s}");
        }
        let r = bump_norm(&YoungFunction::Power(1.5), 0.0, 2.0).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-4);
        assert!(bump_norm(&YoungFunction::Power(1.5), 0.5, 2.0).is_err());
    }

    #[test]
    fn fractional_classes() {
        // alpha = 1/4, p = 2: q = 4, integrand exponent 2s - 5.
        assert!(!bump_norm(&YoungFunction::Power(1.5), 0.25, 2.0).unwrap().divergent);
        assert!(bump_norm(&YoungFunction::Power(2.0), 0.25, 2.0).unwrap().divergent);
        // The conjugate of t^3 grows like t^{3/2}.
        let c = Conjugate(YoungFunction::Power(3.0));
        assert!(!bump_norm(&c, 0.0, 2.0).unwrap().divergent);
        assert!(bump_norm(&c, 0.0, 1.5).unwrap().divergent);
    }
}

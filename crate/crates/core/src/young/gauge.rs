use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};

/// A nondecreasing gauge `[0, inf) -> [0, inf]` with value 0 at 0.
pub trait Gauge: Send + Sync {
    /// Evaluation at `t >= 0`; may return `+inf`.
    fn value(&self, t: f64) -> f64;

    /// `Some(p)` when the gauge is exactly `t^p`.
    fn power_exponent(&self) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

/// The parametric Young functions supported by the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungSpec", into = "YoungSpec")]
pub enum YoungFunction {
    /// `t^p`, `p >= 1`.
    Power(f64),
    /// `a t^p`.
    PowerScaled(f64, f64),
    /// `t^p log(e + t)^a`.
    PowerLog(f64, f64),
    /// `exp(t^a) - 1`.
    ExpPower(f64),
    /// `t^r` admitted as a quasi-Young function, `r >= 1`.
    Linear(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    Power { p: f64 },
    PowerScaled { p: f64, a: f64 },
    PowerLog { p: f64, a: f64 },
    ExpPower { a: f64 },
    Linear { r: f64 },
}

impl TryFrom<YoungSpec> for YoungFunction {
    type Error = crate::Error;

    fn try_from(s: YoungSpec) -> Result<Self> {
        let f = match s {
            YoungSpec::Power { p } => YoungFunction::Power(p),
            YoungSpec::PowerScaled { p, a } => YoungFunction::PowerScaled(p, a),
            YoungSpec::PowerLog { p, a } => YoungFunction::PowerLog(p, a),
            YoungSpec::ExpPower { a } => YoungFunction::ExpPower(a),
            YoungSpec::Linear { r } => YoungFunction::Linear(r),
        };
        f.validate()?;
        Ok(f)
    }
}

impl From<YoungFunction> for YoungSpec {
    fn from(f: YoungFunction) -> Self {
        match f {
            YoungFunction::Power(p) => YoungSpec::Power { p },
            YoungFunction::PowerScaled(p, a) => YoungSpec::PowerScaled { p, a },
            YoungFunction::PowerLog(p, a) => YoungSpec::PowerLog { p, a },
            YoungFunction::ExpPower(a) => YoungSpec::ExpPower { a },
            YoungFunction::Linear(r) => YoungSpec::Linear { r },
        }
    }
}

impl YoungFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, what: &str| if c { Ok(()) } else { Err(config(format!("{self:?}: {what}"))) };
        match *self {
            YoungFunction::Power(p) => ok(p.is_finite() && p >= 1.0, "exponent must be >= 1"),
            YoungFunction::PowerScaled(p, a) => {
                ok(p.is_finite() && p >= 1.0, "exponent must be >= 1")?;
                ok(a.is_finite() && a > 0.0, "scale must be positive")
            }
            YoungFunction::PowerLog(p, a) => {
                ok(p.is_finite() && p >= 1.0, "exponent must be >= 1")?;
                ok(a.is_finite() && a >= 0.0, "log exponent must be >= 0")
            }
            YoungFunction::ExpPower(a) => ok(a.is_finite() && a >= 1.0, "exponent must be >= 1"),
            YoungFunction::Linear(r) => ok(r.is_finite() && r >= 1.0, "exponent must be >= 1"),
        }
    }

    /// `A(t)`; negative arguments are a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("gauge argument must be >= 0, got {t}")));
        }
        Ok(self.value(t))
    }

    /// `t` with `A(t) = u`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        inverse(self, u)
    }

    /// `sup_t (s t - A(t))`, `+inf` when unbounded.
    pub fn conjugate(&self, s: f64) -> Result<f64> {
        conjugate(self, s)
    }

    /// `sup_t A(2t)/A(t)` estimated on a logarithmic grid of `[1e-6, 1e6]`.
    pub fn doubling_constant(&self) -> f64 {
        (0..=240)
            .map(|k| 10f64.powf(-6.0 + k as f64 * 0.05))
            .map(|t| self.value(2.0 * t) / self.value(t))
            .fold(0.0, f64::max)
    }
}

impl Gauge for YoungFunction {
    fn value(&self, t: f64) -> f64 {
        match *self {
            YoungFunction::Power(p) | YoungFunction::Linear(p) => t.powf(p),
            YoungFunction::PowerScaled(p, a) => a * t.powf(p),
            YoungFunction::PowerLog(p, a) => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(p) * (std::f64::consts::E + t).ln().powf(a)
                }
            }
            YoungFunction::ExpPower(a) => t.powf(a).exp_m1(),
        }
    }

    fn power_exponent(&self) -> Option<f64> {
        match *self {
            YoungFunction::Power(p) | YoungFunction::Linear(p) => Some(p),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match *self {
            YoungFunction::Power(p) => format!("t^{p}"),
            YoungFunction::PowerScaled(p, a) => format!("{a}*t^{p}"),
            YoungFunction::PowerLog(p, a) => format!("t^{p}*log(e+t)^{a}"),
            YoungFunction::ExpPower(a) => format!("exp(t^{a})-1"),
            YoungFunction::Linear(r) => format!("t^{r} (quasi)"),
        }
    }
}

/// The conjugate `s -> sup_t (s t - A(t))` of a gauge, evaluated numerically.
#[derive(Clone, Copy, Debug)]
pub struct Conjugate<G>(pub G);

impl<G: Gauge> Gauge for Conjugate<G> {
    fn value(&self, s: f64) -> f64 {
        conjugate_value(&self.0, s)
    }

    fn label(&self) -> String {
        format!("conj({})", self.0.label())
    }
}

/// `t^p` composed with the gauge: `t -> A(t^p)`.
#[derive(Clone, Copy, Debug)]
pub struct Composed<G> {
    pub inner: G,
    pub power: f64,
}

impl<G: Gauge> Gauge for Composed<G> {
    fn value(&self, t: f64) -> f64 {
        self.inner.value(t.powf(self.power))
    }

    fn power_exponent(&self) -> Option<f64> {
        self.inner.power_exponent().map(|p| p * self.power)
    }

    fn label(&self) -> String {
        format!("{}(t^{})", self.inner.label(), self.power)
    }
}

/// Inverse by bisection after bracketing by doubling or halving from `t = 1`.
pub fn inverse(g: &dyn Gauge, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(domain(format!("inverse argument must be >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi);
    if g.value(1.0) < u {
        lo = 1.0;
        hi = 2.0;
        while g.value(hi) < u {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(domain(format!("{} never reaches {u}", g.label())));
            }
        }
    } else {
        let mut t = 1.0;
        while g.value(t / 2.0) >= u && t > 1e-300 {
            t /= 2.0;
        }
        hi = t;
        lo = t / 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g.value(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Conjugate by ternary search on the concave map `t -> s t - A(t)` over a doubling bracket.
pub fn conjugate(g: &dyn Gauge, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(domain(format!("conjugate argument must be >= 0, got {s}")));
    }
    Ok(conjugate_value(g, s))
}

fn conjugate_value(g: &(impl Gauge + ?Sized), s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let h = |t: f64| s * t - g.value(t);
    let mut hi = 1.0;
    while h(2.0 * hi) > h(hi) {
        hi *= 2.0;
        if hi > 1e150 {
            return f64::INFINITY;
        }
    }
    let (mut a, mut b) = (0.0, 2.0 * hi);
    for _ in 0..400 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if h(m1) < h(m2) {
            a = m1;
        } else {
            b = m2;
        }
        if b - a <= 1e-13 * b {
            break;
        }
    }
    h(0.5 * (a + b)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::Power(2.0).eval(3.0).unwrap(), 9.0);
        assert_eq!(YoungFunction::Linear(1.0).eval(5.0).unwrap(), 5.0);
        assert_eq!(YoungFunction::PowerLog(2.0, 1.0).eval(0.0).unwrap(), 0.0);
        assert!(YoungFunction::Power(2.0).eval(-1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!((YoungFunction::Power(2.0).inverse(9.0).unwrap() - 3.0).abs() < 1e-11);
        assert!((YoungFunction::Power(3.0).inverse(8.0).unwrap() - 2.0).abs() < 1e-11);
        let a = YoungFunction::PowerLog(2.0, 1.0);
        let u = a.eval(1.7).unwrap();
        assert!((a.inverse(u).unwrap() - 1.7).abs() < 1e-10);
        assert_eq!(a.inverse(0.0).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_examples() {
        let half_square = YoungFunction::PowerScaled(2.0, 0.5);
        assert!((half_square.conjugate(3.0).unwrap() - 4.5).abs() < 1e-8);
        assert_eq!(YoungFunction::ExpPower(1.0).conjugate(0.0).unwrap(), 0.0);
        let cube_third = YoungFunction::PowerScaled(3.0, 1.0 / 3.0);
        let want = 2f64.powf(1.5) * 2.0 / 3.0;
        assert!((cube_third.conjugate(2.0).unwrap() - want).abs() < 1e-6);
        assert_eq!(YoungFunction::Linear(1.0).conjugate(2.0).unwrap(), f64::INFINITY);
        assert_eq!(YoungFunction::Linear(1.0).conjugate(0.5).unwrap(), 0.0);
    }

    #[test]
    fn serde_form() {
        let a: YoungFunction = serde_json::from_str(r#"{"family":"power_log","p":2,"a":1}"#).unwrap();
        assert_eq!(a, YoungFunction::PowerLog(2.0, 1.0));
        assert_eq!(
            serde_json::to_string(&YoungFunction::Linear(1.0)).unwrap(),
            r#"{"family":"linear","r":1.0}"#
        );
        assert!(serde_json::from_str::<YoungFunction>(r#"{"family":"power","p":0.5}"#).is_err());
    }

    #[test]
    fn doubling() {
        assert!((YoungFunction::Power(2.0).doubling_constant() - 4.0).abs() < 1e-12);
        let c = YoungFunction::PowerLog(2.0, 1.0).doubling_constant();
        assert!(c > 4.0 && c < 8.0);
    }

    fn family() -> impl Strategy<Value = YoungFunction> {
        prop_oneof![
            (1.0f64..4.0).prop_map(YoungFunction::Power),
            (1.0f64..4.0, 0.1f64..3.0).prop_map(|(p, a)| YoungFunction::PowerScaled(p, a)),
            (1.0f64..4.0, 0.0f64..3.0).prop_map(|(p, a)| YoungFunction::PowerLog(p, a)),
            (1.0f64..2.0).prop_map(YoungFunction::ExpPower),
            (1.0f64..3.0).prop_map(YoungFunction::Linear),
        ]
    }

    proptest! {
        #[test]
        fn inverse_round_trip(a in family(), e in -6.0f64..6.0) {
            let t = 10f64.powf(e);
            let u = a.value(t);
            // Values beyond f64 range cannot be inverted meaningfully.
            prop_assume!(u.is_finite() && u > 0.0 && u < 1e300);
            let back = a.inverse(u).unwrap();
            prop_assert!((back - t).abs() <= 1e-9 * t, "{a:?} t={t} back={back}");
        }

        #[test]
        fn young_inequality(a in family(), i in 0usize..100, j in 0usize..100) {
            prop_assume!(!matches!(a, YoungFunction::Linear(r) if r == 1.0));
            let t = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
            let s = 10f64.powf(-3.0 + 6.0 * j as f64 / 99.0);
            let conj = a.conjugate(s).unwrap();
            let lhs = s * t;
            let rhs = a.value(t) + conj;
            prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0), "{a:?} s={s} t={t}");
        }
    }
}

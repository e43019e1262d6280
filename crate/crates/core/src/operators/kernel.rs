use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::geometry::{distance, Point, MAX_DIM};
use crate::young::ModulusOmega;

/// Serializable description of a fractional kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `|x - y|^{-n(1-gamma)}`.
    Riesz { gamma: f64 },
    /// `Omega((x-y)/|x-y|) |x - y|^{-n(1-gamma)}` with `Omega` of mean zero.
    Dini {
        sphere: SphereFunction,
        modulus: ModulusOmega,
        gamma: f64,
    },
    /// `prod_i |x - A_i y|^{-gamma_i}` with `sum_i gamma_i = n(1-gamma)`.
    Homogeneous {
        coeffs: Vec<Coefficient>,
        exponents: Vec<f64>,
        gamma: f64,
    },
}

/// Function on the unit sphere: values at `+1` and `-1` in 1D, a trigonometric
/// polynomial without constant term in 2D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SphereFunction {
    OneD { plus: f64, minus: f64 },
    TwoD { cos: Vec<f64>, sin: Vec<f64> },
}

impl SphereFunction {
    pub fn dim(&self) -> usize {
        match self {
            SphereFunction::OneD { .. } => 1,
            SphereFunction::TwoD { .. } => 2,
        }
    }

    /// Value at the direction of `d` (nonzero).
    pub fn value(&self, d: &Point) -> f64 {
        match self {
            SphereFunction::OneD { plus, minus } => {
                if d[0] > 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            SphereFunction::TwoD { cos, sin } => {
                let th = d[1].atan2(d[0]);
                let c: f64 = cos.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * th).cos()).sum();
                let s: f64 = sin.iter().enumerate().map(|(k, b)| b * ((k + 1) as f64 * th).sin()).sum();
                c + s
            }
        }
    }
}

/// A scalar (1D) or a 2x2 matrix (2D), rows first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Scalar(f64),
    Matrix([[f64; 2]; 2]),
}

impl Coefficient {
    fn dim(&self) -> usize {
        match self {
            Coefficient::Scalar(_) => 1,
            Coefficient::Matrix(_) => 2,
        }
    }

    fn as_matrix(&self) -> [[f64; 2]; 2] {
        match *self {
            Coefficient::Scalar(a) => [[a, 0.0], [0.0, 1.0]],
            Coefficient::Matrix(m) => m,
        }
    }
}

fn det(m: &[[f64; 2]; 2], dim: usize) -> f64 {
    if dim == 1 {
        m[0][0]
    } else {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

fn apply(m: &[[f64; 2]; 2], y: &Point, dim: usize) -> Point {
    if dim == 1 {
        [m[0][0] * y[0], 0.0]
    } else {
        [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]]
    }
}

fn invert(m: &[[f64; 2]; 2], dim: usize) -> [[f64; 2]; 2] {
    let d = det(m, dim);
    if dim == 1 {
        [[1.0 / d, 0.0], [0.0, 1.0]]
    } else {
        [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
    }
}

/// A kernel `k(x, y)` of a fractional integral operator.
pub trait Kernel: Send + Sync {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn gamma(&self) -> f64;

    /// `k(x, y)` away from singular points.
    fn value(&self, x: &Point, y: &Point) -> f64;

    /// Points `y` where `k(x, .)` is singular.
    fn singular_points(&self, x: &Point) -> Vec<Point>;

    /// Whether `k(x, y)` depends on `x - y` only.
    fn translation_invariant(&self) -> bool {
        false
    }

    /// `int k(x, y) dy` over the cell `lo + [0, h]^dim` whose closure contains a singular point.
    fn singular_cell(&self, x: &Point, lo: &Point, h: f64) -> f64 {
        subdivide(self, x, &self.singular_points(x), lo, h, 0)
    }
}

/// Levels of dyadic subdivision for cells with a singular point; the innermost is dropped.
pub const SINGULAR_DEPTH: usize = 4;

fn closure_contains(lo: &Point, h: f64, p: &Point, dim: usize) -> bool {
    (0..dim).all(|a| p[a] >= lo[a] && p[a] <= lo[a] + h)
}

fn subdivide<K: Kernel + ?Sized>(k: &K, x: &Point, sing: &[Point], lo: &Point, h: f64, depth: usize) -> f64 {
    let dim = k.dim();
    let hit = sing.iter().any(|s| closure_contains(lo, h, s, dim));
    if !hit {
        let mut mid = *lo;
        for v in mid.iter_mut().take(dim) {
            *v += 0.5 * h;
        }
        return k.value(x, &mid) * h.powi(dim as i32);
    }
    if depth == SINGULAR_DEPTH {
        return 0.0;
    }
    let half = 0.5 * h;
    let mut total = 0.0;
    for c in 0..(1 << dim) {
        let mut sub = *lo;
        for a in 0..dim {
            if c >> (dim - 1 - a) & 1 == 1 {
                sub[a] += half;
            }
        }
        total += subdivide(k, x, sing, &sub, half, depth + 1);
    }
    total
}

/// `int_a^b |y - s|^{-g} dy` for `g < 1`.
pub(crate) fn power_segment(a: f64, b: f64, s: f64, g: f64) -> f64 {
    let e = 1.0 - g;
    let f = |d: f64| d.powf(e) / e;
    if s <= a {
        f(b - s) - f(a - s)
    } else if s >= b {
        f(s - a) - f(s - b)
    } else {
        f(s - a) + f(b - s)
    }
}

/// Riesz kernel `|x - y|^{-n(1-gamma)}`.
#[derive(Clone, Debug)]
pub struct Riesz {
    dim: usize,
    gamma: f64,
}

impl Riesz {
    pub fn new(dim: usize, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_dim(dim)?;
        Ok(Self { dim, gamma })
    }

    fn beta(&self) -> f64 {
        self.dim as f64 * (1.0 - self.gamma)
    }
}

impl Kernel for Riesz {
    fn name(&self) -> &'static str {
        "riesz"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn value(&self, x: &Point, y: &Point) -> f64 {
        distance(self.dim, x, y).powf(-self.beta())
    }

    fn singular_points(&self, x: &Point) -> Vec<Point> {
        vec![*x]
    }

    fn translation_invariant(&self) -> bool {
        true
    }

    fn singular_cell(&self, x: &Point, lo: &Point, h: f64) -> f64 {
        if self.dim == 1 {
            power_segment(lo[0], lo[0] + h, x[0], self.beta())
        } else {
            subdivide(self, x, &[*x], lo, h, 0)
        }
    }
}

/// Convolution kernel of Dini type `Omega(x') |x|^{-n(1-gamma)}`.
#[derive(Clone, Debug)]
pub struct Dini {
    dim: usize,
    gamma: f64,
    sphere: SphereFunction,
    modulus: ModulusOmega,
}

impl Dini {
    pub fn new(dim: usize, gamma: f64, sphere: SphereFunction, modulus: ModulusOmega) -> Result<Self> {
        check_gamma(gamma)?;
        check_dim(dim)?;
        if sphere.dim() != dim {
            return Err(config(format!("sphere function is {}D but the grid is {dim}D", sphere.dim())));
        }
        if let SphereFunction::OneD { plus, minus } = sphere {
            if (plus + minus).abs() > 1e-12 * (plus.abs() + minus.abs()).max(1.0) {
                return Err(config("sphere function must have mean zero: plus + minus = 0"));
            }
        }
        Ok(Self {
            dim,
            gamma,
            sphere,
            modulus,
        })
    }

    pub fn modulus(&self) -> ModulusOmega {
        self.modulus
    }

    fn beta(&self) -> f64 {
        self.dim as f64 * (1.0 - self.gamma)
    }
}

impl Kernel for Dini {
    fn name(&self) -> &'static str {
        "dini"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn value(&self, x: &Point, y: &Point) -> f64 {
        let d = [x[0] - y[0], x[1] - y[1]];
        self.sphere.value(&d) * distance(self.dim, x, y).powf(-self.beta())
    }

    fn singular_points(&self, x: &Point) -> Vec<Point> {
        vec![*x]
    }

    fn translation_invariant(&self) -> bool {
        true
    }

    fn singular_cell(&self, x: &Point, lo: &Point, h: f64) -> f64 {
        match &self.sphere {
            SphereFunction::OneD { plus, minus } => {
                let s = x[0].clamp(lo[0], lo[0] + h);
                // y < x sees direction +1, y > x sees -1.
                plus * power_segment(lo[0], s, x[0], self.beta()) + minus * power_segment(s, lo[0] + h, x[0], self.beta())
            }
            SphereFunction::TwoD { .. } => subdivide(self, x, &[*x], lo, h, 0),
        }
    }
}

/// Kernel `prod_i |x - A_i y|^{-gamma_i}`.
#[derive(Clone, Debug)]
pub struct Homogeneous {
    dim: usize,
    gamma: f64,
    mats: Vec<[[f64; 2]; 2]>,
    inverses: Vec<[[f64; 2]; 2]>,
    exponents: Vec<f64>,
}

/// Subcells per singular cell for 1D product integration.
pub const PRODUCT_SUBCELLS: usize = 16;

impl Homogeneous {
    pub fn new(dim: usize, gamma: f64, coeffs: &[Coefficient], exponents: &[f64]) -> Result<Self> {
        check_gamma(gamma)?;
        check_dim(dim)?;
        if coeffs.is_empty() || coeffs.len() != exponents.len() {
            return Err(config("homogeneous kernel needs as many exponents as coefficients (at least one)"));
        }
        if let Some(c) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(config(format!("coefficient {c:?} does not match dimension {dim}")));
        }
        let mats: Vec<_> = coeffs.iter().map(Coefficient::as_matrix).collect();
        let scale = |m: &[[f64; 2]; 2]| m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        for (i, m) in mats.iter().enumerate() {
            if det(m, dim).abs() <= 1e-12 * scale(m).powi(dim as i32) {
                return Err(config(format!("coefficient {i} is not invertible")));
            }
            for (j, n) in mats.iter().enumerate().skip(i + 1) {
                let mut d = *m;
                for r in 0..2 {
                    for c in 0..2 {
                        d[r][c] -= n[r][c];
                    }
                }
                let s = scale(m).max(scale(n));
                if det(&d, dim).abs() <= 1e-12 * s.powi(dim as i32) {
                    return Err(config(format!("coefficients {i} and {j} differ by a singular matrix")));
                }
            }
        }
        if exponents.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(config("homogeneous exponents must be positive"));
        }
        let total: f64 = exponents.iter().sum();
        let want = dim as f64 * (1.0 - gamma);
        if (total - want).abs() > 1e-9 {
            return Err(config(format!("exponents sum to {total}, expected n(1-gamma) = {want}")));
        }
        let inverses = mats.iter().map(|m| invert(m, dim)).collect();
        Ok(Self {
            dim,
            gamma,
            mats,
            inverses,
            exponents: exponents.to_vec(),
        })
    }

    /// `A_i^{-1} y` for each factor.
    pub fn preimages(&self, y: &Point) -> Vec<Point> {
        self.inverses.iter().map(|m| apply(m, y, self.dim)).collect()
    }

    fn factor(&self, i: usize, x: &Point, y: &Point) -> f64 {
        let ay = apply(&self.mats[i], y, self.dim);
        distance(self.dim, x, &ay).powf(-self.exponents[i])
    }
}

impl Kernel for Homogeneous {
    fn name(&self) -> &'static str {
        "homogeneous"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn value(&self, x: &Point, y: &Point) -> f64 {
        (0..self.mats.len()).map(|i| self.factor(i, x, y)).product()
    }

    fn singular_points(&self, x: &Point) -> Vec<Point> {
        self.preimages(x)
    }

    fn singular_cell(&self, x: &Point, lo: &Point, h: f64) -> f64 {
        if self.dim != 1 {
            return subdivide(self, x, &self.singular_points(x), lo, h, 0);
        }
        let sing = self.singular_points(x);
        let (a, b) = (lo[0], lo[0] + h);
        let inside: Vec<usize> = (0..sing.len()).filter(|&i| sing[i][0] >= a && sing[i][0] <= b).collect();
        let g_in: f64 = inside.iter().map(|&i| self.exponents[i]).sum();
        let coef: f64 = inside
            .iter()
            .map(|&i| self.mats[i][0][0].abs().powf(-self.exponents[i]))
            .product();
        let w = h / PRODUCT_SUBCELLS as f64;
        let mut total = 0.0;
        for k in 0..PRODUCT_SUBCELLS {
            let (sa, sb) = (a + k as f64 * w, a + (k + 1) as f64 * w);
            let mid = [0.5 * (sa + sb), 0.0];
            let smooth: f64 = (0..sing.len())
                .filter(|i| !inside.contains(i))
                .map(|i| self.factor(i, x, &mid))
                .product();
            // Singular factors sharing the cell are merged at the one nearest the subcell.
            let anchor = inside
                .iter()
                .copied()
                .min_by(|&i, &j| {
                    let di = (sing[i][0] - mid[0]).abs();
                    let dj = (sing[j][0] - mid[0]).abs();
                    di.total_cmp(&dj).then(i.cmp(&j))
                })
                .expect("singular cell without singular point");
            let s = sing[anchor][0];
            let mut correction = 1.0;
            for &i in &inside {
                if i != anchor {
                    let r = (mid[0] - sing[i][0]).abs() / (mid[0] - s).abs();
                    if r.is_finite() && r > 0.0 {
                        correction *= r.powf(-self.exponents[i]);
                    }
                }
            }
            total += coef * correction * smooth * power_segment(sa, sb, s, g_in);
        }
        total
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(config(format!("kernel order gamma must lie in (0, 1), got {gamma}")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(config(format!("dimension must be 1 or 2, got {dim}")))
    }
}

impl KernelSpec {
    pub fn gamma(&self) -> f64 {
        match self {
            KernelSpec::Riesz { gamma } | KernelSpec::Dini { gamma, .. } | KernelSpec::Homogeneous { gamma, .. } => *gamma,
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            KernelSpec::Riesz { .. } => "riesz",
            KernelSpec::Dini { .. } => "dini",
            KernelSpec::Homogeneous { .. } => "homogeneous",
        }
    }

    /// Validates the description and builds the kernel for dimension `dim`.
    pub fn build(&self, dim: usize) -> Result<Box<dyn Kernel>> {
        Ok(match self {
            KernelSpec::Riesz { gamma } => Box::new(Riesz::new(dim, *gamma)?),
            KernelSpec::Dini { sphere, modulus, gamma } => Box::new(Dini::new(dim, *gamma, sphere.clone(), *modulus)?),
            KernelSpec::Homogeneous { coeffs, exponents, gamma } => {
                Box::new(Homogeneous::new(dim, *gamma, coeffs, exponents)?)
            }
        })
    }

    /// The smoothness modulus attached to the kernel: the Dini modulus, or `t` for Riesz.
    pub fn modulus(&self) -> Option<ModulusOmega> {
        match self {
            KernelSpec::Riesz { .. } => Some(ModulusOmega::Holder(1.0)),
            KernelSpec::Dini { modulus, .. } => Some(*modulus),
            KernelSpec::Homogeneous { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let k: KernelSpec = serde_json::from_str(
            r#"{"variant":"homogeneous","coeffs":[1,-1],"exponents":[0.25,0.25],"gamma":0.5}"#,
        )
        .unwrap();
        assert!(k.build(1).is_ok());
        assert!(k.build(2).is_err());
        let d: KernelSpec = serde_json::from_str(
            r#"{"variant":"dini","sphere":{"plus":1,"minus":-1},"modulus":{"family":"holder","delta":1},"gamma":0.5}"#,
        )
        .unwrap();
        assert!(d.build(1).is_ok());
        let m: KernelSpec = serde_json::from_str(
            r#"{"variant":"homogeneous","coeffs":[[[1,0],[0,1]],[[-1,0],[0,2]]],"exponents":[0.5,0.5],"gamma":0.5}"#,
        )
        .unwrap();
        assert!(m.build(2).is_ok());
    }

    #[test]
    fn construction_checks() {
        assert!(Riesz::new(1, 1.0).is_err());
        assert!(Homogeneous::new(1, 0.5, &[Coefficient::Scalar(1.0), Coefficient::Scalar(1.0)], &[0.25, 0.25]).is_err());
        assert!(Homogeneous::new(1, 0.5, &[Coefficient::Scalar(0.0)], &[0.5]).is_err());
        assert!(Homogeneous::new(1, 0.5, &[Coefficient::Scalar(2.0)], &[0.4]).is_err());
        let bad = SphereFunction::OneD { plus: 1.0, minus: 1.0 };
        assert!(Dini::new(1, 0.5, bad, ModulusOmega::Holder(1.0)).is_err());
        let sing = [[1.0, 2.0], [2.0, 4.0]];
        assert!(Homogeneous::new(2, 0.5, &[Coefficient::Matrix(sing)], &[1.0]).is_err());
    }

    #[test]
    fn singular_cells() {
        let h = 0.25;
        let r = Riesz::new(1, 0.5).unwrap();
        let want = 2.0 * (h / 2.0f64).powf(0.5) / 0.5;
        assert!((r.singular_cell(&[0.125, 0.0], &[0.0, 0.0], h) - want).abs() < 1e-14);
        let hom = Homogeneous::new(1, 0.5, &[Coefficient::Scalar(1.0)], &[0.5]).unwrap();
        let got = hom.singular_cell(&[0.125, 0.0], &[0.0, 0.0], h);
        assert!((got - want).abs() < 1e-13 * want);
        // 2D: dropping the innermost squares errs low.
        let r2 = Riesz::new(2, 0.5).unwrap();
        let v = r2.singular_cell(&[0.5, 0.5], &[0.0, 0.0], 1.0);
        // Exact value of the integral of 1/|y| over the unit square around its center.
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln();
        assert!(v < exact && v > 0.8 * exact);
    }

    #[test]
    fn power_segment_cases() {
        let g = 0.5;
        assert!((power_segment(0.0, 1.0, 0.0, g) - 2.0).abs() < 1e-15);
        assert!((power_segment(1.0, 4.0, 0.0, g) - 2.0).abs() < 1e-15);
        assert!((power_segment(-4.0, -1.0, 0.0, g) - 2.0).abs() < 1e-15);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::geometry::{Grid, Point, SampledFunction, MAX_DIM};

/// RNG stream for suite functions.
pub const FUNCTION_STREAM: u64 = 0;
/// RNG stream for weights.
pub const WEIGHT_STREAM: u64 = 1;
/// RNG stream for random cubes.
pub const CUBE_STREAM: u64 = 2;

/// Breakpoints of indicators and step functions are multiples of this fraction of the domain.
pub const BREAK_UNIT: f64 = 1.0 / 16.0;

fn one() -> f64 {
    1.0
}

/// Descriptor of a family of test functions or weights, in coordinates relative to the
/// domain `[0, 1]^n`. `support` is a per-axis interval, `[0.25, 0.75]` by default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteSpec {
    Indicator {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<[f64; 2]>,
    },
    Step {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<[f64; 2]>,
    },
    Gaussian {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<[f64; 2]>,
    },
    Oscillating {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<[f64; 2]>,
    },
    PowerWeight {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<[f64; 2]>,
    },
    NoiseWeight {
        count: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
}

/// Continuum description of one suite member, in relative coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Box { lo: Point, hi: Point },
    /// Piecewise constant along the first axis on `breaks`, times the box in the others.
    Step { lo: Point, hi: Point, breaks: Vec<f64>, values: Vec<f64> },
    Gaussian { lo: Point, hi: Point, center: Point, width: f64, amplitude: f64 },
    Oscillating { lo: Point, hi: Point, center: Point, width: f64, frequency: f64 },
    /// `max(|u - c|, h/2)^a`, `h` the relative cell width.
    Power { center: Point, exponent: f64 },
    /// `exp(amplitude * s(u))` with `s` piecewise linear on a lattice of `knots` per axis.
    Noise { knots: usize, values: Vec<f64>, amplitude: f64 },
    Constant { value: f64 },
}

/// A named suite member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Member {
    pub label: String,
    pub shape: Shape,
}

const NOISE_KNOTS: usize = 16;

fn support(s: Option<[f64; 2]>) -> Result<[f64; 2]> {
    let s = s.unwrap_or([0.25, 0.75]);
    if !(0.0 <= s[0] && s[0] < s[1] && s[1] <= 1.0) {
        return Err(config(format!("support must satisfy 0 <= a < b <= 1, got {s:?}")));
    }
    Ok(s)
}

fn slots(s: [f64; 2]) -> (i64, i64) {
    ((s[0] / BREAK_UNIT - 1e-9).ceil() as i64, (s[1] / BREAK_UNIT + 1e-9).floor() as i64)
}

fn boxed(rng: &mut ChaCha8Rng, s: [f64; 2], dim: usize) -> Result<(Point, Point)> {
    let (a, b) = slots(s);
    if b <= a {
        return Err(config(format!("support {s:?} holds no breakpoint interval")));
    }
    let mut lo = [0.0; MAX_DIM];
    let mut hi = [0.0; MAX_DIM];
    for ax in 0..dim {
        let i = rng.gen_range(a..b);
        let j = rng.gen_range(i + 1..=b);
        lo[ax] = i as f64 * BREAK_UNIT;
        hi[ax] = j as f64 * BREAK_UNIT;
    }
    Ok((lo, hi))
}

fn full_box(s: [f64; 2], dim: usize) -> (Point, Point) {
    let mut lo = [0.0; MAX_DIM];
    let mut hi = [0.0; MAX_DIM];
    for ax in 0..dim {
        lo[ax] = s[0];
        hi[ax] = s[1];
    }
    (lo, hi)
}

fn centered_point(rng: &mut ChaCha8Rng, s: [f64; 2], dim: usize) -> Point {
    let w = s[1] - s[0];
    let mut c = [0.0; MAX_DIM];
    for v in c.iter_mut().take(dim) {
        *v = rng.gen_range(s[0] + 0.25 * w..s[1] - 0.25 * w);
    }
    c
}

fn step(rng: &mut ChaCha8Rng, s: [f64; 2], dim: usize) -> Result<Shape> {
    let (a, b) = slots(s);
    let room = (b - a) as usize;
    if room < 3 {
        return Err(config(format!("support {s:?} is too narrow for a step function")));
    }
    let pieces = rng.gen_range(3..=8usize.min(room));
    let mut inner: Vec<i64> = (a + 1..b).collect();
    // Partial Fisher-Yates selection of the interior breakpoints.
    for k in 0..pieces - 1 {
        let j = rng.gen_range(k..inner.len());
        inner.swap(k, j);
    }
    let mut cuts: Vec<i64> = inner[..pieces - 1].to_vec();
    cuts.sort_unstable();
    let mut breaks = vec![a as f64 * BREAK_UNIT];
    breaks.extend(cuts.iter().map(|&c| c as f64 * BREAK_UNIT));
    breaks.push(b as f64 * BREAK_UNIT);
    let values = loop {
        let mut v: Vec<f64> = Vec::with_capacity(pieces);
        while v.len() < pieces {
            let x = rng.gen_range(-8i32..=8) as f64 / 4.0;
            if v.last() != Some(&x) {
                v.push(x);
            }
        }
        let mut d = v.clone();
        d.sort_by(f64::total_cmp);
        d.dedup();
        if d.len() >= 3 {
            break v;
        }
    };
    let (lo, hi) = full_box(s, dim);
    Ok(Shape::Step { lo, hi, breaks, values })
}

fn noise(rng: &mut ChaCha8Rng, dim: usize, amplitude: f64) -> Shape {
    let k = NOISE_KNOTS + 1;
    let len = if dim == 1 { k } else { k * k };
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    // One pass of neighbour averaging along each axis.
    let at = |v: &Vec<f64>, i: usize, j: usize| if dim == 1 { v[i] } else { v[i * k + j] };
    let mut values = raw.clone();
    for i in 0..k {
        for j in 0..if dim == 1 { 1 } else { k } {
            let mut s = 0.0;
            let mut c = 0.0;
            for di in -1i64..=1 {
                for dj in if dim == 1 { 0i64..=0 } else { -1i64..=1 } {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii >= 0 && (ii as usize) < k && jj >= 0 && (jj as usize) < k.max(1) {
                        s += at(&raw, ii as usize, jj as usize);
                        c += 1.0;
                    }
                }
            }
            let idx = if dim == 1 { i } else { i * k + j };
            values[idx] = s / c;
        }
    }
    Shape::Noise {
        knots: NOISE_KNOTS,
        values,
        amplitude,
    }
}

/// Draws the members described by `specs`, deterministically in `seed` and `stream`.
pub fn generate_suite(specs: &[SuiteSpec], seed: u64, stream: u64, dim: usize) -> Result<Vec<Member>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::new();
    for spec in specs {
        let (name, count) = match spec {
            SuiteSpec::Indicator { count, .. } => ("indicator", *count),
            SuiteSpec::Step { count, .. } => ("step", *count),
            SuiteSpec::Gaussian { count, .. } => ("gaussian", *count),
            SuiteSpec::Oscillating { count, .. } => ("oscillating", *count),
            SuiteSpec::PowerWeight { count, .. } => ("power_weight", *count),
            SuiteSpec::NoiseWeight { count, .. } => ("noise_weight", *count),
            SuiteSpec::Constant { .. } => ("constant", 1),
        };
        for _ in 0..count {
            let shape = match spec {
                SuiteSpec::Indicator { support: s, .. } => {
                    let (lo, hi) = boxed(&mut rng, support(*s)?, dim)?;
                    Shape::Box { lo, hi }
                }
                SuiteSpec::Step { support: s, .. } => step(&mut rng, support(*s)?, dim)?,
                SuiteSpec::Gaussian { support: s, .. } => {
                    let s = support(*s)?;
                    let (lo, hi) = full_box(s, dim);
                    Shape::Gaussian {
                        lo,
                        hi,
                        center: centered_point(&mut rng, s, dim),
                        width: (s[1] - s[0]) * rng.gen_range(0.05..0.15),
                        amplitude: rng.gen_range(0.5..2.0),
                    }
                }
                SuiteSpec::Oscillating { support: s, .. } => {
                    let s = support(*s)?;
                    let (lo, hi) = full_box(s, dim);
                    Shape::Oscillating {
                        lo,
                        hi,
                        center: centered_point(&mut rng, s, dim),
                        width: (s[1] - s[0]) * rng.gen_range(0.1..0.25),
                        frequency: rng.gen_range(2..=6) as f64 / (s[1] - s[0]),
                    }
                }
                SuiteSpec::PowerWeight { support: s, .. } => {
                    let s = support(*s)?;
                    let mut center = [0.0; MAX_DIM];
                    for c in center.iter_mut().take(dim) {
                        *c = rng.gen_range(s[0]..s[1]);
                    }
                    Shape::Power {
                        center,
                        exponent: rng.gen_range(-0.45..0.45),
                    }
                }
                SuiteSpec::NoiseWeight { amplitude, .. } => noise(&mut rng, dim, *amplitude),
                SuiteSpec::Constant { value } => Shape::Constant { value: *value },
            };
            let label = format!("{name}#{}", out.len());
            out.push(Member { label, shape });
        }
    }
    Ok(out)
}

fn inside(u: &Point, lo: &Point, hi: &Point, dim: usize) -> bool {
    (0..dim).all(|a| u[a] >= lo[a] && u[a] < hi[a])
}

fn sq_dist(u: &Point, c: &Point, dim: usize) -> f64 {
    (0..dim).map(|a| (u[a] - c[a]).powi(2)).sum()
}

impl Shape {
    /// Value at relative coordinates `u`; `h` is the relative cell width.
    pub fn eval(&self, u: &Point, h: f64, dim: usize) -> f64 {
        match self {
            Shape::Box { lo, hi } => f64::from(u8::from(inside(u, lo, hi, dim))),
            Shape::Step { lo, hi, breaks, values } => {
                if !inside(u, lo, hi, dim) {
                    return 0.0;
                }
                let k = breaks.partition_point(|&b| b <= u[0]).clamp(1, values.len());
                values[k - 1]
            }
            Shape::Gaussian { lo, hi, center, width, amplitude } => {
                if !inside(u, lo, hi, dim) {
                    return 0.0;
                }
                amplitude * (-sq_dist(u, center, dim) / (2.0 * width * width)).exp()
            }
            Shape::Oscillating { lo, hi, center, width, frequency } => {
                if !inside(u, lo, hi, dim) {
                    return 0.0;
                }
                let sign = (std::f64::consts::TAU * frequency * (u[0] - center[0])).sin().signum();
                sign * (-sq_dist(u, center, dim) / (2.0 * width * width)).exp()
            }
            Shape::Power { center, exponent } => sq_dist(u, center, dim).sqrt().max(0.5 * h).powf(*exponent),
            Shape::Noise { knots, values, amplitude } => {
                let k = *knots;
                let lerp_axis = |x: f64| {
                    let t = (x.clamp(0.0, 1.0) * k as f64).min(k as f64 - 1e-12);
                    let i = t.floor() as usize;
                    (i, t - i as f64)
                };
                let s = if dim == 1 {
                    let (i, w) = lerp_axis(u[0]);
                    values[i] * (1.0 - w) + values[i + 1] * w
                } else {
                    let (i, a) = lerp_axis(u[0]);
                    let (j, b) = lerp_axis(u[1]);
                    let m = k + 1;
                    let v = |p: usize, q: usize| values[p * m + q];
                    v(i, j) * (1.0 - a) * (1.0 - b) + v(i + 1, j) * a * (1.0 - b) + v(i, j + 1) * (1.0 - a) * b + v(i + 1, j + 1) * a * b
                };
                (amplitude * s).exp()
            }
            Shape::Constant { value } => *value,
        }
    }
}

impl Member {
    /// Samples the member at the cell centers of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        let dim = grid.dim();
        let l = grid.side_length();
        let o = grid.origin().to_vec();
        let h = 1.0 / grid.cells_per_side() as f64;
        SampledFunction::from_fn(grid, |x| {
            let mut u = [0.0; MAX_DIM];
            for a in 0..dim {
                u[a] = (x[a] - o[a]) / l;
            }
            self.shape.eval(&u, h, dim)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integrate, Cube};

    fn specs() -> Vec<SuiteSpec> {
        vec![
            SuiteSpec::Indicator { count: 3, support: None },
            SuiteSpec::Step { count: 3, support: None },
            SuiteSpec::Gaussian { count: 2, support: None },
            SuiteSpec::Oscillating { count: 2, support: None },
            SuiteSpec::PowerWeight { count: 2, support: None },
            SuiteSpec::NoiseWeight { count: 2, amplitude: 1.0 },
            SuiteSpec::Constant { value: 2.0 },
        ]
    }

    #[test]
    fn deterministic() {
        for dim in [1, 2] {
            let a = generate_suite(&specs(), 9, FUNCTION_STREAM, dim).unwrap();
            let b = generate_suite(&specs(), 9, FUNCTION_STREAM, dim).unwrap();
            assert_eq!(a, b);
            let g = Grid::unit(dim, 32).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.sample(&g).unwrap().values(), y.sample(&g).unwrap().values());
            }
            assert_ne!(a, generate_suite(&specs(), 10, FUNCTION_STREAM, dim).unwrap());
        }
    }

    #[test]
    fn indicators_integrate_to_their_measure() {
        for dim in [1, 2] {
            let m = generate_suite(&[SuiteSpec::Indicator { count: 6, support: None }], 3, 0, dim).unwrap();
            let g = Grid::unit(dim, 64).unwrap();
            for member in m {
                let Shape::Box { lo, hi } = member.shape else { unreachable!() };
                let want: f64 = (0..dim).map(|a| hi[a] - lo[a]).product();
                let got = integrate(&member.sample(&g).unwrap(), &Cube::whole(&g)).unwrap();
                assert!((got - want).abs() < 1e-12, "{got} {want}");
            }
        }
    }

    #[test]
    fn steps_hit_three_values() {
        let m = generate_suite(&[SuiteSpec::Step { count: 20, support: Some([0.0, 1.0]) }], 5, 0, 1).unwrap();
        let g = Grid::unit(1, 64).unwrap();
        for member in m {
            let Shape::Step { ref values, .. } = member.shape else { unreachable!() };
            assert!((3..=8).contains(&values.len()));
            let mut v = member.sample(&g).unwrap().into_values();
            v.sort_by(f64::total_cmp);
            v.dedup();
            assert!(v.len() >= 3);
        }
    }

    #[test]
    fn weights_are_positive() {
        for dim in [1, 2] {
            let m = generate_suite(&specs()[4..6], 1, WEIGHT_STREAM, dim).unwrap();
            let g = Grid::unit(dim, 32).unwrap();
            for member in m {
                assert!(member.sample(&g).unwrap().is_positive(), "{}", member.label);
            }
        }
    }

    #[test]
    fn rejects_bad_support() {
        assert!(generate_suite(&[SuiteSpec::Indicator { count: 1, support: Some([0.6, 0.5]) }], 0, 0, 1).is_err());
        let spec: SuiteSpec = serde_json::from_str(r#"{"kind": "gaussian", "count": 2}"#).unwrap();
        assert_eq!(spec, SuiteSpec::Gaussian { count: 2, support: None });
        assert!(serde_json::from_str::<SuiteSpec>(r#"{"kind": "gaussian", "count": 2, "x": 1}"#).is_err());
    }
}

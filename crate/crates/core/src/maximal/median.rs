use crate::geometry::{Cube, SampledFunction};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `floor(x)` insensitive to rounding just below an integer.
fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

/// Number of values allowed strictly above the threshold: the largest `j < s n`.
pub(crate) fn allowed_excess(s: f64, n: usize) -> usize {
    ((s * n as f64 - 1e-9).ceil() as usize).saturating_sub(1)
}

/// Order-statistic form of the maximal median of sorted values.
pub fn median_sorted(v: &[f64], t: f64) -> f64 {
    let k = floor_count(t * v.len() as f64);
    v[k.min(v.len() - 1)]
}

/// Half the shortest window holding all but the allowed excess of the sorted values.
pub fn sharp_median_sorted(v: &[f64], s: f64) -> f64 {
    let n = v.len();
    let w = n - allowed_excess(s, n).min(n - 1);
    (0..=n - w)
        .map(|i| v[i + w - 1] - v[i])
        .fold(f64::INFINITY, f64::min)
        / 2.0
}

/// `m_f(t, Q) = sup{M : |{y in Q : f(y) < M}| <= t |Q|}`.
pub fn median(f: &SampledFunction, t: f64, q: &Cube) -> f64 {
    median_sorted(&sorted(f.cube_values(q)), t)
}

/// `inf_c m_{|f - c|}(1 - s, Q)`, by the sliding-window reduction.
pub fn sharp_median(f: &SampledFunction, s: f64, q: &Cube) -> f64 {
    sharp_median_sorted(&sorted(f.cube_values(q)), s)
}

/// The plug-in variant `m_{|f - m_f(1-s, Q)|}(1 - s, Q)`.
pub fn sharp_median_plugin(f: &SampledFunction, s: f64, q: &Cube) -> f64 {
    let v = f.cube_values(q);
    let m = median_sorted(&sorted(v.clone()), 1.0 - s);
    median_sorted(&sorted(v.into_iter().map(|x| (x - m).abs()).collect()), 1.0 - s)
}

/// Direct evaluation of `inf{alpha >= 0 : #{|v - c| > alpha} < s n}` for one center `c`.
pub fn sharp_level(v: &[f64], s: f64, c: f64) -> f64 {
    let d = sorted(v.iter().map(|x| (x - c).abs()).collect());
    let j = allowed_excess(s, v.len()).min(v.len() - 1);
    d[v.len() - 1 - j]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use proptest::prelude::*;

    fn func(v: &[f64]) -> (SampledFunction, Cube) {
        let g = Grid::unit(1, v.len()).unwrap();
        let q = Cube::whole(&g);
        (SampledFunction::new(g, v.to_vec()).unwrap(), q)
    }

    #[test]
    fn examples() {
        let (f, q) = func(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(median(&f, 0.5, &q), 3.0);
        let (f, q) = func(&[0.0, 1.0, 2.0, 10.0]);
        assert_eq!(sharp_median(&f, 0.5, &q), 1.0);
        let (c, q) = func(&[2.5; 8]);
        assert_eq!(median(&c, 0.3, &q), 2.5);
        assert_eq!(sharp_median(&c, 0.5, &q), 0.0);
        assert_eq!(sharp_median_plugin(&c, 0.5, &q), 0.0);
    }

    #[test]
    fn continuum_limits() {
        let g = Grid::unit(1, 1024).unwrap();
        let f = SampledFunction::from_fn(&g, |p| p[0]).unwrap();
        let q = Cube::whole(&g);
        assert!((median(&f, 0.5, &q) - 0.5).abs() < 2.0 / 1024.0);
        assert!((sharp_median(&f, 0.5, &q) - 0.25).abs() < 2.0 / 1024.0);
    }

    #[test]
    fn rounding_of_counts() {
        // 0.3 * 10 rounds above 3 in floating point.
        assert_eq!(allowed_excess(0.3, 10), 2);
        assert_eq!(allowed_excess(0.5, 4), 1);
        assert_eq!(allowed_excess(0.5, 1), 0);
    }

    proptest! {
        #[test]
        fn window_equals_brute_force(raw in prop::collection::vec(-64i32..64, 1..40), s in prop::sample::select(vec![0.5, 0.3, 0.25, 0.1])) {
            let v: Vec<f64> = raw.iter().map(|&k| k as f64 / 4.0).collect();
            let sv = sorted(v.clone());
            let mut best = f64::INFINITY;
            for a in &v {
                for b in &v {
                    best = best.min(sharp_level(&v, s, 0.5 * (a + b)));
                }
            }
            prop_assert_eq!(sharp_median_sorted(&sv, s), best);
        }

        #[test]
        fn equivariance(raw in prop::collection::vec(-64i32..64, 1..40), t in 0.05f64..0.95, a in 1u32..8, b in -16i32..16) {
            let v: Vec<f64> = raw.iter().map(|&k| k as f64).collect();
            let m = median_sorted(&sorted(v.clone()), t);
            let w: Vec<f64> = v.iter().map(|x| a as f64 * x + b as f64).collect();
            prop_assert_eq!(median_sorted(&sorted(w), t), a as f64 * m + b as f64);
        }
    }
}

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Cube, SampledFunction};
use crate::maximal::median;
use crate::operators::{apply_spec, KernelSpec};

/// Smallest log-log decay rate of `|m_{Tf}(t, Q0)|` over the largest cubes that counts as decay.
pub const DECAY_SLOPE: f64 = -0.1;

/// Medians of `Tf` over an increasing sequence of centered cubes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFlag {
    /// `(side in cells, m_{Tf}(t, Q0))`, smallest cube first.
    pub medians: Vec<(usize, f64)>,
    pub slope: Option<f64>,
    pub flag: bool,
}

/// Medians of `tf` over centered cubes of side `N / 2^k`.
pub fn median_decay(tf: &SampledFunction, t: f64) -> DecayFlag {
    let g = tf.grid();
    let n = g.cells_per_side();
    let mut sides: Vec<usize> = (0..).map(|k| n >> k).take_while(|&m| m >= 1 && (n - m) % 2 == 0).take(5).collect();
    sides.reverse();
    let medians: Vec<(usize, f64)> = sides
        .iter()
        .map(|&m| {
            let c = (n - m) / 2;
            let q = Cube::new(&vec![c; g.dim()], m).expect("positive side");
            (m, median(tf, t, &q))
        })
        .collect();
    if medians.iter().all(|&(_, v)| v == 0.0) {
        return DecayFlag {
            medians,
            slope: None,
            flag: true,
        };
    }
    let k = medians.len();
    if k < 3 {
        return DecayFlag {
            medians,
            slope: None,
            flag: false,
        };
    }
    let top = &medians[k - 3..];
    let a: Vec<f64> = top.iter().map(|&(_, v)| v.abs()).collect();
    let decreasing = a[0] > a[1] && a[1] > a[2];
    let slope = if a[0] > 0.0 && a[2] > 0.0 {
        Some((a[2] / a[0]).ln() / (top[2].0 as f64 / top[0].0 as f64).ln())
    } else if a[2] == 0.0 {
        Some(f64::NEG_INFINITY)
    } else {
        None
    };
    let flag = decreasing && slope.is_some_and(|s| s <= DECAY_SLOPE);
    DecayFlag { medians, slope, flag }
}

/// Applies the kernel to `f` and checks that `m_{Tf}(t, Q0)` decays as `Q0` grows.
pub fn median_decay_check(kernel: &KernelSpec, f: &SampledFunction, t: f64) -> Result<DecayFlag> {
    Ok(median_decay(&apply_spec(kernel, f)?, t))
}

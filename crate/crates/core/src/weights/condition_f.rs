use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::geometry::{Cube, CubeFamily, SampledFunction};

/// Parameters `alpha in (0, 1)`, `beta > 0` of condition F.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionFParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ConditionFParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(config(format!("condition F needs alpha in (0, 1), got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(config(format!("condition F needs beta > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }
}

/// A subset `E` of a cube attaining the largest required constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FWitness {
    pub cube: Cube,
    #[serde(rename = "E")]
    pub subset: Vec<usize>,
    /// `w(E) / v(Q \ E)`; `+inf` is written as `null`.
    pub ratio: f64,
    pub required_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionF {
    pub c_emp: f64,
    pub witness: Option<FWitness>,
}

/// `max_{|E| = k} w(E) / v(Q \ E)` over subsets of the given cells, with the maximizer.
///
/// `w` and `v` are the values on the cube; the subset is returned as positions in them.
pub fn best_subset(w: &[f64], v: &[f64], k: usize) -> (f64, Vec<usize>) {
    let n = w.len();
    let total_v: f64 = v.iter().sum();
    if k == 0 {
        return (0.0, Vec::new());
    }
    // Subsets swallowing all of v: infinite ratio as soon as they carry w-mass.
    let positive: Vec<usize> = (0..n).filter(|&i| v[i] > 0.0).collect();
    if positive.len() <= k {
        let mut rest: Vec<usize> = (0..n).filter(|&i| v[i] <= 0.0).collect();
        rest.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
        let mut e = positive.clone();
        e.extend_from_slice(&rest[..k - positive.len()]);
        if e.iter().any(|&i| w[i] > 0.0) {
            e.sort_unstable();
            return (f64::INFINITY, e);
        }
    }
    let mut lambda = 0.0;
    let mut best = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..200 {
        order.sort_by(|&a, &b| {
            let (x, y) = (w[a] + lambda * v[a], w[b] + lambda * v[b]);
            y.total_cmp(&x).then(a.cmp(&b))
        });
        let e = &order[..k];
        let we: f64 = e.iter().map(|&i| w[i]).sum();
        let ve: f64 = e.iter().map(|&i| v[i]).sum();
        let rest = total_v - ve;
        if !(rest > 0.0) {
            break;
        }
        let next = we / rest;
        if best.is_empty() || next > lambda * (1.0 + 1e-15) {
            lambda = next;
            best = e.to_vec();
        } else {
            break;
        }
    }
    best.sort_unstable();
    (lambda, best)
}

/// Largest `lambda*(Q, k) / (k / n)^beta` over family cubes `Q` and sizes `1 <= k <= alpha n`.
pub fn condition_f_constant(w: &SampledFunction, v: &SampledFunction, params: ConditionFParams, family: &CubeFamily) -> Result<ConditionF> {
    if w.grid() != family.grid() || v.grid() != family.grid() {
        return Err(config("weights and cube family live on different grids"));
    }
    if !w.is_weight() || !v.is_weight() {
        return Err(domain("condition F needs nonnegative weights"));
    }
    let ConditionFParams { alpha, beta } = params;
    let cubes = family.enumerate_within(&Cube::whole(family.grid()));
    let per_cube: Vec<Option<FWitness>> = cubes
        .par_iter()
        .map(|q| {
            let cells: Vec<usize> = q.cells(w.grid()).collect();
            let n = cells.len();
            let wv: Vec<f64> = cells.iter().map(|&i| w.value(i)).collect();
            let vv: Vec<f64> = cells.iter().map(|&i| v.value(i)).collect();
            let kmax = ((alpha * n as f64) + 1e-9).floor() as usize;
            let mut top: Option<FWitness> = None;
            for k in 1..=kmax.min(n) {
                let (ratio, e) = best_subset(&wv, &vv, k);
                let required = ratio / (k as f64 / n as f64).powf(beta);
                if top.as_ref().map_or(required > 0.0, |t| required > t.required_c) {
                    top = Some(FWitness {
                        cube: *q,
                        subset: e.iter().map(|&j| cells[j]).collect(),
                        ratio,
                        required_c: required,
                    });
                }
            }
            top
        })
        .collect();
    let mut out = ConditionF {
        c_emp: 0.0,
        witness: None,
    };
    for wit in per_cube.into_iter().flatten() {
        if wit.required_c > out.c_emp {
            out.c_emp = wit.required_c;
            out.witness = Some(wit);
        }
    }
    Ok(out)
}

//! Geodesics between two points by shooting.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::manifold::MetricField;

use super::ode::{integrate, OdeStop};
use super::path::{options, shoot_geodesic, transport_rhs, GeodesicPath};

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    /// shoot from the full `8^(m−1)` direction grid instead of the chart
    /// straight-line guess only
    pub exhaustive: bool,
    pub max_iter: usize,
    /// endpoint residual in chart distance
    pub tol: f64,
    /// grid intervals of the returned paths
    pub steps: usize,
    /// relative length gap below which two minimizers tie
    pub tie: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { exhaustive: false, max_iter: 40, tol: 1e-10, steps: 32, tie: crate::Tolerances::default().tie }
    }
}

/// Geodesics from `p` to `q` on `[0, 1]`, shortest first.
#[derive(Clone, Debug)]
pub struct Minimizers {
    pub paths: Vec<GeodesicPath>,
    pub lengths: Vec<f64>,
    /// two or more distinct geodesics within the tie tolerance of the shortest
    pub ambiguous: bool,
}

impl Minimizers {
    pub fn shortest(&self) -> &GeodesicPath {
        &self.paths[0]
    }
}

fn endpoint(metric: &MetricField, p: &[f64], v: &[f64]) -> Option<Vec<f64>> {
    let m = metric.dim();
    let mut y: Vec<f64> = p.iter().chain(v).cloned().collect();
    let domain = metric.domain();
    let (_, stop) = integrate(|_, y, dy| transport_rhs(metric, y, dy), 0.0, &mut y, 1.0, &options(), |_, s| domain.contains(&s[..m]));
    (stop == OdeStop::Done).then(|| y[..m].to_vec())
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Damped Newton on `v ↦ exp_p(v) − q` with a difference Jacobian.
fn newton(metric: &MetricField, p: &[f64], q: &[f64], v0: &[f64], opts: &MinimizeOptions) -> Option<Vec<f64>> {
    let m = metric.dim();
    let mut v = v0.to_vec();
    let mut end = endpoint(metric, p, &v)?;
    let mut res = dist(&end, q);
    for _ in 0..opts.max_iter {
        if res < opts.tol {
            return Some(v);
        }
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-7 * vn.max(1e-3);
        let mut jac = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut vp = v.clone();
            vp[j] += h;
            let ep = endpoint(metric, p, &vp)?;
            for i in 0..m {
                jac[(i, j)] = (ep[i] - end[i]) / h;
            }
        }
        let f = DVector::from_fn(m, |i, _| end[i] - q[i]);
        let step = jac.lu().solve(&f)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = (0..m).map(|i| v[i] - lambda * step[i]).collect();
            if let Some(e) = endpoint(metric, p, &cand) {
                let r = dist(&e, q);
                if r < res {
                    v = cand;
                    end = e;
                    res = r;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (res < opts.tol).then_some(v)
}

/// Directions on the unit sphere: `8` per angular coordinate.
pub fn direction_grid(m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let total = 8usize.pow(m as u32 - 1);
    for idx in 0..total {
        let mut rem = idx;
        let mut angles = Vec::new();
        for k in 0..m - 1 {
            let j = rem % 8;
            rem /= 8;
            let a = if k == m - 2 {
                2.0 * std::f64::consts::PI * j as f64 / 8.0
            } else {
                std::f64::consts::PI * (j as f64 + 0.5) / 8.0
            };
            angles.push(a);
        }
        // hyperspherical coordinates
        let mut v = vec![0.0; m];
        let mut s = 1.0;
        for k in 0..m - 1 {
            v[k] = s * angles[k].cos();
            s *= angles[k].sin();
        }
        v[m - 1] = s;
        out.push(v);
    }
    out
}

/// Solves `exp_p(v) = q` by damped Newton started from the chart difference.
pub fn inverse_exp(metric: &MetricField, p: &[f64], q: &[f64], opts: &MinimizeOptions) -> Option<Vec<f64>> {
    if dist(p, q) == 0.0 {
        return Some(vec![0.0; p.len()]);
    }
    let straight: Vec<f64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
    newton(metric, p, q, &straight, opts)
}

/// Length of the chart segment from `p` to `q` (16-point midpoint rule).
fn segment_length(metric: &MetricField, p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
    let n = 16;
    (0..n)
        .map(|j| {
            let t = (j as f64 + 0.5) / n as f64;
            let x: Vec<f64> = p.iter().zip(&d).map(|(a, dd)| a + t * dd).collect();
            metric.norm(&x, &d)
        })
        .sum::<f64>()
        / n as f64
}

pub fn minimizing_geodesic(metric: &Arc<MetricField>, p: &[f64], q: &[f64], opts: &MinimizeOptions) -> Result<Minimizers> {
    let m = metric.dim();
    for x in [p, q] {
        if !metric.domain().contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
    }
    if dist(p, q) == 0.0 {
        let path = shoot_geodesic(metric, p, &vec![0.0; m], 1.0, opts.steps.max(8))?;
        return Ok(Minimizers { paths: vec![path], lengths: vec![0.0], ambiguous: false });
    }
    let straight: Vec<f64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
    let mut guesses = vec![straight.clone()];
    if opts.exhaustive {
        let len = segment_length(metric, p, q);
        for u in direction_grid(m) {
            let n = metric.norm(p, &u);
            guesses.push(u.iter().map(|c| c * len / n).collect());
        }
    }
    let solutions: Vec<Option<Vec<f64>>> = crate::exec::map(&guesses, |g| newton(metric, p, q, g, opts));
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    for v in solutions.into_iter().flatten() {
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if found.iter().any(|(_, w)| dist(w, &v) < 1e-6 * (1.0 + vn)) {
            continue;
        }
        found.push((metric.norm(p, &v), v));
    }
    if found.is_empty() {
        return Err(if opts.exhaustive {
            Error::NoGeodesic(format!("no shot from {p:?} reached {q:?} inside the chart"))
        } else {
            Error::NonConvergence(format!("shooting from {p:?} to {q:?} did not converge"))
        });
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite lengths"));
    let shortest = found[0].0;
    let ties = found.iter().filter(|(l, _)| *l <= shortest * (1.0 + opts.tie)).count();
    let mut paths = Vec::new();
    let mut lengths = Vec::new();
    for (l, v) in found {
        paths.push(shoot_geodesic(metric, p, &v, 1.0, opts.steps.max(8))?);
        lengths.push(l);
    }
    Ok(Minimizers { paths, lengths, ambiguous: ties > 1 })
}

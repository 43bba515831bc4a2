//! Tangent cones by exponential probes and extreme-point classification.

use nalgebra::{DMatrix, DVector};

use super::body::{ConvexBody, Membership, Shape};
use crate::algebra::symmetric_eigen;
use crate::error::{Error, Result};
use crate::exceptional::{grid::sphere_grid, orthogonal_complement_basis};
use crate::exec;
use crate::geodesic::shoot_geodesic;
use crate::manifold::{orthonormal_frame, Matrix};

fn mat_vec(a: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Probe scales `t₀, t₀/2, t₀/4`, largest first.
pub fn ladder(t0: f64) -> [f64; 3] {
    [t0, t0 / 2.0, t0 / 4.0]
}

/// Whether `exp_p(t v)` is a member for every ladder scale.
pub fn stays(body: &ConvexBody, p: &[f64], v: &[f64], t0: f64) -> bool {
    // 16 intervals put the ladder scales on grid points 4, 8 and 16
    let path = match shoot_geodesic(body.metric(), p, v, t0, 16) {
        Ok(path) => path,
        Err(_) => return false,
    };
    if path.truncated {
        return false;
    }
    [16, 8, 4].iter().all(|&j| body.is_member(&path.positions[j]))
}

/// Unit directions (orthonormal frame) closed under `u ↦ −u`: the first half
/// followed by its negation.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    pub half: Vec<Vec<f64>>,
}

impl ProbeSet {
    pub fn len(&self) -> usize {
        2 * self.half.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half.is_empty()
    }

    pub fn get(&self, i: usize) -> Vec<f64> {
        let n = self.half.len();
        if i < n {
            self.half[i].clone()
        } else {
            self.half[i - n].iter().map(|x| -x).collect()
        }
    }

    fn push_unique(&mut self, u: Vec<f64>) {
        let close = |a: &[f64], s: f64| a.iter().zip(&u).map(|(x, y)| (x - s * y).powi(2)).sum::<f64>() < 1e-18;
        if self.half.iter().any(|h| close(h, 1.0) || close(h, -1.0)) {
            return;
        }
        self.half.push(u);
    }
}

/// Sphere grid of at least `count` directions, plus a grid of the tangent
/// hyperplane of the boundary when the body has a conormal, plus chart
/// directions to nearby cloud points.
pub fn probe_set(body: &ConvexBody, p: &[f64], count: usize, t0: f64, frame_inv: &Matrix<f64>) -> ProbeSet {
    let m = body.dim();
    let mut set = ProbeSet { half: Vec::new() };
    if let Some(a) = body.conormal(p) {
        let nu = mat_vec(frame_inv, &a);
        if nu.iter().any(|x| *x != 0.0) {
            if let Ok(q) = orthogonal_complement_basis(&nu) {
                let tangent = if m == 2 { vec![vec![1.0]] } else { sphere_grid(m - 1, (count / 2).max(16)) };
                for w in tangent {
                    let u: Vec<f64> = (0..m).map(|i| (0..m - 1).map(|j| q[(i, j)] * w[j]).sum()).collect();
                    set.push_unique(unit(&u));
                }
            }
        }
    }
    if let Shape::Cloud { net, .. } = &body.shape {
        let (f, _) = orthonormal_frame(&body.metric().eval_unchecked(p));
        for x in net.points() {
            let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.5 * net.h() && n <= t0 {
                set.push_unique(unit(&mat_vec(&f, &d)));
            }
        }
    }
    for u in sphere_grid(m, count) {
        set.push_unique(u);
    }
    set
}

#[derive(Clone, Debug)]
pub struct ConeSample {
    pub point: Vec<f64>,
    pub t0: f64,
    /// no probing was needed: the point is inside the body
    pub interior: bool,
    /// probe directions in chart coordinates, `g(p)`-unit
    pub directions: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    /// orthonormal basis of `L̂_p` in chart coordinates (`g(p)`-orthonormal)
    pub lineality: Vec<Vec<f64>>,
    pub rank: usize,
}

impl ConeSample {
    pub fn generators(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.directions.iter().zip(&self.labels).filter(|(_, l)| **l).map(|(d, _)| d)
    }
}

/// Principal subspace of unit vectors (orthonormal frame): eigenvectors of
/// the second-moment matrix above `rel` of its top eigenvalue.
fn principal_subspace(vs: &[Vec<f64>], m: usize, rel: f64) -> Vec<DVector<f64>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let mut mom = DMatrix::zeros(m, m);
    for v in vs {
        let v = DVector::from_column_slice(v);
        mom += &v * v.transpose();
    }
    mom /= vs.len() as f64;
    let (w, q) = symmetric_eigen(&mom);
    let top = w.iter().cloned().fold(0.0, f64::max);
    (0..m).filter(|&i| w[i] > rel * top).map(|i| q.column(i).into_owned()).collect()
}

/// Labels probe directions by the exponential ladder and estimates `L̂_p`
/// and its dimension.
pub fn tangent_cone_sample(body: &ConvexBody, p: &[f64], directions: usize, t0: f64) -> Result<ConeSample> {
    if directions < 64 {
        return Err(Error::InvalidParameter(format!("{directions} cone directions; need at least 64")));
    }
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter("probe scale must be positive".into()));
    }
    let m = body.dim();
    let g = body.metric().eval(p)?;
    let (_, finv) = orthonormal_frame(&g);
    match body.contains(p) {
        Membership::Outside => return Err(Error::NotBoundary(format!("{p:?} is outside {}", body.name))),
        Membership::Inside => {
            let basis: Vec<Vec<f64>> =
                (0..m).map(|i| mat_vec(&finv, &(0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
            return Ok(ConeSample {
                point: p.to_vec(),
                t0,
                interior: true,
                directions: basis.clone(),
                labels: vec![true; m],
                lineality: basis,
                rank: m,
            });
        }
        Membership::Boundary => {}
    }
    let probes = probe_set(body, p, directions, t0, &finv);
    let units: Vec<Vec<f64>> = (0..probes.len()).map(|i| probes.get(i)).collect();
    let coords: Vec<Vec<f64>> = units.iter().map(|u| mat_vec(&finv, u)).collect();
    let labels: Vec<bool> = exec::map(&coords, |v| stays(body, p, v, t0));
    let half = probes.half.len();
    let pairs: Vec<Vec<f64>> = (0..half).filter(|&i| labels[i] && labels[i + half]).map(|i| units[i].clone()).collect();
    let basis = principal_subspace(&pairs, m, 0.1);
    let lineality = basis.iter().map(|b| mat_vec(&finv, b.as_slice())).collect();
    Ok(ConeSample { point: p.to_vec(), t0, interior: false, rank: basis.len(), directions: coords, labels, lineality })
}

#[derive(Clone, Debug)]
pub struct ExtremeVerdict {
    pub extreme: bool,
    /// chart direction `v` with `exp_p(±t v)` in the body for every ladder scale
    pub witness: Option<Vec<f64>>,
    pub t0: f64,
}

/// Non-extreme iff some direction stays in the body both ways along the
/// ladder; extreme otherwise, at the probed resolution `t0`.
pub fn classify_extreme(body: &ConvexBody, p: &[f64], directions: usize, t0: f64) -> Result<ExtremeVerdict> {
    if !body.is_member(p) {
        return Err(Error::NotBoundary(format!("{p:?} is not a member of {}", body.name)));
    }
    let g = body.metric().eval(p)?;
    let (_, finv) = orthonormal_frame(&g);
    let probes = probe_set(body, p, directions, t0, &finv);
    let half: Vec<Vec<f64>> = probes.half.iter().map(|u| mat_vec(&finv, u)).collect();
    let hits: Vec<bool> = exec::map(&half, |v| {
        let back: Vec<f64> = v.iter().map(|x| -x).collect();
        stays(body, p, v, t0) && stays(body, p, &back, t0)
    });
    let witness = hits.iter().position(|h| *h).map(|i| half[i].clone());
    Ok(ExtremeVerdict { extreme: witness.is_none(), witness, t0 })
}

//! Audits on convex bodies: boundary geodesics, the cone-parallelism
//! conditions, and strict convexity.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::body::{ConvexBody, Membership, Shape};
use super::cone::{classify_extreme, stays, tangent_cone_sample, ConeSample};
use crate::error::{Error, Result};
use crate::exceptional::{grid::sphere_grid, invariance_residual, orthogonal_complement_basis};
use crate::exec;
use crate::geodesic::{shoot_geodesic, GeodesicPath};
use crate::manifold::{curvature_operator, orthonormal_frame, Matrix};

fn mat_vec(a: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn gaussian_unit<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().any(|x| x.abs() > 1e-12) {
            return unit(&v);
        }
    }
}

/// Seeded boundary points: `exp_c(r u)` for geodesic balls, bisection of
/// `f` along chart rays from the center for sublevels.
pub fn boundary_points(body: &ConvexBody, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let m = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = body.metric().clone();
    match &body.shape {
        Shape::GeodesicBall { center, radius } => {
            let (_, finv) = orthonormal_frame(&metric.eval(center)?);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let v: Vec<f64> = mat_vec(&finv, &gaussian_unit(&mut rng, m)).iter().map(|x| x * radius).collect();
                let path = shoot_geodesic(&metric, center, &v, 1.0, 8)?;
                if path.truncated {
                    return Err(Error::InvalidParameter("geodesic ball leaves the chart".into()));
                }
                out.push(path.end().to_vec());
            }
            Ok(out)
        }
        Shape::Sublevel { f, .. } => {
            let c = body.center.clone().ok_or_else(|| Error::InvalidParameter(format!("{} has no center", body.name)))?;
            if body.contains(&c) != Membership::Inside {
                return Err(Error::InvalidParameter(format!("center of {} is not inside", body.name)));
            }
            let dom = metric.domain();
            let mut out = Vec::with_capacity(count);
            let mut attempts = 0;
            while out.len() < count {
                attempts += 1;
                if attempts > 50 * count + 100 {
                    return Err(Error::InvalidParameter(format!("{}: too few boundary hits inside the chart", body.name)));
                }
                let u = gaussian_unit(&mut rng, m);
                // largest chart step that stays in the domain
                let mut tmax = f64::INFINITY;
                for i in 0..m {
                    if u[i] > 0.0 {
                        tmax = tmax.min((dom.hi[i] - c[i]) / u[i]);
                    } else if u[i] < 0.0 {
                        tmax = tmax.min((dom.lo[i] - c[i]) / u[i]);
                    }
                }
                let tmax = tmax * (1.0 - 1e-9);
                let at = |t: f64| -> Vec<f64> { c.iter().zip(&u).map(|(a, b)| a + t * b).collect() };
                if f(&at(tmax)) <= 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, tmax);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(&at(mid)) <= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.max(1.0) {
                        break;
                    }
                }
                out.push(at(0.5 * (lo + hi)));
            }
            Ok(out)
        }
        Shape::Cloud { .. } => Err(Error::InvalidParameter("boundary sampling needs a sublevel or a geodesic ball".into())),
    }
}

/// Fails with `NoBoundaryGeodesic` unless every recorded point of `path`
/// lies in the boundary band.
pub fn check_boundary_geodesic(body: &ConvexBody, path: &GeodesicPath) -> Result<()> {
    if path.speed() == 0.0 {
        return Err(Error::NoBoundaryGeodesic("the geodesic is constant".into()));
    }
    if path.truncated {
        return Err(Error::NoBoundaryGeodesic("the geodesic leaves the chart".into()));
    }
    for (t, x) in path.times.iter().zip(&path.positions) {
        match body.contains(x) {
            Membership::Boundary => {}
            other => {
                return Err(Error::NoBoundaryGeodesic(format!(
                    "{} leaves the boundary band at t = {t} ({other:?}, value {:e})",
                    body.name,
                    body.value(x)
                )))
            }
        }
    }
    Ok(())
}

/// First geodesic of the given length from `p`, tangent to the boundary,
/// that stays in the boundary band.
pub fn find_boundary_geodesic(body: &ConvexBody, p: &[f64], length: f64, directions: usize) -> Result<GeodesicPath> {
    let m = body.dim();
    let a = body.conormal(p).ok_or_else(|| Error::NoBoundaryGeodesic("body has no conormal".into()))?;
    let (_, finv) = orthonormal_frame(&body.metric().eval(p)?);
    let nu = mat_vec(&finv, &a);
    let q = orthogonal_complement_basis(&nu)?;
    let tangent = if m == 2 { vec![vec![1.0], vec![-1.0]] } else { sphere_grid(m - 1, directions.max(16)) };
    for w in tangent {
        let u: Vec<f64> = (0..m).map(|i| (0..m - 1).map(|j| q[(i, j)] * w[j]).sum()).collect();
        let v: Vec<f64> = mat_vec(&finv, &u).iter().map(|x| x * length).collect();
        let path = shoot_geodesic(body.metric(), p, &v, 1.0, 64)?;
        if check_boundary_geodesic(body, &path).is_ok() {
            return Ok(path);
        }
    }
    Err(Error::NoBoundaryGeodesic(format!("no tangent geodesic of length {length} from {p:?} stays in the boundary of {}", body.name)))
}

#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub directions: usize,
    pub t0: f64,
    /// pass threshold for cone parallelism and condition (b)
    pub tol: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions { directions: 64, t0: 0.1, tol: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct KeyLemmaAudit {
    pub times: Vec<f64>,
    pub ranks: Vec<usize>,
    /// symmetric set distance between transported and reference generators
    pub cone_deviation: Vec<f64>,
    /// invariance residual of transported `L̂` under `R²_{γ'}`
    pub condition_b: Vec<f64>,
    /// `L̂` directions whose `R²` image is neither in `L̂` nor a probed cone direction
    pub condition_a_failures: usize,
    pub tol: f64,
}

impl KeyLemmaAudit {
    pub fn max_deviation(&self) -> f64 {
        self.cone_deviation.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_condition_b(&self) -> f64 {
        self.condition_b.iter().cloned().fold(0.0, f64::max)
    }

    pub fn parallel(&self) -> bool {
        self.max_deviation() <= self.tol
    }

    pub fn passes(&self) -> bool {
        self.parallel() && self.max_condition_b() <= self.tol && self.condition_a_failures == 0
    }
}

/// Unit generators in the orthonormal frame at the point of `cone`.
fn framed_generators(cone: &ConeSample, frame: &Matrix<f64>) -> Vec<Vec<f64>> {
    cone.generators().map(|v| unit(&mat_vec(frame, v))).collect()
}

fn set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let one = |s: &[Vec<f64>], t: &[Vec<f64>]| -> f64 {
        s.iter().map(|x| t.iter().map(|y| d(x, y)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => one(a, b).max(one(b, a)),
    }
}

fn orthonormal_columns(vs: &[Vec<f64>]) -> DMatrix<f64> {
    let a = DMatrix::from_columns(&vs.iter().map(|v| DVector::from_column_slice(v)).collect::<Vec<_>>());
    a.qr().q()
}

/// Cone parallelism along `γ` and conditions (a) and (b) at `samples`
/// equally spaced times. Refuses unless `γ` runs in the boundary band.
pub fn key_lemma_audit(body: &ConvexBody, path: &GeodesicPath, samples: usize, opts: &AuditOptions) -> Result<KeyLemmaAudit> {
    if samples < 2 {
        return Err(Error::InvalidParameter("key-lemma audit needs at least 2 samples".into()));
    }
    check_boundary_geodesic(body, path)?;
    let metric = body.metric().clone();
    let (t0, t1) = (path.start_time(), path.end_time());
    let times: Vec<f64> = (0..samples).map(|j| t0 + (t1 - t0) * j as f64 / (samples - 1) as f64).collect();
    let states: Vec<(Vec<f64>, Vec<f64>)> = times.iter().map(|t| path.state_at(*t)).collect::<Result<_>>()?;
    let cones: Vec<ConeSample> = states
        .iter()
        .map(|(x, _)| tangent_cone_sample(body, x, opts.directions, opts.t0))
        .collect::<Result<_>>()?;
    let frames: Vec<(Matrix<f64>, Matrix<f64>)> =
        states.iter().map(|(x, _)| metric.eval(x).map(|g| orthonormal_frame(&g))).collect::<Result<_>>()?;

    let reference = framed_generators(&cones[0], &frames[0].0);
    let cone_deviation: Vec<f64> = exec::map_range(samples, |j| -> Result<f64> {
        if j == 0 {
            return Ok(0.0);
        }
        let gens: Vec<Vec<f64>> = cones[j].generators().cloned().collect();
        if gens.is_empty() {
            return Ok(if reference.is_empty() { 0.0 } else { f64::INFINITY });
        }
        let (_, _, back) = path.transport(times[j], times[0], &gens)?;
        let framed: Vec<Vec<f64>> = back.iter().map(|w| unit(&mat_vec(&frames[0].0, w))).collect();
        Ok(set_distance(&framed, &reference))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    // L̂ at the start, carried along γ
    let l0 = cones[0].lineality.clone();
    let mut carried = vec![l0.clone()];
    for w in times.windows(2) {
        let prev = carried.last().expect("nonempty").clone();
        let next = if prev.is_empty() { prev } else { path.transport(w[0], w[1], &prev)?.2 };
        carried.push(next);
    }
    let mut condition_b = Vec::with_capacity(samples);
    let mut condition_a_failures = 0;
    for (j, (x, v)) in states.iter().enumerate() {
        let r2 = curvature_operator(&metric, x, v)?;
        let f = &frames[j].0;
        if carried[j].is_empty() {
            condition_b.push(0.0);
        } else {
            let framed: Vec<Vec<f64>> = carried[j].iter().map(|w| mat_vec(f, w)).collect();
            condition_b.push(invariance_residual(&[r2.clone()], &orthonormal_columns(&framed)));
        }
        // condition (a) on the local linear part
        let lin: Vec<Vec<f64>> = cones[j].lineality.iter().map(|w| unit(&mat_vec(f, w))).collect();
        if lin.is_empty() {
            continue;
        }
        let basis = orthonormal_columns(&lin);
        let scale = r2.iter().flatten().map(|a| a * a).sum::<f64>().sqrt();
        for u in &lin {
            for sign in [1.0, -1.0] {
                let uu: Vec<f64> = u.iter().map(|a| sign * a).collect();
                let w = DVector::from_vec(mat_vec(&r2, &uu));
                let out = &w - &basis * (basis.transpose() * &w);
                if out.norm() <= opts.tol * scale.max(f64::MIN_POSITIVE) || w.norm() == 0.0 {
                    continue;
                }
                // R²u leaves L̂: probe the cone direction u + s·R²u
                let s = 0.1 / w.norm();
                let dir: Vec<f64> = uu.iter().zip(w.iter()).map(|(a, b)| a + s * b).collect();
                let coords = mat_vec(&frames[j].1, &unit(&dir));
                if !stays(body, x, &coords, opts.t0) {
                    condition_a_failures += 1;
                }
            }
        }
    }
    Ok(KeyLemmaAudit {
        times,
        ranks: cones.iter().map(|c| c.rank).collect(),
        cone_deviation,
        condition_b,
        condition_a_failures,
        tol: opts.tol,
    })
}

#[derive(Clone, Debug)]
pub struct BoundaryPointReport {
    pub point: Vec<f64>,
    pub extreme: bool,
    pub witness: Option<Vec<f64>>,
    /// estimated rank, for non-extreme points
    pub rank: Option<usize>,
    /// non-extreme with rank other than 1
    pub flagged: bool,
}

#[derive(Clone, Debug)]
pub struct StrictConvexityReport {
    pub body: String,
    pub t0: f64,
    pub points: Vec<BoundaryPointReport>,
}

impl StrictConvexityReport {
    pub fn non_extreme(&self) -> usize {
        self.points.iter().filter(|p| !p.extreme).count()
    }

    pub fn flagged(&self) -> usize {
        self.points.iter().filter(|p| p.flagged).count()
    }
}

/// Classifies seeded boundary samples; non-extreme points get a rank
/// estimate and are flagged unless the rank is 1.
pub fn strict_convexity_audit(body: &ConvexBody, samples: usize, seed: u64, opts: &AuditOptions) -> Result<StrictConvexityReport> {
    if matches!(body.shape, Shape::Cloud { .. }) {
        return Err(Error::InvalidParameter("strict-convexity audit needs a smooth boundary".into()));
    }
    let pts = boundary_points(body, samples, seed)?;
    let points = pts
        .into_iter()
        .map(|p| -> Result<BoundaryPointReport> {
            let v = classify_extreme(body, &p, opts.directions, opts.t0)?;
            if v.extreme {
                return Ok(BoundaryPointReport { point: p, extreme: true, witness: None, rank: None, flagged: false });
            }
            let cone = tangent_cone_sample(body, &p, opts.directions, opts.t0)?;
            Ok(BoundaryPointReport { point: p, extreme: false, witness: v.witness, rank: Some(cone.rank), flagged: cone.rank != 1 })
        })
        .collect::<Result<_>>()?;
    Ok(StrictConvexityReport { body: body.name.clone(), t0: opts.t0, points })
}

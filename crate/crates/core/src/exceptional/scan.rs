//! Direction scans, geodesic scans and the random-jet survey.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::{
    eigen_clusters, invariance_residual, irreducibility_margin, orthogonal_complement_basis,
    restrict_to_orthogonal, symmetric_commutant, to_dm, verdict_from_margin, Verdict,
};
use super::grid::sphere_grid;
use crate::error::{Error, Result};
use crate::exec;
use crate::geodesic::GeodesicPath;
use crate::jets::{inverse_rho, random_curvature_jet};
use crate::manifold::{curvature_operator, jacobi_operator_stack, orthonormal_frame, JacobiPolynomials, Matrix, MetricField};
use crate::Tolerances;

fn mat_vec(a: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Relative margin of the family `R²_x, …, R^k_x` built from `polys`.
pub fn direction_margin(polys: &JacobiPolynomials, x: &[f64], tol: &Tolerances) -> Result<f64> {
    let s = polys.stack(x)?;
    let bs = restrict_to_orthogonal(&s.operators, &s.x_hat, tol.sym.max(1e-7))?;
    Ok(irreducibility_margin(&bs).relative)
}

#[derive(Clone, Debug)]
pub struct DirectionSample {
    /// chart coordinates, `g(p)`-unit
    pub direction: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct DirectionScan {
    pub point: Vec<f64>,
    pub order: usize,
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    /// every probed direction with margin at most `τ_margin`
    pub exceptional: Vec<Vec<f64>>,
    /// grid samples followed by refinement results
    pub samples: Vec<DirectionSample>,
}

impl DirectionScan {
    pub fn verdict(&self, tol: &Tolerances) -> Verdict {
        verdict_from_margin(self.min_margin, tol.margin)
    }
}

fn unit(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Compass search on the unit sphere (orthonormal frame), stopping at zero.
fn refine(eval: &(dyn Fn(&[f64]) -> f64 + Sync), start: &[f64], f0: f64, step: f64) -> (Vec<f64>, f64) {
    let (mut u, mut best) = (start.to_vec(), f0);
    let mut s = step;
    let mut iters = 0;
    while s > 1e-7 && best > 0.0 && iters < 200 {
        iters += 1;
        let q = match orthogonal_complement_basis(&u) {
            Ok(q) => q,
            Err(_) => break,
        };
        let mut improved = false;
        for j in 0..q.ncols() {
            for sign in [1.0, -1.0] {
                let mut cand: Vec<f64> = u.iter().enumerate().map(|(i, x)| x + sign * s * q[(i, j)]).collect();
                unit(&mut cand);
                let f = eval(&cand);
                if f < best {
                    best = f;
                    u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            s *= 0.5;
        }
    }
    (u, best)
}

/// Margin over a quasi-uniform grid of `g(p)`-unit directions (at least
/// `grid` of them), then compass refinement of the best few.
pub fn scan_directions(metric: &MetricField, p: &[f64], k: usize, grid: usize, tol: &Tolerances) -> Result<DirectionScan> {
    if grid < 32 {
        return Err(Error::InvalidParameter(format!("direction grid {grid} is below 32")));
    }
    let polys = JacobiPolynomials::new(metric, p, k)?;
    scan_with(&polys, grid, tol)
}

pub(crate) fn scan_with(polys: &JacobiPolynomials, grid: usize, tol: &Tolerances) -> Result<DirectionScan> {
    let m = polys.dim();
    let finv = polys.frame_inv.clone();
    let to_chart = |u: &[f64]| mat_vec(&finv, u);
    let eval = |u: &[f64]| direction_margin(polys, &to_chart(u), tol).unwrap_or(f64::INFINITY);
    let units = sphere_grid(m, grid);
    let margins: Vec<f64> = exec::map(&units, |u| eval(u));
    if margins.iter().all(|v| !v.is_finite()) && m >= 3 {
        // surface the underlying failure
        direction_margin(polys, &to_chart(&units[0]), tol)?;
    }
    let mut order: Vec<usize> = (0..units.len()).collect();
    order.sort_by(|&a, &b| margins[a].total_cmp(&margins[b]));
    let step = (4.0 / units.len() as f64).powf(1.0 / (m.max(2) - 1) as f64);
    let seeds: Vec<usize> = order.iter().take(4).cloned().filter(|i| margins[*i].is_finite()).collect();
    let refined: Vec<(Vec<f64>, f64)> = exec::map(&seeds, |&i| refine(&eval, &units[i], margins[i], step));
    let mut samples: Vec<DirectionSample> = units
        .iter()
        .zip(&margins)
        .map(|(u, v)| DirectionSample { direction: to_chart(u), margin: *v })
        .collect();
    samples.extend(refined.into_iter().map(|(u, v)| DirectionSample { direction: to_chart(&u), margin: v }));
    let best = samples.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("nonempty grid");
    Ok(DirectionScan {
        point: polys.point.clone(),
        order: polys.order,
        min_margin: best.margin,
        argmin: best.direction.clone(),
        exceptional: samples.iter().filter(|s| s.margin <= tol.margin).map(|s| s.direction.clone()).collect(),
        samples,
    })
}

/// A candidate subspace carried along the geodesic.
#[derive(Clone, Debug)]
pub struct TransportedSubspace {
    pub dim: usize,
    /// coordinate basis at each sample time
    pub bases: Vec<Vec<Vec<f64>>>,
    /// invariance residual of `R²_{γ'}` at each sample
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GeodesicScan {
    pub verdict: Verdict,
    pub times: Vec<f64>,
    /// relative margin of the order-`k` family at each sample
    pub margins: Vec<f64>,
    pub candidates: usize,
    pub surviving: Vec<TransportedSubspace>,
}

/// Nonempty proper subsets of the clusters, each as `x̂ ⊕ span(subset)`
/// in the orthonormal frame.
fn candidate_subspaces(x_hat: &[f64], clusters: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    let q = orthogonal_complement_basis(x_hat)?;
    let m = x_hat.len();
    let xn = x_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = clusters.len();
    let mut out = Vec::new();
    for mask in 1..(1u32 << r) - 1 {
        let mut cols = vec![DVector::from_iterator(m, x_hat.iter().map(|v| v / xn))];
        for (c, cl) in clusters.iter().enumerate() {
            if mask & (1 << c) != 0 {
                for j in 0..cl.ncols() {
                    cols.push(&q * cl.column(j));
                }
            }
        }
        out.push(DMatrix::from_columns(&cols));
    }
    Ok(out)
}

fn orthonormal_columns(vs: &[Vec<f64>]) -> DMatrix<f64> {
    let a = DMatrix::from_columns(&vs.iter().map(|v| DVector::from_column_slice(v)).collect::<Vec<_>>());
    a.qr().q()
}

fn margin_of_stack(metric: &MetricField, p: &[f64], v: &[f64], k: usize, tol: &Tolerances) -> Result<f64> {
    let s = jacobi_operator_stack(metric, p, v, k)?;
    let bs = restrict_to_orthogonal(&s.operators, &s.x_hat, tol.sym.max(1e-7))?;
    Ok(irreducibility_margin(&bs).relative)
}

/// Searches for a parallel family of exceptional `R²`-invariant subspaces
/// along `path`, sampled at `samples` equally spaced times.
pub fn scan_geodesic(path: &GeodesicPath, k: usize, samples: usize, tol: &Tolerances) -> Result<GeodesicScan> {
    if samples < 3 {
        return Err(Error::InvalidParameter(format!("{samples} samples; need at least 3")));
    }
    path.require_complete()?;
    let metric: Arc<MetricField> = path.metric().clone();
    let m = path.dim();
    let (t0, t1) = (path.start_time(), path.end_time());
    let times: Vec<f64> = (0..samples).map(|j| t0 + (t1 - t0) * j as f64 / (samples - 1) as f64).collect();
    let states: Vec<(Vec<f64>, Vec<f64>)> = times.iter().map(|t| path.state_at(*t)).collect::<Result<_>>()?;
    let margins: Vec<f64> = exec::map(&states, |(p, v)| margin_of_stack(&metric, p, v, k, tol))
        .into_iter()
        .collect::<Result<_>>()?;

    let mut candidates = Vec::new();
    if m >= 3 {
        let s = jacobi_operator_stack(&metric, &states[0].0, &states[0].1, k)?;
        let bs = restrict_to_orthogonal(&s.operators, &s.x_hat, tol.sym.max(1e-7))?;
        let comm = symmetric_commutant(&bs, tol.margin);
        if comm.dim >= 2 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let n = m - 1;
            let mut c = DMatrix::zeros(n, n);
            for b in &comm.basis {
                c += to_dm(b) * rng.gen_range(-1.0..1.0);
            }
            let clusters = eigen_clusters(&c, 1e-6 * c.norm().max(f64::MIN_POSITIVE));
            if clusters.len() >= 2 {
                let (_, finv) = orthonormal_frame(&metric.eval(&states[0].0)?);
                for v in candidate_subspaces(&s.x_hat, &clusters)? {
                    let coords: Vec<Vec<f64>> =
                        (0..v.ncols()).map(|j| mat_vec(&finv, v.column(j).as_slice())).collect();
                    candidates.push(coords);
                }
            }
        }
    }

    let families: Vec<Result<TransportedSubspace>> = exec::map(&candidates, |basis| {
        let mut bases = vec![basis.clone()];
        let mut current = basis.clone();
        for w in times.windows(2) {
            let (_, _, next) = path.transport(w[0], w[1], &current)?;
            bases.push(next.clone());
            current = next;
        }
        let residuals = bases
            .iter()
            .zip(&states)
            .map(|(b, (p, v))| {
                let r2 = curvature_operator(&metric, p, v)?;
                let (f, _) = orthonormal_frame(&metric.eval(p)?);
                let framed: Vec<Vec<f64>> = b.iter().map(|w| mat_vec(&f, w)).collect();
                Ok(invariance_residual(&[r2], &orthonormal_columns(&framed)))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(TransportedSubspace { dim: basis.len(), bases, residuals })
    });
    let families: Vec<TransportedSubspace> = families.into_iter().collect::<Result<_>>()?;
    let count = families.len();
    let surviving: Vec<TransportedSubspace> =
        families.into_iter().filter(|f| f.residuals.iter().all(|r| *r <= tol.inv)).collect();
    let verdict = if !surviving.is_empty() {
        Verdict::Exceptional
    } else if count == 0 && m >= 3 && margins[0] <= 10.0 * tol.margin {
        Verdict::Inconclusive
    } else {
        Verdict::NotExceptional
    };
    Ok(GeodesicScan { verdict, times, margins, candidates: count, surviving })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyRow {
    pub sample: usize,
    pub min_margin: Option<f64>,
    pub argmin: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetSurvey {
    pub dim: usize,
    pub order: usize,
    pub seed: u64,
    pub rows: Vec<SurveyRow>,
}

impl JetSurvey {
    fn completed(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(|r| r.min_margin)
    }

    /// Fraction of completed samples with min margin at most `tau`.
    pub fn fraction_exceptional(&self, tau: f64) -> f64 {
        let n = self.completed().count();
        if n == 0 {
            return f64::NAN;
        }
        self.completed().filter(|v| *v <= tau).count() as f64 / n as f64
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Sorted min margins of completed samples.
    pub fn distribution(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.completed().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// One survey sample: random curvature jet, its normal metric jet, and a
/// direction scan at the origin. Sample `i` uses its own seeded stream.
pub fn survey_sample(m: usize, k: usize, seed: u64, i: usize, grid: usize, tol: &Tolerances) -> SurveyRow {
    let run = || -> Result<DirectionScan> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let r = random_curvature_jet(m, k, &mut rng, 3)?;
        let jet = inverse_rho(&r)?;
        let metric = MetricField::from_jet(&jet, 0.05)?;
        let polys = JacobiPolynomials::new(&metric, &vec![0.0; m], k)?;
        scan_with(&polys, grid, tol)
    };
    match run() {
        Ok(s) => SurveyRow { sample: i, min_margin: Some(s.min_margin), argmin: Some(s.argmin), error: None },
        Err(e) => SurveyRow { sample: i, min_margin: None, argmin: None, error: Some(e.to_string()) },
    }
}

pub fn random_jet_survey(m: usize, k: usize, samples: usize, seed: u64, grid: usize, tol: &Tolerances) -> Result<JetSurvey> {
    if !(3..=4).contains(&m) {
        return Err(Error::InvalidParameter(format!("survey dimension {m} not in 3..=4")));
    }
    if !(2..=6).contains(&k) {
        return Err(Error::InvalidOrder(k));
    }
    if grid < 32 {
        return Err(Error::InvalidParameter(format!("direction grid {grid} is below 32")));
    }
    let rows = exec::map_range(samples, |i| survey_sample(m, k, seed, i, grid, tol));
    Ok(JetSurvey { dim: m, order: k, seed, rows })
}

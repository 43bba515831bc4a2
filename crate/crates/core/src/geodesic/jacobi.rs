//! Jacobi fields in a parallel orthonormal frame.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::manifold::local::LocalGeometry;
use crate::manifold::{Matrix, MetricField};
use crate::Tolerances;

use super::ode::integrate;
use super::path::{options, GeodesicPath};

/// Jacobi field sampled on a uniform grid.
#[derive(Clone, Debug)]
pub struct JacobiField {
    pub times: Vec<f64>,
    /// `J(t_j)` in chart coordinates
    pub values: Vec<Vec<f64>>,
    /// `∇_{γ'}J(t_j)` in chart coordinates
    pub derivatives: Vec<Vec<f64>>,
    /// coefficients of `J` and `∇J` in the parallel frame
    pub frame_values: Vec<Vec<f64>>,
    pub frame_derivatives: Vec<Vec<f64>>,
    /// `R²_{γ'}` in the parallel frame at each sample
    pub operators: Vec<Matrix<f64>>,
}

impl JacobiField {
    pub fn value_at_end(&self) -> &[f64] {
        self.values.last().expect("nonempty field")
    }

    /// Largest relative residual of `y'' + R y = 0` on the interior grid,
    /// with `y''` from a fourth-order difference of the integrated `y'`.
    pub fn residual(&self) -> f64 {
        let n = self.times.len();
        if n < 5 {
            return 0.0;
        }
        let h = self.times[1] - self.times[0];
        let m = self.frame_values[0].len();
        let scale = self
            .frame_values
            .iter()
            .chain(&self.frame_derivatives)
            .flatten()
            .fold(1e-300f64, |a, v| a.max(v.abs()));
        let mut worst = 0.0f64;
        for j in 2..n - 2 {
            for i in 0..m {
                let d = &self.frame_derivatives;
                let ypp = (-d[j + 2][i] + 8.0 * d[j + 1][i] - 8.0 * d[j - 1][i] + d[j - 2][i]) / (12.0 * h);
                let ry: f64 = (0..m).map(|k| self.operators[j][i][k] * self.frame_values[j][k]).sum();
                worst = worst.max((ypp + ry).abs());
            }
        }
        worst / scale
    }
}

/// Orthonormal basis of `g(x)` with first vector along `v` (Gram–Schmidt),
/// returned as columns.
pub fn adapted_frame(metric: &MetricField, x: &[f64], v: &[f64]) -> Matrix<f64> {
    let m = metric.dim();
    let mut cands: Vec<Vec<f64>> = vec![v.to_vec()];
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        cands.push(e);
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut c in cands {
        for b in &basis {
            let ip = metric.inner(x, &c, b);
            for k in 0..m {
                c[k] -= ip * b[k];
            }
        }
        let n = metric.norm(x, &c);
        if n > 1e-8 {
            basis.push(c.iter().map(|t| t / n).collect());
        }
        if basis.len() == m {
            break;
        }
    }
    basis
}

/// State `(x, v, E₁…E_m, Y, Y')` with `r` solution columns, in frame
/// coordinates. Returns samples of `(E, Y, Y', R)` at `n + 1` uniform times.
struct FrameRun {
    frames: Vec<Matrix<f64>>,
    ys: Vec<Vec<Vec<f64>>>,
    yps: Vec<Vec<Vec<f64>>>,
    ops: Vec<Matrix<f64>>,
    times: Vec<f64>,
}

/// `R_ij = ⟨Rm(E_j, v)v, E_i⟩` with the row and column of `E₁ ∥ v` removed.
fn frame_operator(geo: &LocalGeometry, frame: &[Vec<f64>], v: &[f64]) -> Matrix<f64> {
    let m = frame.len();
    let mut r = vec![vec![0.0; m]; m];
    for j in 1..m {
        let rv = geo.rm(&frame[j], v, v);
        for i in 1..m {
            r[i][j] = geo.inner(&rv, &frame[i]);
        }
    }
    // symmetrize away round-off
    for i in 1..m {
        for j in (i + 1)..m {
            let s = 0.5 * (r[i][j] + r[j][i]);
            r[i][j] = s;
            r[j][i] = s;
        }
    }
    r
}

fn run_frame_system(
    metric: &MetricField,
    x0: &[f64],
    v0: &[f64],
    a: f64,
    b: f64,
    y0: &[Vec<f64>],
    yp0: &[Vec<f64>],
    n: usize,
) -> Result<FrameRun> {
    let m = metric.dim();
    let r = y0.len();
    let frame0 = adapted_frame(metric, x0, v0);
    if frame0.len() != m {
        return Err(Error::ZeroDirection);
    }
    let mut y: Vec<f64> = x0.iter().chain(v0).cloned().collect();
    for e in &frame0 {
        y.extend_from_slice(e);
    }
    for col in y0 {
        y.extend_from_slice(col);
    }
    for col in yp0 {
        y.extend_from_slice(col);
    }
    let base = 2 * m + m * m;
    let rhs = |_: f64, s: &[f64], ds: &mut [f64]| {
        let x = &s[..m];
        let v = &s[m..2 * m];
        let geo = match LocalGeometry::at(metric, x, true) {
            Ok(g) => g,
            Err(_) => {
                ds.iter_mut().for_each(|d| *d = f64::NAN);
                return;
            }
        };
        ds[..m].copy_from_slice(v);
        let mut tmp = vec![0.0; m];
        geo.gamma_apply(v, v, &mut tmp);
        for c in 0..m {
            ds[m + c] = -tmp[c];
        }
        let frame: Vec<Vec<f64>> = (0..m).map(|i| s[2 * m + i * m..2 * m + (i + 1) * m].to_vec()).collect();
        for (i, e) in frame.iter().enumerate() {
            geo.gamma_apply(v, e, &mut tmp);
            for c in 0..m {
                ds[2 * m + i * m + c] = -tmp[c];
            }
        }
        let rmat = frame_operator(&geo, &frame, v);
        for k in 0..r {
            let yo = base + k * m;
            let ypo = base + r * m + k * m;
            for i in 0..m {
                ds[yo + i] = s[ypo + i];
                ds[ypo + i] = -(0..m).map(|j| rmat[i][j] * s[yo + j]).sum::<f64>();
            }
        }
    };
    let unpack = |s: &[f64]| -> (Matrix<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>, Matrix<f64>) {
        let frame: Vec<Vec<f64>> = (0..m).map(|i| s[2 * m + i * m..2 * m + (i + 1) * m].to_vec()).collect();
        let ys = (0..r).map(|k| s[base + k * m..base + (k + 1) * m].to_vec()).collect();
        let yps = (0..r).map(|k| s[base + r * m + k * m..base + r * m + (k + 1) * m].to_vec()).collect();
        let geo = LocalGeometry::at(metric, &s[..m], true);
        let op = match geo {
            Ok(g) => frame_operator(&g, &frame, &s[m..2 * m]),
            Err(_) => vec![vec![f64::NAN; m]; m],
        };
        (frame, ys, yps, op)
    };
    let mut run = FrameRun { frames: vec![], ys: vec![], yps: vec![], ops: vec![], times: vec![] };
    let push = |run: &mut FrameRun, t: f64, s: &[f64]| {
        let (f, ys, yps, op) = unpack(s);
        run.frames.push(f);
        run.ys.push(ys);
        run.yps.push(yps);
        run.ops.push(op);
        run.times.push(t);
    };
    push(&mut run, a, &y);
    let domain = metric.domain().clone();
    for j in 1..=n {
        let t0 = a + (b - a) * (j - 1) as f64 / n as f64;
        let t1 = if j == n { b } else { a + (b - a) * j as f64 / n as f64 };
        let (_, stop) = integrate(rhs, t0, &mut y, t1, &options(), |_, s| domain.contains(&s[..m]));
        if stop != super::ode::OdeStop::Done {
            return Err(Error::Truncated(t0));
        }
        push(&mut run, t1, &y);
    }
    Ok(run)
}

fn to_coords(frame: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = frame.len();
    (0..m).map(|c| (0..m).map(|i| y[i] * frame[i][c]).sum()).collect()
}

fn to_frame(metric: &MetricField, x: &[f64], frame: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    frame.iter().map(|e| metric.inner(x, e, v)).collect()
}

fn field_from(run: &FrameRun, y: Vec<Vec<f64>>, yp: Vec<Vec<f64>>) -> JacobiField {
    let values = run.frames.iter().zip(&y).map(|(f, v)| to_coords(f, v)).collect();
    let derivatives = run.frames.iter().zip(&yp).map(|(f, v)| to_coords(f, v)).collect();
    JacobiField {
        times: run.times.clone(),
        values,
        derivatives,
        frame_values: y,
        frame_derivatives: yp,
        operators: run.ops.clone(),
    }
}

/// Jacobi field along the whole path with `J(t₀) = j0`, `∇J(t₀) = j0dot`,
/// sampled on `n` uniform intervals.
pub fn jacobi_ivp_sampled(path: &GeodesicPath, j0: &[f64], j0dot: &[f64], n: usize) -> Result<JacobiField> {
    path.require_complete()?;
    let metric = path.metric();
    let (a, b) = (path.start_time(), path.end_time());
    let x0 = path.start();
    let v0 = path.initial_velocity();
    let frame0 = adapted_frame(metric, x0, v0);
    let y0 = to_frame(metric, x0, &frame0, j0);
    let yp0 = to_frame(metric, x0, &frame0, j0dot);
    let run = run_frame_system(metric, x0, v0, a, b, &[y0], &[yp0], n)?;
    let y = run.ys.iter().map(|c| c[0].clone()).collect();
    let yp = run.yps.iter().map(|c| c[0].clone()).collect();
    Ok(field_from(&run, y, yp))
}

/// [`jacobi_ivp_sampled`] on the path's own grid (at least 64 intervals),
/// doubled up to 1024 intervals until the residual meets the default
/// tolerance; fails otherwise.
pub fn jacobi_ivp(path: &GeodesicPath, j0: &[f64], j0dot: &[f64]) -> Result<JacobiField> {
    let mut n = (path.times.len() - 1).max(64);
    loop {
        let field = jacobi_ivp_sampled(path, j0, j0dot, n)?;
        let res = field.residual();
        if res <= Tolerances::default().jac {
            return Ok(field);
        }
        if n >= 1024 {
            return Err(Error::NonConvergence(format!("Jacobi residual {res:.3e}")));
        }
        n *= 2;
    }
}

/// Unique Jacobi field with `J(a) = v`, `J(b) = w` sampled on `n` intervals
/// of `[a, b]`; `conj` is the reciprocal-condition threshold for conjugate
/// points.
pub fn jacobi_bvp_sampled(path: &GeodesicPath, a: f64, b: f64, v: &[f64], w: &[f64], n: usize, conj: f64) -> Result<JacobiField> {
    if !(a < b) {
        return Err(Error::InvalidParameter("boundary times need a < b".into()));
    }
    let metric = path.metric();
    let m = metric.dim();
    let (xa, va) = path.state_at(a)?;
    path.state_at(b)?;
    let mut y0 = Vec::new();
    let mut yp0 = Vec::new();
    for k in 0..2 * m {
        let mut y = vec![0.0; m];
        let mut yp = vec![0.0; m];
        if k < m {
            y[k] = 1.0;
        } else {
            yp[k - m] = 1.0;
        }
        y0.push(y);
        yp0.push(yp);
    }
    let run = run_frame_system(metric, &xa, &va, a, b, &y0, &yp0, n)?;
    let last = run.ys.len() - 1;
    // Φ₂(b): columns m..2m
    let phi2 = DMatrix::from_fn(m, m, |i, j| run.ys[last][m + j][i]);
    let sv = phi2.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond < conj {
        return Err(Error::ConjugatePoints(rcond));
    }
    let frame_a = &run.frames[0];
    let va_f = to_frame(metric, &xa, frame_a, v);
    let (xb, _) = path.state_at(b)?;
    let wb_f = to_frame(metric, &xb, &run.frames[last], w);
    let mut rhs = DVector::from_fn(m, |i, _| wb_f[i]);
    for (k, vk) in va_f.iter().enumerate() {
        for i in 0..m {
            rhs[i] -= vk * run.ys[last][k][i];
        }
    }
    let c = phi2.lu().solve(&rhs).ok_or(Error::ConjugatePoints(0.0))?;
    let combine = |cols: &Vec<Vec<f64>>| -> Vec<f64> {
        (0..m)
            .map(|i| {
                let mut s = 0.0;
                for k in 0..m {
                    s += va_f[k] * cols[k][i] + c[k] * cols[m + k][i];
                }
                s
            })
            .collect()
    };
    let y = run.ys.iter().map(combine).collect();
    let yp = run.yps.iter().map(combine).collect();
    Ok(field_from(&run, y, yp))
}

/// [`jacobi_bvp_sampled`] with 64 intervals and the default conjugate-point
/// threshold.
pub fn jacobi_bvp(path: &GeodesicPath, a: f64, b: f64, v: &[f64], w: &[f64]) -> Result<JacobiField> {
    jacobi_bvp_sampled(path, a, b, v, w, 64, Tolerances::default().conj)
}

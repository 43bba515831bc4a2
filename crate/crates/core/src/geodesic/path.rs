//! Integrated geodesics.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::local::LocalGeometry;
use crate::manifold::MetricField;

use super::ode::{integrate, OdeOptions, OdeStop};

/// `y = (x, v, w₁, …, w_r)`: geodesic plus vectors transported along it.
pub(crate) fn transport_rhs(metric: &MetricField, y: &[f64], dy: &mut [f64]) {
    let m = metric.dim();
    let (x, rest) = y.split_at(m);
    let v = &rest[..m];
    let geo = match LocalGeometry::at(metric, x, false) {
        Ok(g) => g,
        Err(_) => {
            dy.iter_mut().for_each(|d| *d = f64::NAN);
            return;
        }
    };
    dy[..m].copy_from_slice(v);
    let mut tmp = vec![0.0; m];
    geo.gamma_apply(v, v, &mut tmp);
    for c in 0..m {
        dy[m + c] = -tmp[c];
    }
    let nvec = (y.len() - 2 * m) / m;
    for j in 0..nvec {
        let off = 2 * m + j * m;
        geo.gamma_apply(v, &y[off..off + m], &mut tmp);
        for c in 0..m {
            dy[off + c] = -tmp[c];
        }
    }
}

/// Geodesic sampled on a uniform time grid; values between grid points are
/// recomputed by integrating from the previous grid point.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    metric: Arc<MetricField>,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// `|γ'(t_j)|_g`
    pub speeds: Vec<f64>,
    /// the path left the chart domain before the requested time
    pub truncated: bool,
}

pub(crate) fn options() -> OdeOptions {
    OdeOptions::default()
}

/// Integrates the geodesic with `γ(0) = p`, `γ'(0) = v` up to time `duration`,
/// recording `n` uniform intervals. A path that leaves the domain is
/// returned up to the last grid point inside, flagged truncated.
pub fn shoot_geodesic(metric: &Arc<MetricField>, p: &[f64], v: &[f64], duration: f64, n: usize) -> Result<GeodesicPath> {
    let m = metric.dim();
    if n < 8 {
        return Err(Error::InvalidParameter("geodesics need at least 8 grid intervals".into()));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter("geodesic duration must be positive".into()));
    }
    if p.len() != m || v.len() != m {
        return Err(Error::InvalidParameter("point and velocity must match the metric dimension".into()));
    }
    if !metric.domain().contains(p) {
        return Err(Error::OutsideDomain(p.to_vec()));
    }
    let mut y: Vec<f64> = p.iter().chain(v).cloned().collect();
    let mut path = GeodesicPath {
        metric: metric.clone(),
        times: vec![0.0],
        positions: vec![p.to_vec()],
        velocities: vec![v.to_vec()],
        speeds: vec![metric.norm(p, v)],
        truncated: false,
    };
    let dt = duration / n as f64;
    let domain = metric.domain().clone();
    for j in 1..=n {
        let t0 = (j - 1) as f64 * dt;
        let t1 = if j == n { duration } else { j as f64 * dt };
        let (_, stop) = integrate(
            |_, y, dy| transport_rhs(metric, y, dy),
            t0,
            &mut y,
            t1,
            &options(),
            |_, s| domain.contains(&s[..m]),
        );
        if stop != OdeStop::Done {
            path.truncated = true;
            break;
        }
        path.times.push(t1);
        path.positions.push(y[..m].to_vec());
        path.velocities.push(y[m..].to_vec());
        path.speeds.push(metric.norm(&y[..m], &y[m..]));
    }
    Ok(path)
}

impl GeodesicPath {
    pub fn metric(&self) -> &Arc<MetricField> {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty path")
    }

    pub fn start(&self) -> &[f64] {
        &self.positions[0]
    }

    pub fn end(&self) -> &[f64] {
        self.positions.last().expect("nonempty path")
    }

    pub fn initial_velocity(&self) -> &[f64] {
        &self.velocities[0]
    }

    /// Initial speed `|γ'(0)|_g`.
    pub fn speed(&self) -> f64 {
        self.speeds[0]
    }

    pub fn length(&self) -> f64 {
        self.speed() * (self.end_time() - self.start_time())
    }

    /// Largest relative deviation of the speed from its initial value.
    pub fn speed_drift(&self) -> f64 {
        let s0 = self.speeds[0];
        if s0 == 0.0 {
            return 0.0;
        }
        self.speeds.iter().map(|s| (s - s0).abs() / s0).fold(0.0, f64::max)
    }

    /// Fails with `Truncated` when the path did not reach its requested end.
    pub fn require_complete(&self) -> Result<&Self> {
        if self.truncated {
            Err(Error::Truncated(self.end_time()))
        } else {
            Ok(self)
        }
    }

    fn grid_index(&self, t: f64) -> Result<usize> {
        let (t0, t1) = (self.start_time(), self.end_time());
        let slack = 1e-12 * (t1 - t0).abs().max(1.0);
        if t < t0 - slack || t > t1 + slack {
            return Err(Error::TimeOutOfRange(t));
        }
        Ok(match self.times.binary_search_by(|s| s.partial_cmp(&t).expect("finite times")) {
            Ok(j) => j,
            Err(j) => j.saturating_sub(1),
        })
    }

    /// `(γ(t), γ'(t))`.
    pub fn state_at(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let j = self.grid_index(t)?;
        if self.times[j] == t {
            return Ok((self.positions[j].clone(), self.velocities[j].clone()));
        }
        let m = self.dim();
        let mut y: Vec<f64> = self.positions[j].iter().chain(&self.velocities[j]).cloned().collect();
        let metric = &self.metric;
        integrate(|_, y, dy| transport_rhs(metric, y, dy), self.times[j], &mut y, t, &options(), |_, _| true);
        Ok((y[..m].to_vec(), y[m..].to_vec()))
    }

    pub fn position_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.state_at(t)?.0)
    }

    /// Integrates the geodesic together with `vectors` from time `a` to time
    /// `b`, returning the state at `b` and the transported vectors.
    #[allow(clippy::type_complexity)]
    pub fn transport(&self, a: f64, b: f64, vectors: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
        self.grid_index(b)?;
        let (x, v) = self.state_at(a)?;
        let m = self.dim();
        let mut y: Vec<f64> = x.iter().chain(&v).cloned().collect();
        for w in vectors {
            y.extend_from_slice(w);
        }
        let metric = &self.metric;
        integrate(|_, y, dy| transport_rhs(metric, y, dy), a, &mut y, b, &options(), |_, _| true);
        let out = (0..vectors.len()).map(|j| y[2 * m + j * m..2 * m + (j + 1) * m].to_vec()).collect();
        Ok((y[..m].to_vec(), y[m..2 * m].to_vec(), out))
    }
}

/// Parallel transport of `v` from the start to the end of the path.
pub fn parallel_transport(path: &GeodesicPath, v: &[f64]) -> Result<Vec<f64>> {
    let (_, _, w) = path.transport(path.start_time(), path.end_time(), &[v.to_vec()])?;
    Ok(w.into_iter().next().expect("one vector"))
}

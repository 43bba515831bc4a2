//! Convex bodies in a chart and their membership tests.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hull::{hull_iterate, HullOptions, Net};
use crate::algebra::Poly;
use crate::error::{Error, Result};
use crate::geodesic::{inverse_exp, minimizing_geodesic, shoot_geodesic, MinimizeOptions};
use crate::manifold::{catalog_metric, orthonormal_frame, CatalogParams, MetricField};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Differential `df` in chart coordinates.
pub type CovectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    pub fn is_member(self) -> bool {
        self != Membership::Outside
    }
}

#[derive(Clone)]
pub enum Shape {
    /// `{f ≤ 0}`
    Sublevel { f: ScalarFn, df: CovectorFn },
    /// `{q : d(center, q) ≤ radius}`
    GeodesicBall { center: Vec<f64>, radius: f64 },
    /// hull-iterated cloud stored as a net at resolution `h`
    Cloud { net: Net, level: usize },
}

impl std::fmt::Debug for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Sublevel { .. } => write!(f, "Sublevel"),
            Shape::GeodesicBall { center, radius } => write!(f, "GeodesicBall {{ center: {center:?}, radius: {radius} }}"),
            Shape::Cloud { net, level } => write!(f, "Cloud {{ points: {}, h: {}, level: {level} }}", net.len(), net.h()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvexBody {
    pub name: String,
    metric: Arc<MetricField>,
    pub shape: Shape,
    /// half-width of the boundary band
    pub delta: f64,
    /// a point well inside, used to sample the boundary
    pub center: Option<Vec<f64>>,
}

fn ball_options() -> MinimizeOptions {
    MinimizeOptions { max_iter: 30, tol: 1e-12, ..MinimizeOptions::default() }
}

impl ConvexBody {
    pub fn sublevel(name: &str, metric: Arc<MetricField>, f: ScalarFn, df: CovectorFn, center: Option<Vec<f64>>, delta: f64) -> Self {
        ConvexBody { name: name.into(), metric, shape: Shape::Sublevel { f, df }, delta, center }
    }

    /// `{P ≤ 0}` for a polynomial in the chart coordinates.
    pub fn polynomial(name: &str, metric: Arc<MetricField>, p: Poly<f64>, center: Option<Vec<f64>>, delta: f64) -> Self {
        let m = metric.dim();
        let grads: Vec<Poly<f64>> = (0..m).map(|i| p.derivative(i)).collect();
        let f: ScalarFn = Arc::new(move |x| p.eval(x));
        let df: CovectorFn = Arc::new(move |x| grads.iter().map(|g| g.eval(x)).collect());
        ConvexBody::sublevel(name, metric, f, df, center, delta)
    }

    pub fn geodesic_ball(metric: Arc<MetricField>, center: Vec<f64>, radius: f64, delta: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("geodesic ball radius must be positive".into()));
        }
        if !metric.domain().contains(&center) {
            return Err(Error::OutsideDomain(center));
        }
        Ok(ConvexBody {
            name: "geodesic-ball".into(),
            metric,
            shape: Shape::GeodesicBall { center: center.clone(), radius },
            delta,
            center: Some(center),
        })
    }

    /// Hull-iterated closure of a finite cloud after `level` rounds.
    pub fn cloud(metric: Arc<MetricField>, points: &[Vec<f64>], level: usize, opts: &HullOptions) -> Result<Self> {
        let report = hull_iterate(&metric, points, level, opts)?;
        let net = report.final_net();
        Ok(ConvexBody { name: "cloud".into(), metric, shape: Shape::Cloud { net, level }, delta: opts.h, center: None })
    }

    pub fn metric(&self) -> &Arc<MetricField> {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Signed distance surrogate: `f/|df|_g` for sublevels, `d(c, p) − r` for
    /// balls, distance to the net minus `h` for clouds. `+∞` outside the chart.
    pub fn value(&self, p: &[f64]) -> f64 {
        if !self.metric.domain().contains(p) {
            return f64::INFINITY;
        }
        match &self.shape {
            Shape::Sublevel { f, df } => {
                let v = f(p);
                let g = match self.metric.eval(p) {
                    Ok(g) => g,
                    Err(_) => return f64::INFINITY,
                };
                let (_, finv) = orthonormal_frame(&g);
                let a = df(p);
                let n2: f64 = finv.iter().map(|r| r.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum();
                if n2 > 0.0 {
                    v / n2.sqrt()
                } else {
                    v
                }
            }
            Shape::GeodesicBall { center, radius } => match inverse_exp(&self.metric, center, p, &ball_options()) {
                Some(v) => self.metric.norm(center, &v) - radius,
                None => f64::INFINITY,
            },
            Shape::Cloud { net, .. } => net.distance(p) - net.h(),
        }
    }

    /// Inside, within the boundary band, or outside.
    pub fn contains(&self, p: &[f64]) -> Membership {
        let v = self.value(p);
        if v.is_nan() || v > self.delta {
            Membership::Outside
        } else if v < -self.delta {
            Membership::Inside
        } else {
            Membership::Boundary
        }
    }

    pub fn is_member(&self, p: &[f64]) -> bool {
        self.contains(p).is_member()
    }

    /// Outward conormal `df` at `p`, when the shape has one.
    pub fn conormal(&self, p: &[f64]) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Sublevel { df, .. } => Some(df(p)),
            Shape::GeodesicBall { center, .. } => {
                let v = inverse_exp(&self.metric, center, p, &ball_options())?;
                let path = shoot_geodesic(&self.metric, center, &v, 1.0, 8).ok()?;
                let w = path.velocities.last()?;
                let g = self.metric.eval(p).ok()?;
                Some(g.iter().map(|r| r.iter().zip(w).map(|(x, y)| x * y).sum()).collect())
            }
            Shape::Cloud { .. } => None,
        }
    }

    /// Random members for spot checks: points `center + s (b − center)` on
    /// chart rays toward sampled boundary points, or inner geodesic-ball points.
    pub fn sample_members(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match &self.shape {
            Shape::Cloud { net, .. } => Ok((0..count).map(|_| net.points()[rng.gen_range(0..net.len())].clone()).collect()),
            _ => {
                let center = self.center.clone().ok_or_else(|| Error::InvalidParameter("body has no center".into()))?;
                let boundary = super::audit::boundary_points(self, count, seed)?;
                Ok(boundary
                    .iter()
                    .map(|b| {
                        let s = rng.gen_range(0.0..0.95);
                        center.iter().zip(b).map(|(c, x)| c + s * (x - c)).collect()
                    })
                    .collect())
            }
        }
    }

    /// Geodesic-convexity spot check: sampled points of minimizing geodesics
    /// between random member pairs must be members.
    pub fn spot_check_convexity(&self, pairs: usize, seed: u64) -> Result<()> {
        let pts = self.sample_members(2 * pairs, seed)?;
        let opts = MinimizeOptions { steps: 16, ..MinimizeOptions::default() };
        for pair in pts.chunks(2) {
            if pair.len() < 2 || !self.is_member(&pair[0]) || !self.is_member(&pair[1]) {
                continue;
            }
            let mins = minimizing_geodesic(&self.metric, &pair[0], &pair[1], &opts)?;
            for path in &mins.paths {
                if let Some(bad) = path.positions.iter().find(|x| !self.is_member(x)) {
                    return Err(Error::InvalidParameter(format!(
                        "{} is not geodesically convex: {bad:?} lies outside (δ = {})",
                        self.name, self.delta
                    )));
                }
            }
        }
        Ok(())
    }
}

pub const BODY_NAMES: [&str; 5] = ["euclidean-ball", "slab", "hemisphere-line", "hyperbolic-ball", "geodesic-ball"];

/// Parameters of the catalog bodies.
#[derive(Clone, Debug)]
pub struct BodyParams {
    pub dim: usize,
    pub radius: f64,
    pub delta: f64,
    /// base metric of the geodesic ball
    pub metric: String,
    pub metric_params: CatalogParams,
    pub seed: u64,
}

impl BodyParams {
    pub fn dim(dim: usize) -> Self {
        BodyParams {
            dim,
            radius: 0.3,
            delta: 1e-6,
            metric: "perturbed".into(),
            metric_params: CatalogParams::dim(dim),
            seed: 0,
        }
    }
}

/// Catalog bodies; each is spot-checked for geodesic convexity.
pub fn catalog_body(name: &str, params: &BodyParams) -> Result<ConvexBody> {
    let m = params.dim;
    let body = match name {
        "euclidean-ball" => {
            let metric = Arc::new(catalog_metric("euclidean", &CatalogParams::dim(m))?);
            let r = params.radius;
            let mut p = Poly::constant(-r * r);
            for i in 0..m {
                p.add_assign(&Poly::var(i).mul(&Poly::var(i)));
            }
            ConvexBody::polynomial(name, metric, p, Some(vec![0.0; m]), params.delta)
        }
        "slab" => {
            if m < 2 {
                return Err(Error::InvalidParameter("slab needs dimension ≥ 2".into()));
            }
            let metric = Arc::new(catalog_metric("euclidean", &CatalogParams::dim(m))?);
            // (z − ½)² − ¼ vanishes on z = 0 and z = 1
            let z = Poly::var(m - 1).sub(&Poly::constant(0.5));
            let p = z.mul(&z).sub(&Poly::constant(0.25));
            let mut c = vec![0.0; m];
            c[m - 1] = 0.5;
            ConvexBody::polynomial(name, metric, p, Some(c), params.delta)
        }
        "hemisphere-line" => {
            let metric = Arc::new(catalog_metric("product-sphere-line", &CatalogParams::dim(3))?);
            // in the stereographic chart the great circle through the origin
            // along x₁ is the line x₂ = 0
            let p = Poly::var(1).neg();
            ConvexBody::polynomial(name, metric, p, Some(vec![0.0, 1.0, 0.0]), params.delta)
        }
        "hyperbolic-ball" => {
            let metric = Arc::new(catalog_metric("hyperbolic-ball", &CatalogParams::dim(m))?);
            // origin-centered geodesic balls are chart balls in the Poincaré model
            let r = params.radius.min(0.9 * metric.domain().hi[0]);
            let mut p = Poly::constant(-r * r);
            for i in 0..m {
                p.add_assign(&Poly::var(i).mul(&Poly::var(i)));
            }
            ConvexBody::polynomial(name, metric, p, Some(vec![0.0; m]), params.delta)
        }
        "geodesic-ball" => {
            let mp = CatalogParams { dim: m, seed: params.seed, ..params.metric_params.clone() };
            let metric = Arc::new(catalog_metric(&params.metric, &mp)?);
            let c = metric.domain().center();
            ConvexBody::geodesic_ball(metric, c, params.radius, params.delta)?
        }
        _ => return Err(Error::InvalidParameter(format!("unknown body `{name}`"))),
    };
    body.spot_check_convexity(6, params.seed)?;
    Ok(body)
}

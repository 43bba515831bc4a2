//! Named model metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jets::MetricJet;

use super::metric::{BoxDomain, Matrix, MetricField, Model, Perturbation};

pub const CATALOG_NAMES: [&str; 7] = [
    "euclidean",
    "round-sphere",
    "hyperbolic-ball",
    "product-sphere-line",
    "revolution-product",
    "jet-metric",
    "perturbed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Stereographic,
    Normal,
}

#[derive(Clone, Debug)]
pub struct CatalogParams {
    pub dim: usize,
    /// sectional curvature; defaults to 1 for spheres and −1 for the ball
    pub curvature: Option<f64>,
    pub chart: Chart,
    /// half-width of the cubical chart domain; a model default when `None`
    pub half_width: Option<f64>,
    /// profile coefficient of `revolution-product`
    pub profile: f64,
    pub jet: Option<MetricJet>,
    /// base metric of `perturbed`
    pub base: String,
    pub amplitude: f64,
    pub seed: u64,
    /// bump radius of `perturbed`; a default relative to the domain when `None`
    pub radius: Option<f64>,
    pub center: Option<Vec<f64>>,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            dim: 3,
            curvature: None,
            chart: Chart::Stereographic,
            half_width: None,
            profile: 0.1,
            jet: None,
            base: "round-sphere".into(),
            amplitude: 0.05,
            seed: 0,
            radius: None,
            center: None,
        }
    }
}

impl CatalogParams {
    pub fn dim(dim: usize) -> Self {
        CatalogParams { dim, ..Default::default() }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn random_traceless(m: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    let mut s = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in a..m {
            let v: f64 = rng.gen_range(-1.0..1.0);
            s[a][b] = v;
            s[b][a] = v;
        }
    }
    let tr = (0..m).map(|a| s[a][a]).sum::<f64>() / m as f64;
    for (a, row) in s.iter_mut().enumerate() {
        row[a] -= tr;
    }
    let norm = s.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    s.iter().map(|r| r.iter().map(|v| v / norm).collect()).collect()
}

fn base_metric(name: &str, p: &CatalogParams) -> Result<MetricField> {
    let m = p.dim;
    let cube = |default: f64| -> Result<BoxDomain> {
        Ok(BoxDomain::cube(m, positive("half_width", p.half_width.unwrap_or(default))?))
    };
    match name {
        "euclidean" => MetricField::new(name, m, cube(10.0)?, Model::Euclidean),
        "round-sphere" => {
            let k = positive("curvature", p.curvature.unwrap_or(1.0))?;
            match p.chart {
                Chart::Stereographic => MetricField::new(name, m, cube(3.0 / k.sqrt())?, Model::Conformal { k }),
                Chart::Normal => {
                    let half = 0.95 * std::f64::consts::PI / (k.sqrt() * (m as f64).sqrt());
                    let d = cube(half)?;
                    if d.hi[0] * (m as f64).sqrt() * k.sqrt() >= std::f64::consts::PI {
                        return Err(Error::InvalidParameter("normal chart must stay inside the injectivity radius".into()));
                    }
                    MetricField::new(name, m, d, Model::NormalSpaceForm { k })
                }
            }
        }
        "hyperbolic-ball" => {
            let k = p.curvature.unwrap_or(-1.0);
            if !(k < 0.0) {
                return Err(Error::InvalidParameter("hyperbolic-ball needs negative curvature".into()));
            }
            let half = 0.98 / ((m as f64) * -k).sqrt();
            let d = cube(half)?;
            if d.hi[0] * d.hi[0] * m as f64 * -k >= 1.0 {
                return Err(Error::InvalidParameter("chart box must lie inside the Poincaré ball".into()));
            }
            MetricField::new(name, m, d, Model::Conformal { k })
        }
        "product-sphere-line" => {
            if m != 3 {
                return Err(Error::InvalidParameter("product-sphere-line is 3-dimensional".into()));
            }
            let k = positive("curvature", p.curvature.unwrap_or(1.0))?;
            MetricField::new(name, m, cube(3.0 / k.sqrt())?, Model::SphereLine { k })
        }
        "revolution-product" => {
            let a = positive("profile", p.profile)?;
            let half = 0.95 / (a.sqrt() * 2f64.sqrt());
            let d = cube(half)?;
            if 2.0 * d.hi[0] * d.hi[0] * a >= 1.0 {
                return Err(Error::InvalidParameter("chart box must lie inside r² < 1/profile".into()));
            }
            MetricField::new(name, m, d, Model::Revolution { a })
        }
        "jet-metric" => {
            let jet = p
                .jet
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("jet-metric needs jet coefficients".into()))?;
            if jet.dim() != m {
                return Err(Error::InvalidParameter("jet dimension does not match dim".into()));
            }
            MetricField::from_jet(jet, positive("half_width", p.half_width.unwrap_or(0.5))?)
        }
        "perturbed" => Err(Error::InvalidParameter("perturbed cannot be its own base".into())),
        other => Err(Error::UnknownMetric(other.to_string())),
    }
}

/// Builds a catalog metric and checks positive definiteness on samples.
pub fn catalog_metric(name: &str, params: &CatalogParams) -> Result<MetricField> {
    if !CATALOG_NAMES.contains(&name) {
        return Err(Error::UnknownMetric(name.to_string()));
    }
    let metric = if name == "perturbed" {
        let base = base_metric(&params.base, params)?;
        let m = params.dim;
        let domain = base.domain().clone();
        let center = params.center.clone().unwrap_or_else(|| domain.center());
        if center.len() != m {
            return Err(Error::InvalidParameter("perturbation center has wrong dimension".into()));
        }
        let radius = positive("radius", params.radius.unwrap_or((0.25 * domain.edge()).min(1.0)))?;
        if !params.amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut fields = vec![random_traceless(m, &mut rng)];
        for _ in 0..m {
            let s = random_traceless(m, &mut rng);
            fields.push(s.iter().map(|r| r.iter().map(|v| v / radius).collect()).collect());
        }
        let pert = Perturbation { base: base.model().clone(), amplitude: params.amplitude, center: center.clone(), radius, fields };
        let metric = MetricField::new(name, m, domain, Model::Perturbed(Box::new(pert)))?;
        // dense samples where the bump lives
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5eed);
        let mut pts = vec![center.clone()];
        for _ in 0..256 {
            let q: Vec<f64> = center.iter().map(|c| c + radius * rng.gen_range(-1.0..1.0)).collect();
            if metric.domain().contains(&q) {
                pts.push(q);
            }
        }
        for q in pts {
            let e = super::metric::min_eigenvalue(&metric.eval_unchecked(&q));
            if !(e > 0.0) {
                return Err(Error::NotPositiveDefinite { point: q, min_eig: e });
            }
        }
        metric
    } else {
        base_metric(name, params)?
    };
    metric.check_positive_on_grid(if metric.dim() <= 3 { 9 } else { 5 })?;
    Ok(metric)
}

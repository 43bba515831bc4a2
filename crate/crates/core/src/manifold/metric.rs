//! Chart metrics: a symmetric positive-definite matrix field on a box.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::coeff::rational_to_f64;
use crate::algebra::{Layout, Poly, Real, Taylor};
use crate::error::{Error, Result};
use crate::jets::MetricJet;

pub type Matrix<T> = Vec<Vec<T>>;
pub type MetricFn = Arc<dyn Fn(&[f64]) -> Matrix<f64> + Send + Sync>;

/// Open axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParameter("box bounds must satisfy lo < hi componentwise".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn cube(m: usize, half: f64) -> Self {
        BoxDomain { lo: vec![-half; m], hi: vec![half; m] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    /// Strictly inside, at least `margin` away from every face.
    pub fn contains_with_margin(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim()
            && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x > a + margin && *x < b - margin)
    }

    /// Shortest edge.
    pub fn edge(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    ExactPolynomial,
    AnalyticCallback,
    FiniteDifference,
}

#[derive(Clone)]
pub enum Model {
    Euclidean,
    /// `4 / (1 + K|p|²)² · I`: stereographic sphere for `K > 0`, Poincaré ball for `K < 0`
    Conformal { k: f64 },
    /// constant curvature `K > 0` in normal coordinates
    NormalSpaceForm { k: f64 },
    /// stereographic 2-sphere on the first two coordinates, flat on the rest
    SphereLine { k: f64 },
    /// surface of revolution with profile `r − a r³` on the first two
    /// coordinates (normal chart), flat on the rest
    Revolution { a: f64 },
    Jet { jet: MetricJet, poly: Matrix<Poly<f64>> },
    Perturbed(Box<Perturbation>),
    Callback(MetricFn),
}

#[derive(Clone, Debug)]
pub struct Perturbation {
    pub base: Model,
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    /// `S₀, S₁, …, S_m`, each symmetric
    pub fields: Vec<Matrix<f64>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Euclidean => write!(f, "Euclidean"),
            Model::Conformal { k } => write!(f, "Conformal {{ k: {k} }}"),
            Model::NormalSpaceForm { k } => write!(f, "NormalSpaceForm {{ k: {k} }}"),
            Model::SphereLine { k } => write!(f, "SphereLine {{ k: {k} }}"),
            Model::Revolution { a } => write!(f, "Revolution {{ a: {a} }}"),
            Model::Jet { jet, .. } => write!(f, "Jet {{ dim: {}, order: {} }}", jet.dim(), jet.order()),
            Model::Perturbed(p) => write!(f, "Perturbed({:?}, amplitude {})", p.base, p.amplitude),
            Model::Callback(_) => write!(f, "Callback"),
        }
    }
}

fn identity<T: Real>(m: usize, like: &T) -> Matrix<T> {
    (0..m)
        .map(|a| (0..m).map(|b| like.cst(if a == b { 1.0 } else { 0.0 })).collect())
        .collect()
}

fn sq_norm<T: Real>(p: &[T]) -> T {
    p.iter().fold(p[0].cst(0.0), |acc, x| acc + x.clone() * x.clone())
}

fn horner<T: Real>(coeffs: &[f64], s: &T) -> T {
    let mut acc = s.cst(0.0);
    for c in coeffs.iter().rev() {
        acc = (acc * s.clone()).add_f(*c);
    }
    acc
}

/// Series coefficients of `h(s) = sin²(√(Ks))/(Ks)` and `q(s) = (1 − h(s))/s`.
fn space_form_series(k: f64) -> (Vec<f64>, Vec<f64>) {
    let mut h = vec![1.0];
    for n in 1..40 {
        let prev = h[n - 1];
        h.push(prev * (-4.0 * k) / ((2 * n + 1) as f64 * (2 * n + 2) as f64));
    }
    let q = h[1..].iter().map(|c| -c).collect();
    (h, q)
}

/// `h(s) I + q(s) p pᵀ` on the first `r` coordinates, identity elsewhere.
fn radial_form<T: Real>(m: usize, r: usize, p: &[T], h: T, q: T) -> Matrix<T> {
    let mut g = identity(m, &p[0]);
    for a in 0..r {
        for b in a..r {
            let mut v = q.clone() * p[a].clone() * p[b].clone();
            if a == b {
                v = v + h.clone();
            }
            g[b][a] = v.clone();
            g[a][b] = v;
        }
    }
    g
}

fn eval_poly<T: Real>(poly: &Poly<f64>, p: &[T], powers: &[Vec<T>]) -> T {
    let mut acc = p[0].cst(0.0);
    for (mono, c) in poly.terms() {
        let mut t = p[0].cst(*c);
        for (i, &e) in mono.iter().enumerate() {
            if e > 0 {
                t = t * powers[i][e as usize].clone();
            }
        }
        acc = acc + t;
    }
    acc
}

impl Model {
    /// Metric at `p`; generic so that the same code evaluates values and
    /// truncated Taylor expansions. Panics for callback models on non-`f64`.
    pub fn eval<T: Real>(&self, m: usize, p: &[T]) -> Matrix<T> {
        match self {
            Model::Euclidean => identity(m, &p[0]),
            Model::Conformal { k } => {
                let s = sq_norm(p).scale(*k).add_f(1.0);
                let f = s.cst(4.0) / (s.clone() * s);
                let mut g = identity(m, &p[0]);
                for (a, row) in g.iter_mut().enumerate() {
                    row[a] = f.clone();
                }
                g
            }
            Model::NormalSpaceForm { k } => {
                let (hc, qc) = space_form_series(*k);
                let s = sq_norm(p);
                radial_form(m, m, p, horner(&hc, &s), horner(&qc, &s))
            }
            Model::SphereLine { k } => {
                let s = sq_norm(&p[..2]).scale(*k).add_f(1.0);
                let f = s.cst(4.0) / (s.clone() * s);
                let mut g = identity(m, &p[0]);
                g[0][0] = f.clone();
                g[1][1] = f;
                g
            }
            Model::Revolution { a } => {
                let s = sq_norm(&p[..2]);
                let w = s.scale(-a).add_f(1.0);
                let h = w.clone() * w;
                let q = s.scale(-a * a).add_f(2.0 * a);
                radial_form(m, 2, p, h, q)
            }
            Model::Jet { poly, .. } => {
                let deg = poly
                    .iter()
                    .flatten()
                    .filter_map(|q| q.degree())
                    .max()
                    .unwrap_or(0);
                let powers: Vec<Vec<T>> = p
                    .iter()
                    .map(|x| {
                        let mut v = vec![x.cst(1.0)];
                        for e in 1..=deg {
                            let next = v[e - 1].clone() * x.clone();
                            v.push(next);
                        }
                        v
                    })
                    .collect();
                poly.iter().map(|row| row.iter().map(|q| eval_poly(q, p, &powers)).collect()).collect()
            }
            Model::Perturbed(pert) => {
                let mut g = pert.base.eval(m, p);
                let d: Vec<T> = p.iter().zip(&pert.center).map(|(x, c)| x.add_f(-c)).collect();
                let s = sq_norm(&d).scale(1.0 / (pert.radius * pert.radius));
                if s.value() >= 1.0 {
                    return g;
                }
                let w = s.scale(-1.0).add_f(1.0);
                let w2 = w.clone() * w;
                let bump = (w2.clone() * w2).scale(pert.amplitude);
                for a in 0..m {
                    for b in 0..m {
                        let mut field = p[0].cst(pert.fields[0][a][b]);
                        for (j, dj) in d.iter().enumerate() {
                            field = field + dj.scale(pert.fields[j + 1][a][b]);
                        }
                        g[a][b] = g[a][b].clone() + bump.clone() * field;
                    }
                }
                g
            }
            Model::Callback(f) => {
                let pf: Vec<f64> = p
                    .iter()
                    .map(|x| x.as_plain().expect("callback metrics only evaluate at plain points"))
                    .collect();
                f(&pf).into_iter().map(|row| row.into_iter().map(|v| p[0].cst(v)).collect()).collect()
            }
        }
    }

    pub fn is_callback(&self) -> bool {
        match self {
            Model::Callback(_) => true,
            Model::Perturbed(p) => p.base.is_callback(),
            _ => false,
        }
    }
}

/// A Riemannian metric on one chart.
#[derive(Clone, Debug)]
pub struct MetricField {
    name: String,
    dim: usize,
    domain: BoxDomain,
    model: Model,
    mode: DerivativeMode,
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(g: &Matrix<f64>) -> f64 {
    let m = g.len();
    let a = DMatrix::from_fn(m, m, |i, j| 0.5 * (g[i][j] + g[j][i]));
    crate::algebra::symmetric_eigen(&a).0.iter().cloned().fold(f64::INFINITY, f64::min)
}

impl MetricField {
    pub fn new(name: impl Into<String>, dim: usize, domain: BoxDomain, model: Model) -> Result<Self> {
        if dim < 2 || dim > crate::algebra::MAX_VARS {
            return Err(Error::InvalidParameter(format!("dimension {dim} not in 2..={}", crate::algebra::MAX_VARS)));
        }
        if domain.dim() != dim {
            return Err(Error::InvalidParameter("domain dimension does not match metric".into()));
        }
        let mode = match &model {
            Model::Jet { .. } => DerivativeMode::ExactPolynomial,
            m if m.is_callback() => DerivativeMode::FiniteDifference,
            _ => DerivativeMode::AnalyticCallback,
        };
        Ok(MetricField { name: name.into(), dim, domain, model, mode })
    }

    /// `I + Σ G^i` of an exact jet, on a cube of half-width `half`.
    pub fn from_jet(jet: &MetricJet, half: f64) -> Result<Self> {
        let poly = jet
            .metric_polynomial()
            .iter()
            .map(|row| row.iter().map(|p| p.map_coeffs(rational_to_f64)).collect())
            .collect();
        let m = jet.dim();
        MetricField::new("jet-metric", m, BoxDomain::cube(m, half), Model::Jet { jet: jet.clone(), poly })
    }

    /// User-supplied metric function; derivatives by finite differences.
    pub fn from_fn(name: impl Into<String>, domain: BoxDomain, f: MetricFn) -> Result<Self> {
        let m = domain.dim();
        MetricField::new(name, m, domain, Model::Callback(f))
    }

    /// Same metric with derivatives taken by finite differences.
    pub fn with_finite_differences(mut self) -> Self {
        self.mode = DerivativeMode::FiniteDifference;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn jet(&self) -> Option<&MetricJet> {
        match &self.model {
            Model::Jet { jet, .. } => Some(jet),
            _ => None,
        }
    }

    /// `g(p)`.
    pub fn eval(&self, p: &[f64]) -> Result<Matrix<f64>> {
        if !self.domain.contains(p) {
            return Err(Error::OutsideDomain(p.to_vec()));
        }
        Ok(self.model.eval(self.dim, p))
    }

    /// `g(p)` without the domain check (used inside integrators that check
    /// separately).
    pub fn eval_unchecked(&self, p: &[f64]) -> Matrix<f64> {
        self.model.eval(self.dim, p)
    }

    /// `⟨u, v⟩_{g(p)}`.
    pub fn inner(&self, p: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let g = self.eval_unchecked(p);
        let mut s = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                s += u[a] * g[a][b] * v[b];
            }
        }
        s
    }

    pub fn norm(&self, p: &[f64], v: &[f64]) -> f64 {
        self.inner(p, v, v).max(0.0).sqrt()
    }

    /// Taylor expansion of `g` at `p` through total degree `degree`, in the
    /// displacement variables `δ = q − p`.
    pub fn expansion(&self, p: &[f64], degree: usize) -> Result<Matrix<Poly<f64>>> {
        if !self.domain.contains(p) {
            return Err(Error::OutsideDomain(p.to_vec()));
        }
        match self.mode {
            DerivativeMode::FiniteDifference => super::fd::expansion(self, p, degree),
            _ => {
                let layout = Layout::get(self.dim, degree);
                let vars: Vec<Taylor> = (0..self.dim).map(|i| Taylor::variable(&layout, i, p[i])).collect();
                let g = self.model.eval(self.dim, &vars);
                Ok(g.iter().map(|row| row.iter().map(|t| t.to_poly()).collect()).collect())
            }
        }
    }

    /// Checks positive definiteness on a `n`-per-axis grid of interior points.
    pub fn check_positive_on_grid(&self, n: usize) -> Result<()> {
        let m = self.dim;
        let total = n.pow(m as u32);
        for idx in 0..total {
            let mut rem = idx;
            let p: Vec<f64> = (0..m)
                .map(|a| {
                    let j = rem % n;
                    rem /= n;
                    let t = (j as f64 + 0.5) / n as f64;
                    self.domain.lo[a] + t * (self.domain.hi[a] - self.domain.lo[a])
                })
                .collect();
            let g = self.eval_unchecked(&p);
            let e = min_eigenvalue(&g);
            if !(e > 0.0) {
                return Err(Error::NotPositiveDefinite { point: p, min_eig: e });
            }
        }
        Ok(())
    }
}

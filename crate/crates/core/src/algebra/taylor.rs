//! Truncated multivariate Taylor arithmetic (forward-mode jets) for evaluating
//! closed-form metrics together with all their partial derivatives.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use super::poly::{mono_degree, monomials_of_degree, Mono, Poly, MAX_VARS};

/// Scalar type accepted by metric models: plain `f64` or a Taylor jet.
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape as `self`.
    fn cst(&self, c: f64) -> Self;
    /// The value (constant Taylor coefficient).
    fn value(&self) -> f64;

    fn scale(&self, c: f64) -> Self {
        self.clone() * self.cst(c)
    }
    fn add_f(&self, c: f64) -> Self {
        self.clone() + self.cst(c)
    }
    /// `Some` only for plain numbers (no derivative part).
    fn as_plain(&self) -> Option<f64> {
        None
    }
}

impl Real for f64 {
    fn as_plain(&self) -> Option<f64> {
        Some(*self)
    }
    fn cst(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
}

#[derive(Debug)]
pub struct Layout {
    pub nvars: usize,
    pub degree: usize,
    pub monos: Vec<Mono>,
    index: HashMap<Mono, usize>,
    /// (i, j, k) with monos[i] * monos[j] = monos[k]
    products: Vec<(u16, u16, u16)>,
}

impl Layout {
    pub fn get(nvars: usize, degree: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry((nvars, degree))
            .or_insert_with(|| Arc::new(Layout::build(nvars, degree)))
            .clone()
    }

    fn build(nvars: usize, degree: usize) -> Layout {
        assert!(nvars <= MAX_VARS);
        let monos: Vec<Mono> = (0..=degree).flat_map(|d| monomials_of_degree(nvars, d)).collect();
        let index: HashMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut products = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if mono_degree(a) + mono_degree(b) <= degree {
                    let mut c = [0u8; MAX_VARS];
                    for v in 0..MAX_VARS {
                        c[v] = a[v] + b[v];
                    }
                    products.push((i as u16, j as u16, index[&c] as u16));
                }
            }
        }
        Layout { nvars, degree, monos, index, products }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, m: &Mono) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// A function germ truncated at `layout.degree`: `Σ c_α δ^α`.
#[derive(Clone, Debug)]
pub struct Taylor {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl Taylor {
    pub fn constant(layout: &Arc<Layout>, c: f64) -> Self {
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = c;
        Taylor { layout: layout.clone(), coeffs }
    }

    /// The coordinate function `x_i` expanded at `x_i = at`.
    pub fn variable(layout: &Arc<Layout>, i: usize, at: f64) -> Self {
        let mut t = Self::constant(layout, at);
        if layout.degree > 0 {
            let mut m = [0u8; MAX_VARS];
            m[i] = 1;
            let k = layout.index_of(&m).expect("variable monomial");
            t.coeffs[k] = 1.0;
        }
        t
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &Mono) -> f64 {
        self.layout.index_of(m).map(|k| self.coeffs[k]).unwrap_or(0.0)
    }

    pub fn to_poly(&self) -> Poly<f64> {
        let mut p = Poly::zero();
        for (m, c) in self.layout.monos.iter().zip(&self.coeffs) {
            p.add_term(*m, *c);
        }
        p
    }

    fn mul_ref(&self, o: &Taylor) -> Taylor {
        let mut out = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            let a = self.coeffs[i as usize];
            if a != 0.0 {
                out[k as usize] += a * o.coeffs[j as usize];
            }
        }
        Taylor { layout: self.layout.clone(), coeffs: out }
    }

    /// `1/self` via the geometric series in the nilpotent part.
    pub fn recip(&self) -> Taylor {
        let c0 = self.coeffs[0];
        let inv0 = 1.0 / c0;
        let mut nil = self.clone();
        nil.coeffs[0] = 0.0;
        let q = nil.scale(-inv0); // -(self - c0)/c0
        let mut acc = Taylor::constant(&self.layout, 1.0);
        let mut pow = acc.clone();
        for _ in 0..self.layout.degree {
            pow = pow.mul_ref(&q);
            acc = acc + pow.clone();
        }
        acc.scale(inv0)
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(mut self, o: Taylor) -> Taylor {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(mut self, o: Taylor) -> Taylor {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b;
        }
        self
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, o: Taylor) -> Taylor {
        self.mul_ref(&o)
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, o: Taylor) -> Taylor {
        self.mul_ref(&o.recip())
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for a in &mut self.coeffs {
            *a = -*a;
        }
        self
    }
}

impl Real for Taylor {
    fn cst(&self, c: f64) -> Self {
        Taylor::constant(&self.layout, c)
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn scale(&self, c: f64) -> Self {
        Taylor {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
    fn add_f(&self, c: f64) -> Self {
        let mut t = self.clone();
        t.coeffs[0] += c;
        t
    }
}

//! Sparse multivariate polynomials over a [`Coeff`] field.
//!
//! Monomials are fixed-width exponent arrays, so a constant polynomial does not
//! need to know how many variables it lives in.

use std::collections::BTreeMap;

use super::coeff::Coeff;

pub const MAX_VARS: usize = 4;

pub type Mono = [u8; MAX_VARS];

pub fn mono_degree(m: &Mono) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = [0u8; MAX_VARS];
    for i in 0..MAX_VARS {
        out[i] = a[i] + b[i];
    }
    out
}

/// All monomials in `nvars` variables of total degree exactly `deg`, in a
/// fixed (lexicographically descending) order.
pub fn monomials_of_degree(nvars: usize, deg: usize) -> Vec<Mono> {
    fn rec(var: usize, nvars: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>) {
        if var + 1 == nvars {
            cur[var] = left as u8;
            out.push(*cur);
            cur[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u8;
            rec(var + 1, nvars, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push([0; MAX_VARS]);
        }
        return out;
    }
    rec(0, nvars, deg, &mut [0; MAX_VARS], &mut out);
    out
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term([0; MAX_VARS], c);
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; MAX_VARS];
        m[i] = 1;
        Self::monomial(m, C::one())
    }

    pub fn monomial(m: Mono, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Linear form `Σ coeffs[i]·x_i`.
    pub fn linear(coeffs: &[C]) -> Self {
        let mut p = Self::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let mut m = [0; MAX_VARS];
            m[i] = 1;
            p.add_term(m, c.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(mono_degree).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(mono_degree).min()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(o);
        out
    }

    pub fn sub_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(*m, c.neg());
        }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c.mul(s));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_trunc(o, usize::MAX)
    }

    /// Product with all terms of total degree above `max_deg` dropped.
    pub fn mul_trunc(&self, o: &Self, max_deg: usize) -> Self {
        let mut out = Self::zero();
        self.mul_acc(o, max_deg, &mut out);
        out
    }

    /// `acc += self * o`, truncated at `max_deg`.
    pub fn mul_acc(&self, o: &Self, max_deg: usize, acc: &mut Self) {
        let a: Vec<(Mono, usize, &C)> = self.terms.iter().map(|(m, c)| (*m, mono_degree(m), c)).collect();
        let b: Vec<(Mono, usize, &C)> = o.terms.iter().map(|(m, c)| (*m, mono_degree(m), c)).collect();
        for (ma, da, ca) in &a {
            for (mb, db, cb) in &b {
                if da + db <= max_deg {
                    acc.add_term(mono_mul(ma, mb), ca.mul(cb));
                }
            }
        }
    }

    pub fn truncate(&self, max_deg: usize) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| mono_degree(m) <= max_deg)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, deg: usize) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| mono_degree(m) == deg)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&[0; MAX_VARS])
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut n = *m;
                n[i] -= 1;
                out.add_term(n, c.mul(&C::from_int(m[i] as i64)));
            }
        }
        out
    }

    /// Multiplies each homogeneous degree-`d` part by `d` (the Euler operator).
    pub fn euler(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let d = mono_degree(m) as i64;
            out.add_term(*m, c.mul(&C::from_int(d)));
        }
        out
    }

    pub fn eval(&self, x: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&x[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitutes `vals[i]` for variable `i`, truncating at `max_deg` in the
    /// variables of the substituted polynomials.
    pub fn compose(&self, vals: &[Poly<C>], max_deg: usize) -> Poly<C> {
        let mut cache: BTreeMap<Mono, Poly<C>> = BTreeMap::new();
        cache.insert([0; MAX_VARS], Poly::one());
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let p = power_cached(&mut cache, m, vals, max_deg);
            out.add_assign(&p.scale(c));
        }
        out.truncate(max_deg)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Largest absolute coefficient, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

fn power_cached<C: Coeff>(
    cache: &mut BTreeMap<Mono, Poly<C>>,
    m: &Mono,
    vals: &[Poly<C>],
    max_deg: usize,
) -> Poly<C> {
    if let Some(p) = cache.get(m) {
        return p.clone();
    }
    // peel one factor off the last nonzero exponent
    let i = (0..MAX_VARS).rev().find(|&i| m[i] > 0).expect("nonconstant monomial");
    let mut rest = *m;
    rest[i] -= 1;
    let base = power_cached(cache, &rest, vals, max_deg);
    let p = base.mul_trunc(&vals[i], max_deg);
    cache.insert(*m, p.clone());
    p
}

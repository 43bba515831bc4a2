use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Field elements usable as polynomial coefficients.
///
/// Implemented for exact rationals, `f64`, and first-order dual numbers over
/// either (the latter give exact directional derivatives of polynomial maps).
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Nearest `f64`, for diagnostics and cross-mode comparisons.
    fn to_f64(&self) -> f64;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero rational");
        self.recip()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Converts a rational to the nearest-ish `f64` without overflowing on large
/// numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let (n, d) = if shift > 0 {
        (r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    let v = n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0);
    if r.is_negative() && v > 0.0 {
        -v
    } else {
        v
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, PartialEq, Debug)]
pub struct Dual<C> {
    pub re: C,
    pub eps: C,
}

impl<C: Coeff> Dual<C> {
    pub fn new(re: C, eps: C) -> Self {
        Dual { re, eps }
    }
}

impl<C: Coeff> Coeff for Dual<C> {
    fn zero() -> Self {
        Dual::new(C::zero(), C::zero())
    }
    fn one() -> Self {
        Dual::new(C::one(), C::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Dual::new(self.re.add(&o.re), self.eps.add(&o.eps))
    }
    fn sub(&self, o: &Self) -> Self {
        Dual::new(self.re.sub(&o.re), self.eps.sub(&o.eps))
    }
    fn mul(&self, o: &Self) -> Self {
        Dual::new(
            self.re.mul(&o.re),
            self.re.mul(&o.eps).add(&self.eps.mul(&o.re)),
        )
    }
    fn neg(&self) -> Self {
        Dual::new(self.re.neg(), self.eps.neg())
    }
    fn inv(&self) -> Self {
        let r = self.re.inv();
        Dual::new(r.clone(), self.eps.mul(&r).mul(&r).neg())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Dual::new(C::from_ratio(num, den), C::zero())
    }
    fn to_f64(&self) -> f64 {
        self.re.to_f64()
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_inverse_differentiates() {
        // d/ds (1/(2+s)) at 0 = -1/4
        let x = Dual::new(rat(2, 1), rat(1, 1));
        let y = x.inv();
        assert_eq!(y.re, rat(1, 2));
        assert_eq!(y.eps, rat(-1, 4));
    }

    #[test]
    fn huge_rational_converts() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}

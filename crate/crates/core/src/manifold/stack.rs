//! Jacobi operators `R²_x, …, R^k_x` at a point.

use crate::algebra::coeff::rational_to_f64;
use crate::algebra::Poly;
use crate::error::{Error, Result};
use crate::jets::series::transported_jacobi_series;
use crate::jets::{rho, Q};

use super::curvature::{mat_mul, mat_vec, orthonormal_frame};
use super::metric::{DerivativeMode, Matrix, MetricField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StackMode {
    /// exact rational computation (jet metrics at the origin only)
    Exact,
    /// floating-point Taylor series along the geodesic
    Numerical,
}

/// Jacobi operators at `(p, x)`. Operators act on the `g(p)`-orthonormal
/// frame `F = g(p)^{1/2}`; `x_hat = F x` is the direction in that frame.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiOperatorStack {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub x_hat: Vec<f64>,
    pub order: usize,
    /// `operators[i - 2] = R^i_x`
    pub operators: Vec<Matrix<f64>>,
    pub mode: StackMode,
}

impl JacobiOperatorStack {
    pub fn operator(&self, i: usize) -> &Matrix<f64> {
        &self.operators[i - 2]
    }
}

/// The operators at a point as polynomials in the direction (coordinate
/// components), already conjugated into the orthonormal frame. Evaluating is
/// cheap, so direction scans build this once.
#[derive(Clone, Debug)]
pub struct JacobiPolynomials {
    pub point: Vec<f64>,
    pub order: usize,
    pub frame: Matrix<f64>,
    pub frame_inv: Matrix<f64>,
    /// `operators[i - 2][a][b]`, homogeneous of degree `i`
    pub operators: Vec<Matrix<Poly<f64>>>,
}

impl JacobiPolynomials {
    pub fn new(metric: &MetricField, p: &[f64], k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidOrder(k));
        }
        let m = metric.dim();
        let g = metric.expansion(p, k)?;
        let g0: Matrix<f64> = g.iter().map(|r| r.iter().map(|q| q.constant_term()).collect()).collect();
        let (frame, frame_inv) = orthonormal_frame(&g0);
        let dir: Vec<Poly<f64>> = (0..m).map(Poly::var).collect();
        let series = transported_jacobi_series(&g, &dir, k, false);
        let operators = series
            .operators
            .iter()
            .map(|op| {
                (0..m)
                    .map(|a| {
                        (0..m)
                            .map(|b| {
                                let mut acc = Poly::zero();
                                for c in 0..m {
                                    for d in 0..m {
                                        let w = frame[a][c] * frame_inv[d][b];
                                        if w != 0.0 {
                                            acc.add_assign(&op[c][d].scale(&w));
                                        }
                                    }
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(JacobiPolynomials { point: p.to_vec(), order: k, frame, frame_inv, operators })
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// `x` is in chart coordinates.
    pub fn stack(&self, x: &[f64]) -> Result<JacobiOperatorStack> {
        if x.iter().all(|v| *v == 0.0) {
            return Err(Error::ZeroDirection);
        }
        let operators = self
            .operators
            .iter()
            .map(|op| op.iter().map(|r| r.iter().map(|q| q.eval(x)).collect()).collect())
            .collect();
        Ok(JacobiOperatorStack {
            point: self.point.clone(),
            direction: x.to_vec(),
            x_hat: mat_vec(&self.frame, x),
            order: self.order,
            operators,
            mode: StackMode::Numerical,
        })
    }
}

fn is_origin(p: &[f64]) -> bool {
    p.iter().all(|v| *v == 0.0)
}

/// Exact operators of a jet metric at the origin for a rational direction.
pub fn exact_stack(metric: &MetricField, x: &[Q], k: usize) -> Result<Vec<Matrix<Q>>> {
    let jet = metric
        .jet()
        .ok_or_else(|| Error::InvalidParameter("exact operators need a jet metric".into()))?;
    if k < 2 {
        return Err(Error::InvalidOrder(k));
    }
    if x.iter().all(|v| *v == Q::from_integer(0.into())) {
        return Err(Error::ZeroDirection);
    }
    let r = rho(&jet.with_order(k))?;
    Ok((2..=k).map(|i| r.operator_at(i, x)).collect())
}

/// `R²_x, …, R^k_x` at `(p, x)`: exact for jet metrics at the origin, else by
/// Taylor series of the transported operator along the geodesic.
pub fn jacobi_operator_stack(metric: &MetricField, p: &[f64], x: &[f64], k: usize) -> Result<JacobiOperatorStack> {
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    if k < 2 {
        return Err(Error::InvalidOrder(k));
    }
    if metric.mode() == DerivativeMode::ExactPolynomial && is_origin(p) {
        let xq: Vec<Q> = x
            .iter()
            .map(|v| Q::from_float(*v).ok_or_else(|| Error::InvalidParameter("non-finite direction".into())))
            .collect::<Result<_>>()?;
        let ops = exact_stack(metric, &xq, k)?;
        return Ok(JacobiOperatorStack {
            point: p.to_vec(),
            direction: x.to_vec(),
            x_hat: x.to_vec(),
            order: k,
            operators: ops
                .iter()
                .map(|a| a.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect())
                .collect(),
            mode: StackMode::Exact,
        });
    }
    JacobiPolynomials::new(metric, p, k)?.stack(x)
}

/// Same as [`jacobi_operator_stack`] but never uses the exact path.
pub fn numerical_stack(metric: &MetricField, p: &[f64], x: &[f64], k: usize) -> Result<JacobiOperatorStack> {
    JacobiPolynomials::new(metric, p, k)?.stack(x)
}

/// Largest `‖A − Aᵀ‖`, and largest `‖A x̂‖ / (‖A‖ |x̂|)` over the stack.
pub fn stack_residuals(s: &JacobiOperatorStack) -> (f64, f64) {
    let mut sym = 0.0f64;
    let mut kill = 0.0f64;
    let xn = s.x_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    for a in &s.operators {
        let m = a.len();
        let norm = frobenius(a);
        for i in 0..m {
            for j in 0..m {
                sym = sym.max((a[i][j] - a[j][i]).abs());
            }
        }
        let ax = mat_vec(a, &s.x_hat);
        let r = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            kill = kill.max(r / (norm * xn));
        }
    }
    (sym, kill)
}

pub fn frobenius(a: &Matrix<f64>) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Conjugates an orthonormal-frame operator back to chart coordinates.
pub fn to_coordinates(polys: &JacobiPolynomials, a: &Matrix<f64>) -> Matrix<f64> {
    mat_mul(&mat_mul(&polys.frame_inv, a), &polys.frame)
}

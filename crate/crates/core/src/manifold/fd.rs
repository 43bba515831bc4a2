//! Finite-difference Taylor coefficients for metrics without analytic
//! derivatives.

use crate::algebra::poly::{monomials_of_degree, Mono};
use crate::algebra::Poly;
use crate::error::{Error, Result};

use super::metric::{Matrix, MetricField};

/// Highest derivative order estimated by differences.
pub const FD_MAX_DEGREE: usize = 4;

/// Second-order central stencil for the `n`-th derivative: offsets and weights.
fn stencil(n: u8) -> &'static [(i32, f64)] {
    match n {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("derivative order above {FD_MAX_DEGREE}"),
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// `∂^α g(p) / α!` by a tensor-product stencil at step `h`.
fn partial(metric: &MetricField, p: &[f64], alpha: &Mono, h: f64) -> Matrix<f64> {
    let m = metric.dim();
    let mut acc = vec![vec![0.0; m]; m];
    let stencils: Vec<&[(i32, f64)]> = (0..m).map(|i| stencil(alpha[i])).collect();
    let mut idx = vec![0usize; m];
    loop {
        let mut w = 1.0;
        let mut q = p.to_vec();
        for i in 0..m {
            let (off, c) = stencils[i][idx[i]];
            w *= c;
            q[i] += off as f64 * h;
        }
        let g = metric.eval_unchecked(&q);
        for a in 0..m {
            for b in 0..m {
                acc[a][b] += w * g[a][b];
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                let order: i32 = alpha[..m].iter().map(|&e| e as i32).sum();
                let denom = h.powi(order) * alpha[..m].iter().map(|&e| factorial(e)).product::<f64>();
                for row in acc.iter_mut() {
                    for v in row.iter_mut() {
                        *v /= denom;
                    }
                }
                return acc;
            }
            idx[i] += 1;
            if idx[i] < stencils[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Taylor expansion of `g` at `p` through `degree`, each coefficient from a
/// Richardson-extrapolated central difference with step
/// `ε^{1/(n+2)} · edge` for derivative order `n`.
pub fn expansion(metric: &MetricField, p: &[f64], degree: usize) -> Result<Matrix<Poly<f64>>> {
    if degree > FD_MAX_DEGREE {
        return Err(Error::DerivativeEstimation(format!(
            "finite differences support derivative order at most {FD_MAX_DEGREE}, requested {degree}"
        )));
    }
    let m = metric.dim();
    let scale = metric.domain().edge();
    let mut out = vec![vec![Poly::zero(); m]; m];
    for n in 0..=degree {
        let h = f64::EPSILON.powf(1.0 / (n as f64 + 2.0)) * scale;
        if n > 0 && !metric.domain().contains_with_margin(p, 2.0 * h) {
            return Err(Error::StencilOutsideDomain(p.to_vec()));
        }
        for alpha in monomials_of_degree(m, n) {
            let coarse = partial(metric, p, &alpha, h);
            let fine = partial(metric, p, &alpha, 0.5 * h);
            for a in 0..m {
                for b in a..m {
                    let v = if n == 0 { fine[a][b] } else { (4.0 * fine[a][b] - coarse[a][b]) / 3.0 };
                    let spread = (fine[a][b] - coarse[a][b]).abs();
                    if !v.is_finite() || spread > 1e-1 * (1.0 + v.abs()) {
                        return Err(Error::DerivativeEstimation(format!(
                            "difference estimates of a degree-{n} coefficient disagree by {spread:.3e}"
                        )));
                    }
                    if v != 0.0 {
                        out[a][b].add_term(alpha, v);
                    }
                }
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            out[a][b] = out[b][a].clone();
        }
    }
    Ok(out)
}

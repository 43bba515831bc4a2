//! Fast pointwise connection and curvature from first and second derivatives
//! of `g`, for use inside integrators.

use crate::algebra::poly::MAX_VARS;
use crate::algebra::{Layout, Taylor};
use crate::error::Result;

use super::metric::{DerivativeMode, Matrix, MetricField};

/// `g`, `g⁻¹`, `Γ^c_{ab}` and optionally `R^d_{abc}` at a point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub g: Matrix<f64>,
    pub ginv: Matrix<f64>,
    pub gamma: Vec<Matrix<f64>>,
    pub riemann: Option<Vec<Vec<Matrix<f64>>>>,
}

pub fn invert(g: &Matrix<f64>) -> Matrix<f64> {
    let m = g.len();
    let a = nalgebra::DMatrix::from_fn(m, m, |i, j| g[i][j]);
    let inv = a.try_inverse().unwrap_or_else(|| nalgebra::DMatrix::from_element(m, m, f64::NAN));
    (0..m).map(|i| (0..m).map(|j| inv[(i, j)]).collect()).collect()
}

fn unit(i: usize) -> [u8; MAX_VARS] {
    let mut e = [0u8; MAX_VARS];
    e[i] += 1;
    e
}

fn pair(i: usize, j: usize) -> [u8; MAX_VARS] {
    let mut e = unit(i);
    e[j] += 1;
    e
}

/// Metric derivatives `(g, ∂_e g_ab, ∂_e∂_f g_ab)` at `p`.
#[allow(clippy::type_complexity)]
fn derivatives(metric: &MetricField, p: &[f64], order: usize) -> Result<(Matrix<f64>, Vec<Matrix<f64>>, Vec<Vec<Matrix<f64>>>)> {
    let m = metric.dim();
    let coeff: Box<dyn Fn(usize, usize, &[u8; MAX_VARS]) -> f64>;
    if metric.mode() == DerivativeMode::FiniteDifference {
        let e = metric.expansion(p, order)?;
        coeff = Box::new(move |a, b, mono| e[a][b].coeff(mono));
    } else {
        let layout = Layout::get(m, order);
        let vars: Vec<Taylor> = (0..m).map(|i| Taylor::variable(&layout, i, p[i])).collect();
        let g = metric.model().eval(m, &vars);
        coeff = Box::new(move |a, b, mono| g[a][b].coeff(mono));
    }
    let g0: Matrix<f64> = (0..m).map(|a| (0..m).map(|b| coeff(a, b, &[0; MAX_VARS])).collect()).collect();
    let dg: Vec<Matrix<f64>> = (0..m)
        .map(|e| (0..m).map(|a| (0..m).map(|b| coeff(a, b, &unit(e))).collect()).collect())
        .collect();
    let d2g = if order >= 2 {
        (0..m)
            .map(|e| {
                (0..m)
                    .map(|f| {
                        let w = if e == f { 2.0 } else { 1.0 };
                        (0..m).map(|a| (0..m).map(|b| w * coeff(a, b, &pair(e, f))).collect()).collect()
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok((g0, dg, d2g))
}

impl LocalGeometry {
    /// `with_curvature` requests second derivatives and the Riemann tensor.
    pub fn at(metric: &MetricField, p: &[f64], with_curvature: bool) -> Result<Self> {
        let m = metric.dim();
        let (g, dg, d2g) = derivatives(metric, p, if with_curvature { 2 } else { 1 })?;
        let ginv = invert(&g);
        // lowered: Γ_{d,ab} = ½(∂a g_db + ∂b g_da − ∂d g_ab)
        let low = |d: usize, a: usize, b: usize| 0.5 * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b]);
        let mut gamma = vec![vec![vec![0.0; m]; m]; m];
        for c in 0..m {
            for a in 0..m {
                for b in a..m {
                    let v: f64 = (0..m).map(|d| ginv[c][d] * low(d, a, b)).sum();
                    gamma[c][a][b] = v;
                    gamma[c][b][a] = v;
                }
            }
        }
        let riemann = if with_curvature {
            // ∂_e Γ^c_ab = −g^{cf} ∂_e g_{fh} Γ^h_ab + g^{cd} ∂_e Γ_{d,ab}
            let mut dgamma = vec![vec![vec![vec![0.0; m]; m]; m]; m];
            for e in 0..m {
                for c in 0..m {
                    for a in 0..m {
                        for b in 0..m {
                            let mut s = 0.0;
                            for d in 0..m {
                                let dlow = 0.5 * (d2g[e][a][d][b] + d2g[e][b][d][a] - d2g[e][d][a][b]);
                                s += ginv[c][d] * dlow;
                                let mut t = 0.0;
                                for h in 0..m {
                                    t += dg[e][d][h] * gamma[h][a][b];
                                }
                                s -= ginv[c][d] * t;
                            }
                            dgamma[e][c][a][b] = s;
                        }
                    }
                }
            }
            let mut r = vec![vec![vec![vec![0.0; m]; m]; m]; m];
            for d in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..m {
                            let mut s = dgamma[a][d][b][c] - dgamma[b][d][a][c];
                            for e in 0..m {
                                s += gamma[e][b][c] * gamma[d][a][e] - gamma[e][a][c] * gamma[d][b][e];
                            }
                            r[d][a][b][c] = s;
                        }
                    }
                }
            }
            Some(r)
        } else {
            None
        };
        Ok(LocalGeometry { g, ginv, gamma, riemann })
    }

    /// `Γ(u, w)^c = Γ^c_{ab} u^a w^b`.
    pub fn gamma_apply(&self, u: &[f64], w: &[f64], out: &mut [f64]) {
        let m = self.g.len();
        for (c, o) in out.iter_mut().enumerate().take(m) {
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += self.gamma[c][a][b] * u[a] * w[b];
                }
            }
            *o = s;
        }
    }

    /// `Rm(u, v)w`.
    pub fn rm(&self, u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
        let r = self.riemann.as_ref().expect("curvature not computed");
        let m = self.g.len();
        (0..m)
            .map(|d| {
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..m {
                            s += r[d][a][b][c] * u[a] * v[b] * w[c];
                        }
                    }
                }
                s
            })
            .collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.g.len();
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += u[a] * self.g[a][b] * v[b];
            }
        }
        s
    }
}

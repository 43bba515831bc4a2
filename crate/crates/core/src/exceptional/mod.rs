//! Exceptional invariant subspaces of Jacobi operator families.

pub mod brute;
mod family;
pub mod grid;
mod scan;

pub use family::{
    analyze_family, invariance_residual, irreducibility_margin, orthogonal_complement_basis, restrict_to_orthogonal,
    symmetric_commutant, symmetric_commutant_dim, verdict_from_margin, Commutant, ExceptionalityReport, Margin, Verdict,
};
pub use scan::{
    direction_margin, random_jet_survey, scan_directions, scan_geodesic, survey_sample, DirectionSample, DirectionScan,
    GeodesicScan, JetSurvey, SurveyRow, TransportedSubspace,
};

use crate::error::Result;
use crate::manifold::{jacobi_operator_stack, MetricField};
use crate::Tolerances;

/// Exceptionality of `R²_x, …, R^k_x` at `(p, x)`. The witness is expressed
/// in the `g(p)`-orthonormal frame, where the direction is `x̂ = F x`.
pub fn exceptional_at(metric: &MetricField, p: &[f64], x: &[f64], k: usize, tol: &Tolerances) -> Result<ExceptionalityReport> {
    let s = jacobi_operator_stack(metric, p, x, k)?;
    analyze_family(&s.operators, &s.x_hat, tol)
}

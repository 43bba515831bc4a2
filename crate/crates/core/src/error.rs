use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown catalog metric `{0}`")]
    UnknownMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("metric is not positive definite at {point:?} (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eig: f64 },
    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain(Vec<f64>),
    #[error("finite-difference stencil leaves the chart domain near {0:?}")]
    StencilOutsideDomain(Vec<f64>),
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("order {0} is out of range")]
    InvalidOrder(usize),
    #[error("derivative estimation failed: {0}")]
    DerivativeEstimation(String),
    #[error("geodesic left the chart domain at t = {0}")]
    Truncated(f64),
    #[error("conjugate points (reciprocal condition number {0:e})")]
    ConjugatePoints(f64),
    #[error("no minimizing geodesic found: {0}")]
    NoGeodesic(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("inconsistent jet: {0}")]
    InconsistentJet(String),
    #[error("inadmissible operator: {0}")]
    InadmissibleOperator(String),
    #[error("no boundary geodesic: {0}")]
    NoBoundaryGeodesic(String),
    #[error("point is not in the boundary band: {0}")]
    NotBoundary(String),
    #[error("time {0} lies outside the path")]
    TimeOutOfRange(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

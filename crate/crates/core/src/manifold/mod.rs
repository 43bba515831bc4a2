//! Chart metrics, their curvature, and Jacobi operators of all orders.

pub mod catalog;
pub mod curvature;
pub mod fd;
pub mod local;
pub mod metric;
pub mod stack;

pub use catalog::{catalog_metric, CatalogParams, Chart, CATALOG_NAMES};
pub use curvature::{christoffel, curvature_operator, orthonormal_frame, CurvatureData};
pub use metric::{BoxDomain, DerivativeMode, Matrix, MetricField, MetricFn, Model};
pub use stack::{jacobi_operator_stack, numerical_stack, JacobiOperatorStack, JacobiPolynomials, StackMode};

#[cfg(test)]
mod tests;

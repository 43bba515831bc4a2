//! Numerical and exact tools for Jacobi operators of Riemannian metrics,
//! their jets, and convexity experiments built on them.

pub mod algebra;
pub mod convex;
pub mod error;
pub mod exceptional;
pub mod exec;
pub mod geodesic;
pub mod jets;
pub mod manifold;
pub mod tolerances;
pub mod transport;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

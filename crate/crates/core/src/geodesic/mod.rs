//! Geodesics, parallel transport, and Jacobi fields.

pub mod jacobi;
pub mod minimizing;
pub mod ode;
pub mod path;

pub use jacobi::{jacobi_bvp, jacobi_ivp, JacobiField};
pub use minimizing::{inverse_exp, minimizing_geodesic, MinimizeOptions, Minimizers};
pub use path::{parallel_transport, shoot_geodesic, GeodesicPath};

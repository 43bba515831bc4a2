//! Exact and truncated-series arithmetic shared by the geometry modules.

pub mod coeff;
pub mod eigen;
pub mod elim;
pub mod poly;
pub mod taylor;

pub use coeff::{rat, Coeff, Dual};
pub use eigen::symmetric_eigen;
pub use poly::{Mono, Poly, MAX_VARS};
pub use taylor::{Layout, Real, Taylor};

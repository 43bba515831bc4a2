//! Convex bodies on chart manifolds: membership, tangent cones, hull
//! iteration and audits.

pub mod audit;
pub mod body;
pub mod cone;
pub mod flat;
pub mod hull;

pub use audit::{
    boundary_points, check_boundary_geodesic, find_boundary_geodesic, key_lemma_audit, strict_convexity_audit, AuditOptions,
    BoundaryPointReport, KeyLemmaAudit, StrictConvexityReport,
};
pub use body::{catalog_body, BodyParams, ConvexBody, Membership, Shape, BODY_NAMES};
pub use cone::{classify_extreme, tangent_cone_sample, ConeSample, ExtremeVerdict};
pub use hull::{directed_hausdorff, hull_iterate, HullOptions, HullReport, HullRound, Net};

//! Numerical tolerances shared by the geometry modules. All are configurable.

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// symmetry and `R x = 0` checks on Jacobi operators
    pub sym: f64,
    /// curvature-tensor symmetries and Bianchi identity
    pub curv: f64,
    /// degree-`i` homogeneity, relative
    pub hom: f64,
    /// agreement between exact and numerical operator stacks
    pub cross: f64,
    /// relative speed drift along geodesics and integrator tolerance
    pub geo: f64,
    /// Jacobi-equation residual
    pub jac: f64,
    /// reciprocal condition number below which a boundary problem is singular
    pub conj: f64,
    /// relative irreducibility margin treated as zero
    pub margin: f64,
    /// invariance residual of a witness subspace
    pub inv: f64,
    /// relative length difference flagged as a tie between minimizers
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sym: 1e-8,
            curv: 1e-8,
            hom: 1e-6,
            cross: 1e-5,
            geo: 1e-9,
            jac: 1e-6,
            conj: 1e-8,
            margin: 1e-7,
            inv: 1e-6,
            tie: 1e-4,
        }
    }
}

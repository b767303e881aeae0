//! Lagrange finite elements on triangles: quadrature, P1 scalar and P2
//! vector spaces, nodal interpolation and error norms.

mod element;
mod function;
mod quadrature;
mod space;

pub use element::{edge_p2_values, AffineMap};
pub use function::{
    interpolate_scalar, interpolate_vector, CoefficientVector, ErrorNorms, NORM_QUADRATURE_DEGREE,
};
pub use quadrature::{gauss_legendre, quadrature_rule, QuadratureRule};
pub use space::{FeSpace, Family};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("no quadrature rule of degree {0} (supported: 1..=6)")]
    UnsupportedDegree(usize),
    #[error("coefficient vector has {found} entries, space has {expected} DOFs")]
    LengthMismatch { expected: usize, found: usize },
}

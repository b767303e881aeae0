//! Material parameters, weak-form assembly of the total-pressure Biot system
//! and the coupled / decoupled backward-Euler steppers.
//!
//! Unknowns are ordered `[u | ξ | p]` in every monolithic system: the P2
//! displacement DOFs first, then the P1 total pressure, then the P1 fluid
//! pressure.

mod assembly;
mod data;
mod material;
mod stepper;
mod system;

pub use assembly::{Operators, Spaces};
pub use data::{FluxFn, LoadTime, ProblemData, Robin, ScalarFn, Source, TractionFn, VectorFn};
pub use material::{lame_from_e_nu, BiotMaterial};
pub use stepper::{
    recover_pressure, run_transient, solve_steady, total_pressure_init, Algorithm, CoupledStepper, DecoupledStepper,
    InitialCondition, TransientState, Trajectory,
};
pub use system::{LinearSystem, SystemKind};

use thiserror::Error;

use crate::fem::FemError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum BiotError {
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("boundary tag {0} does not occur in the mesh")]
    MissingTag(u32),
    #[error("ill-posed problem: {0}")]
    IllPosed(String),
    #[error("field spaces do not match: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

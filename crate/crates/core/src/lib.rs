//! Finite-element solver for quasi-static Biot poroelasticity in the
//! three-field displacement / total pressure / fluid pressure form.

pub mod biot;
pub mod cli;
pub mod edema;
pub mod fem;
pub mod mesh;
pub mod solver;
pub mod verify;

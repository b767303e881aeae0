use std::fmt;
use std::sync::Arc;

use super::BiotError;
use crate::mesh::Mesh;

/// Scalar function of `(x, y, t)`.
pub type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// Vector function of `(x, y, t)`.
pub type VectorFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;
/// Traction of `(x, y, t, n)` with `n` the outward unit normal.
pub type TractionFn = Arc<dyn Fn(f64, f64, f64, [f64; 2]) -> [f64; 2] + Send + Sync>;
/// Normal fluid flux of `(x, y, t, n)`, added to the pressure equation as `⟨g, ψ⟩`.
pub type FluxFn = Arc<dyn Fn(f64, f64, f64, [f64; 2]) -> f64 + Send + Sync>;

/// Fluid source, optionally restricted to one mesh region.
#[derive(Clone)]
pub struct Source {
    pub value: ScalarFn,
    pub region: Option<u32>,
}

/// Absorption law `K∇p·n = c_b (p_far − p)` on a boundary tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robin {
    pub tag: u32,
    pub c_b: f64,
    pub p_far: f64,
}

/// Time level at which loads and Dirichlet data of step `n → n+1` are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadTime {
    #[default]
    Next,
    Current,
}

/// Right-hand sides and boundary conditions of a Biot problem.
#[derive(Clone, Default)]
pub struct ProblemData {
    pub body_force: Option<VectorFn>,
    pub source: Option<Source>,
    pub traction: Vec<(u32, TractionFn)>,
    pub flux: Vec<(u32, FluxFn)>,
    pub robin: Vec<Robin>,
    pub dirichlet_u: Vec<(u32, VectorFn)>,
    pub dirichlet_p: Vec<(u32, ScalarFn)>,
    pub load_time: LoadTime,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("body_force", &self.body_force.is_some())
            .field("source_region", &self.source.as_ref().map(|s| s.region))
            .field("traction", &self.traction.iter().map(|t| t.0).collect::<Vec<_>>())
            .field("flux", &self.flux.iter().map(|t| t.0).collect::<Vec<_>>())
            .field("robin", &self.robin)
            .field("dirichlet_u", &self.dirichlet_u.iter().map(|t| t.0).collect::<Vec<_>>())
            .field("dirichlet_p", &self.dirichlet_p.iter().map(|t| t.0).collect::<Vec<_>>())
            .field("load_time", &self.load_time)
            .finish()
    }
}

impl ProblemData {
    /// Checks tags against the mesh and that the problem is uniquely solvable.
    /// `steady` problems additionally need a Dirichlet or Robin condition for p.
    pub fn validate(&self, mesh: &Mesh, steady: bool) -> Result<(), BiotError> {
        let tags = self
            .traction
            .iter()
            .map(|t| t.0)
            .chain(self.flux.iter().map(|t| t.0))
            .chain(self.robin.iter().map(|r| r.tag))
            .chain(self.dirichlet_u.iter().map(|t| t.0))
            .chain(self.dirichlet_p.iter().map(|t| t.0));
        for tag in tags {
            if !mesh.has_boundary_tag(tag) {
                return Err(BiotError::MissingTag(tag));
            }
        }
        if self.dirichlet_u.is_empty() {
            return Err(BiotError::IllPosed(
                "no Dirichlet boundary for the displacement; rigid motions are undetermined".into(),
            ));
        }
        if steady && self.dirichlet_p.is_empty() && self.robin.is_empty() {
            return Err(BiotError::IllPosed(
                "steady pressure needs a Dirichlet or Robin boundary; the constant is undetermined".into(),
            ));
        }
        for r in &self.robin {
            if !(r.c_b >= 0.0 && r.c_b.is_finite()) {
                return Err(BiotError::Domain(format!("Robin conductance must be nonnegative, got {}", r.c_b)));
            }
        }
        Ok(())
    }

    pub(crate) fn load_time(&self, t_n: f64, t_next: f64) -> f64 {
        match self.load_time {
            LoadTime::Next => t_next,
            LoadTime::Current => t_n,
        }
    }
}

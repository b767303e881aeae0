use super::assembly::{Operators, Spaces};
use super::data::ProblemData;
use super::material::BiotMaterial;
use super::BiotError;
use crate::solver::{factorize, Factorization, SparseMatrix, TripletList};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// Monolithic `[u | ξ | p]` backward-Euler system.
    Coupled,
    /// Monolithic system with the time-derivative terms removed.
    Steady,
    /// Generalized Stokes system over `[u | ξ]`.
    Stokes,
    /// Reaction–diffusion system over `p`.
    Diffusion,
}

/// A system matrix with Dirichlet DOFs eliminated symmetrically.
///
/// `full` keeps the unconstrained operator so that lifting can move the
/// coupling to prescribed values onto the right-hand side; `matrix` has the
/// constrained rows and columns replaced by identity.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    kind: SystemKind,
    full: SparseMatrix,
    matrix: SparseMatrix,
    constrained: Vec<bool>,
    p_offset: usize,
    dt: f64,
}

fn dirichlet_u_dofs(spaces: &Spaces, data: &ProblemData) -> Vec<usize> {
    let mut d: Vec<usize> = data
        .dirichlet_u
        .iter()
        .flat_map(|(tag, _)| spaces.u.boundary_dofs(*tag).iter().map(|&(dof, _)| dof))
        .collect();
    d.sort_unstable();
    d.dedup();
    d
}

fn dirichlet_p_dofs(spaces: &Spaces, data: &ProblemData) -> Vec<usize> {
    let mut d: Vec<usize> = data
        .dirichlet_p
        .iter()
        .flat_map(|(tag, _)| spaces.p.boundary_dofs(*tag).iter().map(|&(dof, _)| dof))
        .collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// Prescribed displacement values at time `t` as `(u DOF, value)`. Where tags
/// meet, the later tag in `data.dirichlet_u` wins.
pub(crate) fn dirichlet_u_values(spaces: &Spaces, data: &ProblemData, t: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (tag, g) in &data.dirichlet_u {
        for &(dof, c) in spaces.u.boundary_dofs(*tag) {
            let [x, y] = spaces.u.dof_coords(dof);
            out.push((dof, g(x, y, t)[c]));
        }
    }
    out
}

pub(crate) fn dirichlet_p_values(spaces: &Spaces, data: &ProblemData, t: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (tag, g) in &data.dirichlet_p {
        for &(dof, _) in spaces.p.boundary_dofs(*tag) {
            let [x, y] = spaces.p.dof_coords(dof);
            out.push((dof, g(x, y, t)));
        }
    }
    out
}

impl LinearSystem {
    fn new(kind: SystemKind, full: SparseMatrix, constrained_dofs: impl IntoIterator<Item = usize>) -> Self {
        let mut constrained = vec![false; full.n_rows()];
        for d in constrained_dofs {
            constrained[d] = true;
        }
        let matrix = full.eliminate(&constrained);
        let p_offset = full.n_rows();
        Self { kind, full, matrix, constrained, p_offset, dt: 0.0 }
    }

    /// Backward-Euler system of the coupled algorithm:
    ///
    /// ```text
    /// [ 2μ E    −Bᵀ             0                         ]
    /// [ −B      −M/λ            αM/λ                      ]
    /// [ 0       −αM/(λΔt)       (c0+α²/λ)M/Δt + K S + R   ]
    /// ```
    pub fn coupled(
        spaces: &Spaces,
        ops: &Operators,
        mat: &BiotMaterial,
        dt: f64,
        data: &ProblemData,
    ) -> Result<Self, BiotError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(BiotError::Domain(format!("time step must be positive, got {dt}")));
        }
        Self::monolithic(SystemKind::Coupled, spaces, ops, mat, Some(dt), data)
    }

    /// Steady counterpart of [`LinearSystem::coupled`]; the pressure row is
    /// `K S + R` alone.
    pub fn steady(spaces: &Spaces, ops: &Operators, mat: &BiotMaterial, data: &ProblemData) -> Result<Self, BiotError> {
        Self::monolithic(SystemKind::Steady, spaces, ops, mat, None, data)
    }

    fn monolithic(
        kind: SystemKind,
        spaces: &Spaces,
        ops: &Operators,
        mat: &BiotMaterial,
        dt: Option<f64>,
        data: &ProblemData,
    ) -> Result<Self, BiotError> {
        let n = spaces.n_total();
        let (ox, op) = (spaces.xi_offset(), spaces.p_offset());
        let (lambda, alpha) = (mat.lambda(), mat.alpha());
        let nnz = ops.strain.nnz() + 2 * ops.div.nnz() + 6 * ops.mass.nnz() + ops.robin.nnz();
        let mut t = TripletList::with_capacity(n, n, nnz);
        t.add_block(&ops.strain, 0, 0, 2.0 * mat.mu());
        let bt = ops.div.transpose();
        t.add_block(&bt, 0, ox, -1.0);
        t.add_block(&ops.div, ox, 0, -1.0);
        t.add_block(&ops.mass, ox, ox, -1.0 / lambda);
        t.add_block(&ops.mass, ox, op, alpha / lambda);
        if let Some(dt) = dt {
            t.add_block(&ops.mass, op, ox, -alpha / (lambda * dt));
            t.add_block(&ops.mass, op, op, mat.storage() / dt);
        }
        t.add_block(&ops.stiffness, op, op, mat.conductivity());
        t.add_block(&ops.robin, op, op, 1.0);
        let full = t.build()?;
        let constrained = dirichlet_u_dofs(spaces, data)
            .into_iter()
            .chain(dirichlet_p_dofs(spaces, data).into_iter().map(|d| d + op));
        let mut sys = Self::new(kind, full, constrained);
        sys.p_offset = op;
        sys.dt = dt.unwrap_or(0.0);
        Ok(sys)
    }

    /// Generalized Stokes system `[2μ E, −Bᵀ; −B, −M/λ]` of the decoupled algorithm.
    pub fn stokes(spaces: &Spaces, ops: &Operators, mat: &BiotMaterial, data: &ProblemData) -> Result<Self, BiotError> {
        let n = spaces.n_u() + spaces.n_scalar();
        let ox = spaces.xi_offset();
        let mut t = TripletList::with_capacity(n, n, ops.strain.nnz() + 2 * ops.div.nnz() + ops.mass.nnz());
        t.add_block(&ops.strain, 0, 0, 2.0 * mat.mu());
        t.add_block(&ops.div.transpose(), 0, ox, -1.0);
        t.add_block(&ops.div, ox, 0, -1.0);
        t.add_block(&ops.mass, ox, ox, -1.0 / mat.lambda());
        let full = t.build()?.with_symmetric_flag(true);
        Ok(Self::new(SystemKind::Stokes, full, dirichlet_u_dofs(spaces, data)))
    }

    /// Pressure system `(c0+α²/λ)M/Δt + K S + R` of the decoupled algorithm.
    pub fn diffusion(
        spaces: &Spaces,
        ops: &Operators,
        mat: &BiotMaterial,
        dt: f64,
        data: &ProblemData,
    ) -> Result<Self, BiotError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(BiotError::Domain(format!("time step must be positive, got {dt}")));
        }
        let ns = spaces.n_scalar();
        let mut t = TripletList::with_capacity(ns, ns, 3 * ops.mass.nnz() + ops.robin.nnz());
        t.add_block(&ops.mass, 0, 0, mat.storage() / dt);
        t.add_block(&ops.stiffness, 0, 0, mat.conductivity());
        t.add_block(&ops.robin, 0, 0, 1.0);
        let full = t.build()?.with_symmetric_flag(true);
        Ok(Self::new(SystemKind::Diffusion, full, dirichlet_p_dofs(spaces, data)))
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// The operator before Dirichlet elimination.
    pub fn full(&self) -> &SparseMatrix {
        &self.full
    }

    /// The operator that is factored: constrained rows and columns are identity.
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn constrained(&self) -> &[bool] {
        &self.constrained
    }

    pub fn dim(&self) -> usize {
        self.constrained.len()
    }

    /// Row scaling that makes the factored matrix symmetric, if one is known.
    /// For the coupled system the pressure rows are multiplied by `−Δt`.
    pub fn symmetrizing_scale(&self) -> Option<Vec<f64>> {
        match self.kind {
            SystemKind::Coupled => {
                let mut s = vec![1.0; self.dim()];
                s[self.p_offset..].fill(-self.dt);
                Some(s)
            }
            _ => None,
        }
    }

    pub fn factorize(&self) -> Result<Factorization, BiotError> {
        match self.symmetrizing_scale() {
            Some(s) => {
                let scaled = self.matrix.scale_rows(&s).with_symmetric_flag(true);
                Ok(factorize(&scaled)?.with_row_scale(s))
            }
            None => Ok(factorize(&self.matrix)?),
        }
    }

    /// Moves the prescribed values `g` (indexed by system DOF) onto the
    /// right-hand side and pins the constrained entries.
    pub fn apply_dirichlet(&self, rhs: &mut [f64], g: &[(usize, f64)]) {
        assert_eq!(rhs.len(), self.dim());
        if g.is_empty() {
            return;
        }
        let mut lift = vec![0.0; self.dim()];
        for &(d, v) in g {
            debug_assert!(self.constrained[d]);
            lift[d] = v;
        }
        self.full.mul_vec_add(&lift, -1.0, rhs);
        for (i, r) in rhs.iter_mut().enumerate() {
            if self.constrained[i] {
                *r = lift[i];
            }
        }
    }
}

use std::sync::Arc;

use log::{info, warn};

use super::assembly::{LoadAssembler, Operators, Spaces};
use super::data::{ProblemData, ScalarFn, VectorFn};
use super::material::BiotMaterial;
use super::system::{dirichlet_p_values, dirichlet_u_values, LinearSystem};
use super::BiotError;
use crate::fem::{interpolate_scalar, interpolate_vector, CoefficientVector, FeSpace};
use crate::mesh::Mesh;
use crate::solver::{factorize, Factorization, SparseMatrix};

/// Discrete state `(uⁿ, ξⁿ, pⁿ)` at time `t`.
#[derive(Debug, Clone)]
pub struct TransientState {
    pub t: f64,
    pub u: CoefficientVector,
    pub xi: CoefficientVector,
    pub p: CoefficientVector,
}

impl TransientState {
    pub fn zeros(spaces: &Spaces, t: f64) -> Self {
        Self {
            t,
            u: CoefficientVector::zeros(spaces.u.clone()),
            xi: CoefficientVector::zeros(spaces.xi.clone()),
            p: CoefficientVector::zeros(spaces.p.clone()),
        }
    }

    /// `∫ ((c0 + α²/λ) p − (α/λ) ξ)`, the fluid content conserved by the
    /// coupled scheme when no fluid enters or leaves.
    pub fn fluid_content(&self, mat: &BiotMaterial) -> f64 {
        let a = mat.storage();
        let b = mat.alpha() / mat.lambda();
        let mesh = self.p.space().mesh();
        let (p, xi) = (self.p.values(), self.xi.values());
        mesh.triangles()
            .iter()
            .enumerate()
            .map(|(t, tri)| {
                let s: f64 = tri.iter().map(|&v| a * p[v] - b * xi[v]).sum();
                mesh.triangle_area(t) * s / 3.0
            })
            .sum()
    }

    fn check_spaces(&self, spaces: &Spaces) -> Result<(), BiotError> {
        let same = |a: &Arc<FeSpace>, b: &Arc<FeSpace>| Arc::ptr_eq(a, b) || a.n_dofs() == b.n_dofs();
        if same(self.u.space(), &spaces.u) && same(self.xi.space(), &spaces.xi) && same(self.p.space(), &spaces.p) {
            Ok(())
        } else {
            Err(BiotError::Incompatible("state fields are not defined on the stepper's spaces".into()))
        }
    }
}

fn mass_solve(mass: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>, BiotError> {
    if rhs.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; rhs.len()]);
    }
    Ok(factorize(mass)?.solve(rhs)?)
}

fn project_total_pressure(
    ops: &Operators,
    u0: &CoefficientVector,
    p0: &CoefficientVector,
    mat: &BiotMaterial,
) -> Result<Vec<f64>, BiotError> {
    let bu = ops.div.mul_vec(u0.values());
    let div_u = mass_solve(&ops.mass, &bu)?;
    Ok(p0.values().iter().zip(&div_u).map(|(p, d)| mat.alpha() * p - mat.lambda() * d).collect())
}

fn check_same_mesh(u: &CoefficientVector, s: &CoefficientVector) -> Result<Spaces, BiotError> {
    let mesh = u.space().mesh();
    if !Arc::ptr_eq(mesh, s.space().mesh()) && **mesh != **s.space().mesh() {
        return Err(BiotError::Incompatible("fields live on different meshes".into()));
    }
    Ok(Spaces { mesh: mesh.clone(), u: u.space().clone(), xi: s.space().clone(), p: s.space().clone() })
}

/// `ξ⁰ = α p⁰ − λ div u⁰`, with `div u⁰` L²-projected onto the P1 space.
pub fn total_pressure_init(
    u0: &CoefficientVector,
    p0: &CoefficientVector,
    mat: &BiotMaterial,
) -> Result<CoefficientVector, BiotError> {
    let spaces = check_same_mesh(u0, p0)?;
    let ops = Operators::assemble(&spaces, &ProblemData::default())?;
    let xi = project_total_pressure(&ops, u0, p0, mat)?;
    Ok(CoefficientVector::new(p0.space().clone(), xi)?)
}

/// `p = (ξ + λ div u)/α`, with `div u` L²-projected onto the P1 space.
pub fn recover_pressure(
    xi: &CoefficientVector,
    u: &CoefficientVector,
    mat: &BiotMaterial,
) -> Result<CoefficientVector, BiotError> {
    let spaces = check_same_mesh(u, xi)?;
    let ops = Operators::assemble(&spaces, &ProblemData::default())?;
    let div_u = mass_solve(&ops.mass, &ops.div.mul_vec(u.values()))?;
    let p = xi
        .values()
        .iter()
        .zip(&div_u)
        .map(|(x, d)| (x + mat.lambda() * d) / mat.alpha())
        .collect();
    Ok(CoefficientVector::new(xi.space().clone(), p)?)
}

/// One factorization of the monolithic system, reused every step.
pub struct CoupledStepper {
    spaces: Spaces,
    mat: BiotMaterial,
    dt: f64,
    data: ProblemData,
    ops: Operators,
    system: LinearSystem,
    fact: Factorization,
    loads: LoadAssembler,
}

impl CoupledStepper {
    pub fn new(spaces: &Spaces, mat: &BiotMaterial, dt: f64, data: &ProblemData) -> Result<Self, BiotError> {
        data.validate(&spaces.mesh, false)?;
        let ops = Operators::assemble(spaces, data)?;
        let system = LinearSystem::coupled(spaces, &ops, mat, dt, data)?;
        let fact = system.factorize()?;
        Ok(Self {
            spaces: spaces.clone(),
            mat: *mat,
            dt,
            data: data.clone(),
            ops,
            system,
            fact,
            loads: LoadAssembler::new(spaces),
        })
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Right-hand side of the step from `state` to `state.t + Δt`, including
    /// Dirichlet lifting.
    pub fn rhs(&self, state: &TransientState) -> Vec<f64> {
        let sp = &self.spaces;
        let t_next = state.t + self.dt;
        let loads = self.loads.loads(&self.data, self.data.load_time(state.t, t_next));
        let mut rhs = vec![0.0; sp.n_total()];
        rhs[..sp.n_u()].copy_from_slice(&loads.u);
        let rp = &mut rhs[sp.p_offset()..];
        rp.copy_from_slice(&loads.p);
        let lambda = self.mat.lambda();
        self.ops.mass.mul_vec_add(state.p.values(), self.mat.storage() / self.dt, rp);
        self.ops.mass.mul_vec_add(state.xi.values(), -self.mat.alpha() / (lambda * self.dt), rp);
        let g: Vec<(usize, f64)> = dirichlet_u_values(sp, &self.data, t_next)
            .into_iter()
            .chain(dirichlet_p_values(sp, &self.data, t_next).into_iter().map(|(d, v)| (d + sp.p_offset(), v)))
            .collect();
        self.system.apply_dirichlet(&mut rhs, &g);
        rhs
    }

    pub fn step(&self, state: &TransientState) -> Result<TransientState, BiotError> {
        state.check_spaces(&self.spaces)?;
        let x = self.fact.solve(&self.rhs(state))?;
        split_monolithic(&self.spaces, state.t + self.dt, x)
    }

    /// Total-pressure initialization using the stepper's own operators.
    pub fn initial_state(&self, t: f64, u0: CoefficientVector, p0: CoefficientVector) -> Result<TransientState, BiotError> {
        initial_state(&self.ops, &self.spaces, &self.mat, t, u0, p0)
    }
}

fn initial_state(
    ops: &Operators,
    spaces: &Spaces,
    mat: &BiotMaterial,
    t: f64,
    u0: CoefficientVector,
    p0: CoefficientVector,
) -> Result<TransientState, BiotError> {
    let xi = CoefficientVector::new(spaces.xi.clone(), project_total_pressure(ops, &u0, &p0, mat)?)?;
    let state = TransientState { t, u: u0, xi, p: p0 };
    state.check_spaces(spaces)?;
    Ok(state)
}

fn split_monolithic(spaces: &Spaces, t: f64, mut x: Vec<f64>) -> Result<TransientState, BiotError> {
    let p = x.split_off(spaces.p_offset());
    let xi = x.split_off(spaces.xi_offset());
    Ok(TransientState {
        t,
        u: CoefficientVector::new(spaces.u.clone(), x)?,
        xi: CoefficientVector::new(spaces.xi.clone(), xi)?,
        p: CoefficientVector::new(spaces.p.clone(), p)?,
    })
}

/// Generalized Stokes solve with lagged pressure, then the pressure solve.
pub struct DecoupledStepper {
    spaces: Spaces,
    mat: BiotMaterial,
    dt: f64,
    data: ProblemData,
    ops: Operators,
    stokes: LinearSystem,
    diffusion: LinearSystem,
    stokes_fact: Factorization,
    diffusion_fact: Factorization,
    loads: LoadAssembler,
}

impl DecoupledStepper {
    pub fn new(spaces: &Spaces, mat: &BiotMaterial, dt: f64, data: &ProblemData) -> Result<Self, BiotError> {
        data.validate(&spaces.mesh, false)?;
        let ops = Operators::assemble(spaces, data)?;
        let stokes = LinearSystem::stokes(spaces, &ops, mat, data)?;
        let diffusion = LinearSystem::diffusion(spaces, &ops, mat, dt, data)?;
        let stokes_fact = stokes.factorize()?;
        let diffusion_fact = diffusion.factorize()?;
        Ok(Self {
            spaces: spaces.clone(),
            mat: *mat,
            dt,
            data: data.clone(),
            ops,
            stokes,
            diffusion,
            stokes_fact,
            diffusion_fact,
            loads: LoadAssembler::new(spaces),
        })
    }

    pub fn stokes_system(&self) -> &LinearSystem {
        &self.stokes
    }

    pub fn diffusion_system(&self) -> &LinearSystem {
        &self.diffusion
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, state: &TransientState) -> Result<TransientState, BiotError> {
        state.check_spaces(&self.spaces)?;
        let sp = &self.spaces;
        let (lambda, alpha) = (self.mat.lambda(), self.mat.alpha());
        let t_next = state.t + self.dt;
        let loads = self.loads.loads(&self.data, self.data.load_time(state.t, t_next));

        let mut rhs = vec![0.0; sp.n_u() + sp.n_scalar()];
        rhs[..sp.n_u()].copy_from_slice(&loads.u);
        self.ops.mass.mul_vec_add(state.p.values(), -alpha / lambda, &mut rhs[sp.xi_offset()..]);
        self.stokes.apply_dirichlet(&mut rhs, &dirichlet_u_values(sp, &self.data, t_next));
        let mut x = self.stokes_fact.solve(&rhs)?;
        let xi_next = x.split_off(sp.xi_offset());

        let mut rp = loads.p;
        self.ops.mass.mul_vec_add(state.p.values(), self.mat.storage() / self.dt, &mut rp);
        let dxi: Vec<f64> = xi_next.iter().zip(state.xi.values()).map(|(a, b)| a - b).collect();
        self.ops.mass.mul_vec_add(&dxi, alpha / (lambda * self.dt), &mut rp);
        self.diffusion.apply_dirichlet(&mut rp, &dirichlet_p_values(sp, &self.data, t_next));
        let p_next = self.diffusion_fact.solve(&rp)?;

        Ok(TransientState {
            t: t_next,
            u: CoefficientVector::new(sp.u.clone(), x)?,
            xi: CoefficientVector::new(sp.xi.clone(), xi_next)?,
            p: CoefficientVector::new(sp.p.clone(), p_next)?,
        })
    }

    pub fn initial_state(&self, t: f64, u0: CoefficientVector, p0: CoefficientVector) -> Result<TransientState, BiotError> {
        initial_state(&self.ops, &self.spaces, &self.mat, t, u0, p0)
    }
}

/// Solves the steady problem (time-derivative terms removed) with loads and
/// boundary data evaluated at `t`.
pub fn solve_steady(
    spaces: &Spaces,
    mat: &BiotMaterial,
    data: &ProblemData,
    t: f64,
) -> Result<TransientState, BiotError> {
    data.validate(&spaces.mesh, true)?;
    let ops = Operators::assemble(spaces, data)?;
    let system = LinearSystem::steady(spaces, &ops, mat, data)?;
    let loads = LoadAssembler::new(spaces).loads(data, t);
    let mut rhs = vec![0.0; spaces.n_total()];
    rhs[..spaces.n_u()].copy_from_slice(&loads.u);
    rhs[spaces.p_offset()..].copy_from_slice(&loads.p);
    let g: Vec<(usize, f64)> = dirichlet_u_values(spaces, data, t)
        .into_iter()
        .chain(dirichlet_p_values(spaces, data, t).into_iter().map(|(d, v)| (d + spaces.p_offset(), v)))
        .collect();
    system.apply_dirichlet(&mut rhs, &g);
    let x = system.factorize()?.solve(&rhs)?;
    split_monolithic(spaces, t, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Coupled,
    Decoupled,
}

/// Initial data of a transient run. ξ⁰ is always derived from u⁰ and p⁰.
#[derive(Clone)]
pub enum InitialCondition {
    /// Nodal interpolants of the given fields at t = 0.
    Interpolate { u: VectorFn, p: ScalarFn },
    /// u⁰ = 0 and p⁰ interpolated.
    ZeroDisplacement { p: ScalarFn },
    /// Given u⁰ and p⁰; the state's own ξ is ignored.
    Custom { u: CoefficientVector, p: CoefficientVector },
}

impl std::fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Interpolate { .. } => "Interpolate",
            Self::ZeroDisplacement { .. } => "ZeroDisplacement",
            Self::Custom { .. } => "Custom",
        })
    }
}

/// Sampled states of a run; `states[0]` is the initial state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<TransientState>,
    pub final_state: TransientState,
    pub steps: usize,
}

enum Stepper {
    Coupled(CoupledStepper),
    Decoupled(DecoupledStepper),
}

impl Stepper {
    fn step(&self, s: &TransientState) -> Result<TransientState, BiotError> {
        match self {
            Stepper::Coupled(c) => c.step(s),
            Stepper::Decoupled(d) => d.step(s),
        }
    }
}

/// Runs `round(T/Δt)` steps of the chosen algorithm from t = 0. Every
/// `sample_every`-th state is kept (0 keeps only the initial and final ones).
#[allow(clippy::too_many_arguments)]
pub fn run_transient(
    mesh: Arc<Mesh>,
    mat: &BiotMaterial,
    data: &ProblemData,
    dt: f64,
    t_final: f64,
    algorithm: Algorithm,
    initial: InitialCondition,
    sample_every: usize,
) -> Result<Trajectory, BiotError> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(BiotError::Domain(format!("final time must be nonnegative, got {t_final}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(BiotError::Domain(format!("time step must be positive, got {dt}")));
    }
    let steps = (t_final / dt).round() as usize;
    if (steps as f64 * dt - t_final).abs() > 1e-12 * t_final {
        warn!("final time {t_final} is not a multiple of the time step {dt}; running {steps} steps to {}", steps as f64 * dt);
    }
    let spaces = Spaces::new(mesh);
    let (u0, p0) = match initial {
        InitialCondition::Interpolate { u, p } => {
            (interpolate_vector(&spaces.u, |x, y, t| u(x, y, t), 0.0), interpolate_scalar(&spaces.p, |x, y, t| p(x, y, t), 0.0))
        }
        InitialCondition::ZeroDisplacement { p } => {
            (CoefficientVector::zeros(spaces.u.clone()), interpolate_scalar(&spaces.p, |x, y, t| p(x, y, t), 0.0))
        }
        InitialCondition::Custom { u, p } => (
            CoefficientVector::new(spaces.u.clone(), u.into_values())?,
            CoefficientVector::new(spaces.p.clone(), p.into_values())?,
        ),
    };
    let (stepper, initial) = match algorithm {
        Algorithm::Coupled => {
            let s = CoupledStepper::new(&spaces, mat, dt, data)?;
            let init = s.initial_state(0.0, u0, p0)?;
            (Stepper::Coupled(s), init)
        }
        Algorithm::Decoupled => {
            let s = DecoupledStepper::new(&spaces, mat, dt, data)?;
            let init = s.initial_state(0.0, u0, p0)?;
            (Stepper::Decoupled(s), init)
        }
    };
    info!("{algorithm:?} run: {} unknowns, {steps} steps of {dt}", spaces.n_total());
    let mut states = vec![initial.clone()];
    let mut state = initial;
    for n in 1..=steps {
        let mut next = stepper.step(&state)?;
        // accumulate time from the step count to avoid drift
        next.t = n as f64 * dt;
        state = next;
        if sample_every > 0 && n % sample_every == 0 && n != steps {
            states.push(state.clone());
        }
    }
    if steps > 0 {
        states.push(state.clone());
    }
    Ok(Trajectory { states, final_state: state, steps })
}

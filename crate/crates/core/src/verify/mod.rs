//! Manufactured-solution verification on the unit square and observed
//! convergence orders under uniform refinement.
//!
//! Exact solution: `u = (sin x, sin y)e^{−t}`, `p = sin(x+y)e^{−t}`, with
//! Dirichlet u and p on the left and right sides and traction and flux data on
//! the bottom and top.

use std::fmt::Write as _;
use std::sync::Arc;

use log::info;
use thiserror::Error;

use crate::biot::{
    run_transient, Algorithm, BiotError, BiotMaterial, InitialCondition, LoadTime, ProblemData, Source, Trajectory,
};
use crate::mesh::{refine_uniform, unit_square_mesh, Mesh, SQUARE_BOTTOM, SQUARE_LEFT, SQUARE_RIGHT, SQUARE_TOP};

pub const YOUNG_MODULUS: f64 = 1000.0;
pub const STORAGE: f64 = 1.0;
pub const BIOT_ALPHA: f64 = 1.0;
pub const FINAL_TIME: f64 = 0.001;
/// Divisions per side of the coarsest mesh: 2·17² = 578 triangles.
pub const BASE_DIVISIONS: usize = 17;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("errors must be positive to define an order, got {0} and {1}")]
    NonPositiveError(f64, f64),
    #[error("a convergence study needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("final time {t_final} is not a whole number of steps of {dt}")]
    StepMismatch { t_final: f64, dt: f64 },
    #[error(transparent)]
    Biot(#[from] BiotError),
}

/// Exact fields and first derivatives at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFields {
    pub u: [f64; 2],
    pub p: f64,
    pub xi: f64,
    /// `grad_u[c][j] = ∂_j u_c`
    pub grad_u: [[f64; 2]; 2],
    pub grad_p: [f64; 2],
    pub grad_xi: [f64; 2],
}

/// Closed-form solution; ξ depends on α and λ.
pub fn exact_fields(x: f64, y: f64, t: f64, mat: &BiotMaterial) -> ExactFields {
    let e = (-t).exp();
    let (a, l) = (mat.alpha(), mat.lambda());
    let (s, c) = ((x + y).sin(), (x + y).cos());
    ExactFields {
        u: [x.sin() * e, y.sin() * e],
        p: s * e,
        xi: (a * s - l * (x.cos() + y.cos())) * e,
        grad_u: [[x.cos() * e, 0.0], [0.0, y.cos() * e]],
        grad_p: [c * e, c * e],
        grad_xi: [(a * c + l * x.sin()) * e, (a * c + l * y.sin()) * e],
    }
}

/// Material of the manufactured problem for a given Poisson ratio and
/// hydraulic conductivity.
pub fn manufactured_material(nu: f64, k: f64) -> Result<BiotMaterial, BiotError> {
    BiotMaterial::with_conductivity(YOUNG_MODULUS, nu, BIOT_ALPHA, STORAGE, k)
}

pub fn body_force(x: f64, y: f64, t: f64, mat: &BiotMaterial) -> [f64; 2] {
    let e = (-t).exp();
    let lm = mat.lambda() + 2.0 * mat.mu();
    let g = mat.alpha() * (x + y).cos() * e;
    [lm * e * x.sin() + g, lm * e * y.sin() + g]
}

pub fn fluid_source(x: f64, y: f64, t: f64, mat: &BiotMaterial) -> f64 {
    let e = (-t).exp();
    (-mat.c0() + 2.0 * mat.conductivity()) * (x + y).sin() * e - mat.alpha() * (x.cos() + y.cos()) * e
}

/// `σ(u)n − αpn` for the exact solution.
pub fn traction(x: f64, y: f64, t: f64, n: [f64; 2], mat: &BiotMaterial) -> [f64; 2] {
    let e = (-t).exp();
    let two_mu = 2.0 * mat.mu();
    let iso = mat.lambda() * (x.cos() + y.cos()) * e - mat.alpha() * (x + y).sin() * e;
    [two_mu * e * x.cos() * n[0] + iso * n[0], two_mu * e * y.cos() * n[1] + iso * n[1]]
}

/// `K∇p·n` for the exact solution.
pub fn normal_flux(x: f64, y: f64, t: f64, n: [f64; 2], mat: &BiotMaterial) -> f64 {
    mat.conductivity() * (x + y).cos() * (-t).exp() * (n[0] + n[1])
}

pub fn manufactured_data(mat: &BiotMaterial) -> ProblemData {
    let m = *mat;
    let mut data = ProblemData {
        body_force: Some(Arc::new(move |x, y, t| body_force(x, y, t, &m))),
        source: Some(Source { value: Arc::new(move |x, y, t| fluid_source(x, y, t, &m)), region: None }),
        ..ProblemData::default()
    };
    for tag in [SQUARE_RIGHT, SQUARE_LEFT] {
        data.dirichlet_u.push((tag, Arc::new(move |x, y, t| exact_fields(x, y, t, &m).u)));
        data.dirichlet_p.push((tag, Arc::new(move |x, y, t| exact_fields(x, y, t, &m).p)));
    }
    for tag in [SQUARE_BOTTOM, SQUARE_TOP] {
        data.traction.push((tag, Arc::new(move |x, y, t, n| traction(x, y, t, n, &m))));
        data.flux.push((tag, Arc::new(move |x, y, t, n| normal_flux(x, y, t, n, &m))));
    }
    data
}

/// `log₂(e_coarse / e_fine)`.
pub fn compute_order(e_coarse: f64, e_fine: f64) -> Result<f64, VerifyError> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(VerifyError::NonPositiveError(e_coarse, e_fine));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Initial data of the manufactured runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialData {
    /// u⁰ and p⁰ interpolated from the exact solution.
    #[default]
    Exact,
    /// u⁰ = 0, p⁰ interpolated.
    ZeroDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub algorithm: Algorithm,
    pub nu: f64,
    pub k: f64,
    pub dt: f64,
    pub levels: usize,
    pub t_final: f64,
    pub base_divisions: usize,
    pub initial: InitialData,
    pub load_time: LoadTime,
}

impl StudyConfig {
    pub fn new(algorithm: Algorithm, nu: f64, k: f64, dt: f64, levels: usize) -> Self {
        Self {
            algorithm,
            nu,
            k,
            dt,
            levels,
            t_final: FINAL_TIME,
            base_divisions: BASE_DIVISIONS,
            initial: InitialData::Exact,
            load_time: LoadTime::Next,
        }
    }
}

/// Runs the manufactured problem on one mesh to `t_final`.
pub fn run_manufactured(
    mesh: Arc<Mesh>,
    mat: &BiotMaterial,
    algorithm: Algorithm,
    dt: f64,
    t_final: f64,
    initial: InitialData,
    load_time: LoadTime,
) -> Result<Trajectory, BiotError> {
    let mut data = manufactured_data(mat);
    data.load_time = load_time;
    let m = *mat;
    let p: crate::biot::ScalarFn = Arc::new(move |x, y, t| exact_fields(x, y, t, &m).p);
    let init = match initial {
        InitialData::Exact => {
            InitialCondition::Interpolate { u: Arc::new(move |x, y, t| exact_fields(x, y, t, &m).u), p }
        }
        InitialData::ZeroDisplacement => InitialCondition::ZeroDisplacement { p },
    };
    run_transient(mesh, mat, &data, dt, t_final, algorithm, init, 0)
}

/// Errors of one refinement level at the final time. H¹ columns are full H¹
/// norms; the seminorms are kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub elements: usize,
    pub h1_u: f64,
    pub l2_xi: f64,
    pub h1_xi: f64,
    pub l2_p: f64,
    pub h1_p: f64,
    /// `|·|₁` of the u, ξ and p errors.
    pub semi: [f64; 3],
}

impl LevelErrors {
    pub fn columns(&self) -> [f64; 5] {
        [self.h1_u, self.l2_xi, self.h1_xi, self.l2_p, self.h1_p]
    }
}

pub const COLUMN_NAMES: [&str; 5] = ["h1_u", "l2_xi", "h1_xi", "l2_p", "h1_p"];

/// Errors of the final state of a manufactured run.
pub fn final_errors(traj: &Trajectory, mat: &BiotMaterial) -> LevelErrors {
    let s = &traj.final_state;
    let m = *mat;
    let eu = s.u.vector_error_norms(|x, y, t| exact_fields(x, y, t, &m).u, |x, y, t| exact_fields(x, y, t, &m).grad_u, s.t);
    let exi =
        s.xi.scalar_error_norms(|x, y, t| exact_fields(x, y, t, &m).xi, |x, y, t| exact_fields(x, y, t, &m).grad_xi, s.t);
    let ep = s.p.scalar_error_norms(|x, y, t| exact_fields(x, y, t, &m).p, |x, y, t| exact_fields(x, y, t, &m).grad_p, s.t);
    LevelErrors {
        elements: s.u.space().mesh().n_triangles(),
        h1_u: eu.h1(),
        l2_xi: exi.l2,
        h1_xi: exi.h1(),
        l2_p: ep.l2,
        h1_p: ep.h1(),
        semi: [eu.h1_semi, exi.h1_semi, ep.h1_semi],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<LevelErrors>,
}

pub const CSV_HEADER: &str =
    "elements,h1_u,ord_h1_u,l2_xi,ord_l2_xi,h1_xi,ord_h1_xi,l2_p,ord_l2_p,h1_p,ord_h1_p,semi_u,semi_xi,semi_p";

impl ConvergenceTable {
    /// Observed orders between level `i − 1` and `i`, in column order.
    pub fn orders(&self, i: usize) -> Result<[f64; 5], VerifyError> {
        let (a, b) = (self.rows[i - 1].columns(), self.rows[i].columns());
        let mut out = [0.0; 5];
        for c in 0..5 {
            out[c] = compute_order(a[c], b[c])?;
        }
        Ok(out)
    }

    /// Orders between the two finest levels.
    pub fn finest_orders(&self) -> Result<[f64; 5], VerifyError> {
        self.orders(self.rows.len() - 1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let orders = if i > 0 { self.orders(i).ok() } else { None };
            write!(s, "{}", row.elements).unwrap();
            for (c, e) in row.columns().iter().enumerate() {
                match orders {
                    Some(o) => write!(s, ",{e:.6e},{:.4}", o[c]).unwrap(),
                    None => write!(s, ",{e:.6e},").unwrap(),
                }
            }
            for e in row.semi {
                write!(s, ",{e:.6e}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// The structured mesh sequence: `levels` meshes starting from
/// `base_divisions`², each a uniform refinement of the previous.
pub fn mesh_sequence(base_divisions: usize, levels: usize) -> Vec<Arc<Mesh>> {
    let mut out = Vec::with_capacity(levels);
    let mut m = unit_square_mesh(base_divisions);
    for l in 0..levels {
        if l > 0 {
            m = refine_uniform(&m);
        }
        out.push(Arc::new(m.clone()));
    }
    out
}

pub fn convergence_study(cfg: &StudyConfig) -> Result<ConvergenceTable, VerifyError> {
    if cfg.levels < 2 {
        return Err(VerifyError::TooFewLevels(cfg.levels));
    }
    // errors are compared at T itself, so T must be reached exactly
    let steps = (cfg.t_final / cfg.dt).round();
    if !(steps >= 1.0 && (steps * cfg.dt - cfg.t_final).abs() <= 1e-9 * cfg.t_final) {
        return Err(VerifyError::StepMismatch { t_final: cfg.t_final, dt: cfg.dt });
    }
    let mat = manufactured_material(cfg.nu, cfg.k)?;
    let mut rows = Vec::with_capacity(cfg.levels);
    for mesh in mesh_sequence(cfg.base_divisions, cfg.levels) {
        let traj = run_manufactured(mesh, &mat, cfg.algorithm, cfg.dt, cfg.t_final, cfg.initial, cfg.load_time)?;
        let row = final_errors(&traj, &mat);
        info!("{} elements: {row:?}", row.elements);
        rows.push(row);
    }
    Ok(ConvergenceTable { rows })
}

//! Small one-step problems shared by the oracle comparisons.

use std::sync::Arc;

use biot::biot::{
    BiotMaterial, CoupledStepper, DecoupledStepper, ProblemData, Robin, Source, Spaces, TransientState,
};
use biot::fem::{interpolate_scalar, interpolate_vector};
use biot::mesh::{unit_square_mesh, Mesh, SQUARE_BOTTOM, SQUARE_LEFT, SQUARE_RIGHT, SQUARE_TOP};
use super::{distorted_square, Oracle, Params};

/// Low-degree data so both assemblies integrate it exactly.
fn data(with_dirichlet_p: bool, region: Option<u32>) -> ProblemData {
    let mut d = ProblemData {
        body_force: Some(Arc::new(|x, y, t| [1.0 + x * y + t, x * x - y])),
        source: Some(Source { value: Arc::new(|x, y, _| 1.0 + x + y * y), region }),
        ..ProblemData::default()
    };
    d.traction.push((SQUARE_BOTTOM, Arc::new(|x, _, t, n| [t + x + n[1], x * x])));
    d.flux.push((SQUARE_TOP, Arc::new(|x, _, t, _| 1.0 + x + t)));
    d.robin.push(Robin { tag: SQUARE_RIGHT, c_b: 2.0, p_far: 3.0 });
    d.dirichlet_u.push((SQUARE_LEFT, Arc::new(|x, y, t| [y * y, x * y + t])));
    if with_dirichlet_p {
        d.dirichlet_p.push((SQUARE_LEFT, Arc::new(|_, y, t| 1.0 + y + t)));
    }
    d
}

fn p0(x: f64, y: f64, _: f64) -> f64 {
    (2.0 * x).sin() + y * y + 0.3
}

fn xi0(x: f64, y: f64, _: f64) -> f64 {
    (x * y).cos() - 0.7 * x
}

pub struct Case {
    pub mesh: Mesh,
    pub e: f64,
    pub nu: f64,
    pub alpha: f64,
    pub c0: f64,
    pub k: f64,
    pub dt: f64,
    pub data: ProblemData,
}

pub fn cases() -> Vec<Case> {
    let mut out = Vec::new();
    for (mesh, region) in [
        (unit_square_mesh(1), None),
        (unit_square_mesh(2), None),
        (distorted_square(), Some(1)),
    ] {
        for (nu, k, dirichlet_p) in [(0.3, 1.0, true), (0.499, 1e-2, false), (0.25, 1e-6, true)] {
            out.push(Case {
                mesh: mesh.clone(),
                e: 1000.0,
                nu,
                alpha: 0.8,
                c0: 0.5,
                k,
                dt: 0.05,
                data: data(dirichlet_p, region),
            });
        }
    }
    out
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest per-DOF discrepancy between a library state and oracle
/// `[u | ξ | p]`, relative to the larger of the oracle DOF and its field's max
/// norm (DOFs small by cancellation, as ξ at ν near 1/2, are not held to a
/// tighter bound). Returns the value and where it occurs.
pub fn discrepancy(spaces: &Spaces, oracle: &Oracle, s: &TransientState, x: &[f64]) -> (f64, String) {
    let (nu, nv) = (oracle.nu(), oracle.nv);
    assert_eq!(s.u.values().len(), nu);
    let mut worst = (0.0, String::new());
    let mut see = |got: f64, want: f64, scale: f64, at: String| {
        let r = (got - want).abs() / want.abs().max(scale);
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, at);
        }
    };
    let scale = inf_norm(&x[..nu]);
    for (d, &v) in s.u.values().iter().enumerate() {
        let node = oracle.node_at(spaces.u.node_coords(d / 2));
        see(v, x[2 * node + d % 2], scale, format!("u dof {d}"));
    }
    for (name, f, off) in [("xi", &s.xi, nu), ("p", &s.p, nu + nv)] {
        let scale = inf_norm(&x[off..off + nv]);
        for (d, &v) in f.values().iter().enumerate() {
            let vert = oracle.node_at(spaces.p.node_coords(d));
            see(v, x[off + vert], scale, format!("{name} dof {d}"));
        }
    }
    worst
}

pub fn initial(spaces: &Spaces, oracle: &Oracle, t0: f64) -> (TransientState, Vec<f64>, Vec<f64>) {
    let state = TransientState {
        t: t0,
        u: interpolate_vector(&spaces.u, |x, y, _| [x, -y], t0),
        xi: interpolate_scalar(&spaces.xi, xi0, t0),
        p: interpolate_scalar(&spaces.p, p0, t0),
    };
    let verts = &oracle.nodes[..oracle.nv];
    let xi = verts.iter().map(|v| xi0(v[0], v[1], t0)).collect();
    let p = verts.iter().map(|v| p0(v[0], v[1], t0)).collect();
    (state, xi, p)
}

/// One step of `coupled` or decoupled on case `c`, against the oracle.
pub fn step_discrepancy(c: &Case, coupled: bool) -> (f64, String) {
    let oracle = Oracle::new(&c.mesh);
    let spaces = Spaces::new(Arc::new(c.mesh.clone()));
    let mat = BiotMaterial::with_conductivity(c.e, c.nu, c.alpha, c.c0, c.k).unwrap();
    let par = Params::from_e_nu(c.e, c.nu, c.alpha, c.c0, c.k, c.dt);
    let t0 = 0.2;
    let (state, xi, p) = initial(&spaces, &oracle, t0);
    let (want, got) = if coupled {
        let got = CoupledStepper::new(&spaces, &mat, c.dt, &c.data).unwrap().step(&state).unwrap();
        (oracle.coupled_step(&par, &c.data, &xi, &p, t0), got)
    } else {
        let got = DecoupledStepper::new(&spaces, &mat, c.dt, &c.data).unwrap().step(&state).unwrap();
        (oracle.decoupled_step(&par, &c.data, &xi, &p, t0), got)
    };
    assert!((got.t - (t0 + c.dt)).abs() < 1e-15);
    discrepancy(&spaces, &oracle, &got, &want)
}

use std::sync::Arc;

use super::data::ProblemData;
use super::BiotError;
use crate::fem::{
    edge_p2_values, gauss_legendre, quadrature_rule, AffineMap, FeSpace, Family, NORM_QUADRATURE_DEGREE,
};
use crate::mesh::Mesh;
use crate::solver::{SparseMatrix, TripletList};

/// Degree of the rule for the bilinear forms; every integrand is at most quadratic.
const BILINEAR_DEGREE: usize = 2;
/// Gauss points per boundary edge for load integrals.
const EDGE_POINTS: usize = 5;

/// Taylor–Hood spaces on one mesh: P2 displacement, P1 total pressure and P1
/// fluid pressure.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub mesh: Arc<Mesh>,
    pub u: Arc<FeSpace>,
    pub xi: Arc<FeSpace>,
    pub p: Arc<FeSpace>,
}

impl Spaces {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let u = Arc::new(FeSpace::new(mesh.clone(), Family::P2Vector));
        let scalar = Arc::new(FeSpace::new(mesh.clone(), Family::P1));
        Self { mesh, u, xi: scalar.clone(), p: scalar }
    }

    pub fn n_u(&self) -> usize {
        self.u.n_dofs()
    }

    pub fn n_scalar(&self) -> usize {
        self.p.n_dofs()
    }

    pub fn n_total(&self) -> usize {
        self.n_u() + 2 * self.n_scalar()
    }

    pub fn xi_offset(&self) -> usize {
        self.n_u()
    }

    pub fn p_offset(&self) -> usize {
        self.n_u() + self.n_scalar()
    }
}

/// Material-independent discrete operators.
#[derive(Debug, Clone)]
pub struct Operators {
    /// `(ε(u), ε(v))` on the displacement space.
    pub strain: SparseMatrix,
    /// `B[i, j] = (div v_j, φ_i)`, scalar rows by displacement columns.
    pub div: SparseMatrix,
    /// P1 mass matrix.
    pub mass: SparseMatrix,
    /// P1 stiffness matrix `(∇p, ∇ψ)`.
    pub stiffness: SparseMatrix,
    /// Conductance-weighted boundary mass `Σ c_b ⟨p, ψ⟩` over the Robin tags.
    pub robin: SparseMatrix,
}

impl Operators {
    pub fn assemble(spaces: &Spaces, data: &ProblemData) -> Result<Self, BiotError> {
        let mesh = &spaces.mesh;
        let rule = quadrature_rule(BILINEAR_DEGREE)?;
        let (nu, ns) = (spaces.n_u(), spaces.n_scalar());
        let nt = mesh.n_triangles();
        let mut strain = TripletList::with_capacity(nu, nu, nt * 144);
        let mut div = TripletList::with_capacity(ns, nu, nt * 36);
        let mut mass = TripletList::with_capacity(ns, ns, nt * 9);
        let mut stiffness = TripletList::with_capacity(ns, ns, nt * 9);

        for t in 0..nt {
            let map = AffineMap::new(mesh.triangle_coords(t));
            let det = map.jacobian_det();
            let ud = spaces.u.element_dofs(t);
            let sd = spaces.p.element_dofs(t);
            let mut ke = [[0.0; 12]; 12];
            let mut be = [[0.0; 12]; 3];
            let mut me = [[0.0; 3]; 3];
            for (r, &w) in rule.reference_points().zip(&rule.weights) {
                let wd = w * det;
                let g = map.p2_grads(r);
                let psi = AffineMap::p1_values(r);
                for i in 0..6 {
                    for j in 0..6 {
                        let dot = g[i][0] * g[j][0] + g[i][1] * g[j][1];
                        for a in 0..2 {
                            for b in 0..2 {
                                let delta = if a == b { dot } else { 0.0 };
                                ke[2 * i + a][2 * j + b] += wd * 0.5 * (delta + g[i][b] * g[j][a]);
                            }
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..6 {
                        for a in 0..2 {
                            be[i][2 * j + a] += wd * psi[i] * g[j][a];
                        }
                    }
                    for j in 0..3 {
                        me[i][j] += wd * psi[i] * psi[j];
                    }
                }
            }
            let gp = map.p1_grads();
            let area = map.area();
            for i in 0..12 {
                for j in 0..12 {
                    strain.push(ud[i], ud[j], ke[i][j]);
                }
            }
            for i in 0..3 {
                for j in 0..12 {
                    div.push(sd[i], ud[j], be[i][j]);
                }
                for j in 0..3 {
                    mass.push(sd[i], sd[j], me[i][j]);
                    stiffness.push(sd[i], sd[j], area * (gp[i][0] * gp[j][0] + gp[i][1] * gp[j][1]));
                }
            }
        }

        let mut robin = TripletList::new(ns, ns);
        for r in &data.robin {
            for be in mesh.boundary_edges().iter().filter(|b| b.tag == r.tag) {
                let [a, b] = be.vertices;
                let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                let (d, o) = (r.c_b * len / 3.0, r.c_b * len / 6.0);
                robin.push(a, a, d);
                robin.push(b, b, d);
                robin.push(a, b, o);
                robin.push(b, a, o);
            }
        }

        Ok(Self {
            strain: strain.build()?.with_symmetric_flag(true),
            div: div.build()?,
            mass: mass.build()?.with_symmetric_flag(true),
            stiffness: stiffness.build()?.with_symmetric_flag(true),
            robin: robin.build()?.with_symmetric_flag(true),
        })
    }
}

/// Quadrature geometry cached for repeated load-vector assembly.
#[derive(Debug, Clone)]
pub(crate) struct LoadAssembler {
    spaces: Spaces,
    nq: usize,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    p1_ref: Vec<[f64; 3]>,
    p2_ref: Vec<[f64; 6]>,
    edge_s: Vec<f64>,
    edge_w: Vec<f64>,
}

/// Load vectors of the displacement and pressure equations.
#[derive(Debug, Clone)]
pub(crate) struct Loads {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl LoadAssembler {
    pub fn new(spaces: &Spaces) -> Self {
        let rule = quadrature_rule(NORM_QUADRATURE_DEGREE).expect("supported degree");
        let refs: Vec<[f64; 2]> = rule.reference_points().collect();
        let mesh = &spaces.mesh;
        let mut points = Vec::with_capacity(mesh.n_triangles() * refs.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for t in 0..mesh.n_triangles() {
            let map = AffineMap::new(mesh.triangle_coords(t));
            for (r, w) in refs.iter().zip(&rule.weights) {
                points.push(map.map(*r));
                weights.push(w * map.jacobian_det());
            }
        }
        let (edge_s, edge_w) = gauss_legendre(EDGE_POINTS);
        Self {
            spaces: spaces.clone(),
            nq: refs.len(),
            points,
            weights,
            p1_ref: refs.iter().map(|&r| AffineMap::p1_values(r)).collect(),
            p2_ref: refs.iter().map(|&r| AffineMap::p2_values(r)).collect(),
            edge_s,
            edge_w,
        }
    }

    /// Body force, traction, source, flux and Robin far-field loads at time `t`.
    pub fn loads(&self, data: &ProblemData, t: f64) -> Loads {
        let sp = &self.spaces;
        let mesh = &sp.mesh;
        let mut lu = vec![0.0; sp.n_u()];
        let mut lp = vec![0.0; sp.n_scalar()];

        if data.body_force.is_some() || data.source.is_some() {
            for tri in 0..mesh.n_triangles() {
                let ud = sp.u.element_dofs(tri);
                let pd = sp.p.element_dofs(tri);
                let in_source_region = data
                    .source
                    .as_ref()
                    .map(|s| s.region.is_none_or(|r| mesh.regions()[tri] == r))
                    .unwrap_or(false);
                for q in 0..self.nq {
                    let k = tri * self.nq + q;
                    let [x, y] = self.points[k];
                    let w = self.weights[k];
                    if let Some(f) = &data.body_force {
                        let fv = f(x, y, t);
                        for (i, n) in self.p2_ref[q].iter().enumerate() {
                            lu[ud[2 * i]] += w * fv[0] * n;
                            lu[ud[2 * i + 1]] += w * fv[1] * n;
                        }
                    }
                    if in_source_region {
                        let qs = (data.source.as_ref().unwrap().value)(x, y, t);
                        for (i, n) in self.p1_ref[q].iter().enumerate() {
                            lp[pd[i]] += w * qs * n;
                        }
                    }
                }
            }
        }

        let nv = mesh.n_vertices();
        for (i, be) in mesh.boundary_edges().iter().enumerate() {
            let traction = data.traction.iter().filter(|(tag, _)| *tag == be.tag);
            let flux = data.flux.iter().filter(|(tag, _)| *tag == be.tag);
            let robin = data.robin.iter().filter(|r| r.tag == be.tag);
            let [a, b] = be.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            let normal = mesh.boundary_outward_normal(i);
            let nodes = [a, b, nv + mesh.boundary_edge_index(i)];
            for (_, h) in traction {
                for (s, w) in self.edge_s.iter().zip(&self.edge_w) {
                    let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                    let hv = h(x[0], x[1], t, normal);
                    for (node, n) in nodes.iter().zip(edge_p2_values(*s)) {
                        lu[2 * node] += w * len * hv[0] * n;
                        lu[2 * node + 1] += w * len * hv[1] * n;
                    }
                }
            }
            for (_, g) in flux {
                for (s, w) in self.edge_s.iter().zip(&self.edge_w) {
                    let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                    let gv = g(x[0], x[1], t, normal);
                    lp[a] += w * len * gv * (1.0 - s);
                    lp[b] += w * len * gv * s;
                }
            }
            for r in robin {
                let v = 0.5 * r.c_b * r.p_far * len;
                lp[a] += v;
                lp[b] += v;
            }
        }
        Loads { u: lu, p: lp }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biot::data::{Robin, Source};
    use crate::mesh::{refine_uniform, unit_square_mesh, SQUARE_BOTTOM, SQUARE_RIGHT};

    fn spaces(n: usize) -> Spaces {
        Spaces::new(Arc::new(unit_square_mesh(n)))
    }

    #[test]
    fn strain_annihilates_rigid_motions() {
        let sp = spaces(3);
        let ops = Operators::assemble(&sp, &ProblemData::default()).unwrap();
        let norm = ops.strain.norm_inf();
        for field in [|_: f64, _: f64| [1.0, 0.0], |_: f64, _: f64| [0.3, -2.0], |x: f64, y: f64| [-y, x]] {
            let c: Vec<f64> = (0..sp.u.n_nodes()).flat_map(|n| {
                let [x, y] = sp.u.node_coords(n);
                field(x, y)
            }).collect();
            let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let r = ops.strain.mul_vec(&c);
            let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(rmax <= 1e-10 * norm * cmax, "{rmax}");
        }
    }

    #[test]
    fn operator_identities() {
        let sp = Spaces::new(Arc::new(refine_uniform(&unit_square_mesh(2))));
        let ops = Operators::assemble(&sp, &ProblemData::default()).unwrap();
        let ones = vec![1.0; sp.n_scalar()];
        // 1ᵀ M 1 = area, S 1 = 0
        let area: f64 = ops.mass.mul_vec(&ones).iter().sum();
        assert!((area - 1.0).abs() < 1e-14);
        assert!(ops.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-13));
        // Σ_i (div v, φ_i) = ∫ div v = ∮ v·n; for v = (x, 0) this is 1
        let v: Vec<f64> = (0..sp.u.n_nodes()).flat_map(|n| [sp.u.node_coords(n)[0], 0.0]).collect();
        let total: f64 = ops.div.mul_vec(&v).iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // (ε(v), ε(v)) for v = (x, 0) is ∫ 1 = 1
        let sv = ops.strain.mul_vec(&v);
        let e: f64 = sv.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((e - 1.0).abs() < 1e-13);
    }

    #[test]
    fn robin_mass_sums_to_weighted_length() {
        let sp = spaces(4);
        let mut data = ProblemData::default();
        data.robin.push(Robin { tag: SQUARE_RIGHT, c_b: 2.5, p_far: 3.0 });
        let ops = Operators::assemble(&sp, &data).unwrap();
        let total: f64 = ops.robin.values().iter().sum();
        assert!((total - 2.5).abs() < 1e-14);
        let loads = LoadAssembler::new(&sp).loads(&data, 0.0);
        assert!((loads.p.iter().sum::<f64>() - 7.5).abs() < 1e-13);
    }

    #[test]
    fn region_source_integrates_to_region_area() {
        let sp = spaces(4);
        let mut data = ProblemData::default();
        data.source = Some(Source { value: Arc::new(|_, _, _| 0.7), region: Some(0) });
        let loads = LoadAssembler::new(&sp).loads(&data, 0.0);
        assert!((loads.p.iter().sum::<f64>() - 0.7).abs() < 1e-13);
        data.source = Some(Source { value: Arc::new(|_, _, _| 0.7), region: Some(1) });
        let loads = LoadAssembler::new(&sp).loads(&data, 0.0);
        assert!(loads.p.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn edge_loads_are_exact_for_polynomials() {
        let sp = spaces(3);
        let mut data = ProblemData::default();
        // ∫_bottom x² dx = 1/3 for either component and for the flux
        data.traction.push((SQUARE_BOTTOM, Arc::new(|x, _, _, n| [x * x * -n[1], 0.0])));
        data.flux.push((SQUARE_BOTTOM, Arc::new(|x, _, _, _| x * x)));
        let loads = LoadAssembler::new(&sp).loads(&data, 0.0);
        let ux: f64 = loads.u.iter().step_by(2).sum();
        assert!((ux - 1.0 / 3.0).abs() < 1e-14);
        assert!((loads.p.iter().sum::<f64>() - 1.0 / 3.0).abs() < 1e-14);
    }
}

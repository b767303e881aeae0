//! Shared fixtures for the integration tests: an independent dense
//! finite-element oracle and a few small meshes.
#![allow(dead_code)]

pub mod step_cases;
pub mod strong_form;

use std::collections::HashMap;

use biot::biot::ProblemData;
use biot::mesh::{unit_square_mesh, BoundaryEdge, Mesh};

/// Four-point Gauss–Legendre rule on [0, 1].
const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub mu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub c0: f64,
    pub k: f64,
    pub dt: f64,
}

impl Params {
    pub fn from_e_nu(e: f64, nu: f64, alpha: f64, c0: f64, k: f64, dt: f64) -> Self {
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        Self { mu, lambda, alpha, c0, k, dt }
    }

    fn storage(&self) -> f64 {
        self.c0 + self.alpha * self.alpha / self.lambda
    }
}

/// Row-major dense square matrix.
#[derive(Clone)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Replaces row `i` by the identity row.
    pub fn pin(&mut self, i: usize) {
        for j in 0..self.n {
            self.a[i * self.n + j] = 0.0;
        }
        self.a[i * self.n + i] = 1.0;
    }
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(m: &Dense, b: &[f64]) -> Vec<f64> {
    let n = m.n;
    let mut a = m.a.clone();
    let mut b = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs())).unwrap();
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let piv = a[k * n + k];
        assert!(piv != 0.0, "singular oracle matrix");
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    x
}

/// Dense Taylor–Hood assembly written directly from the weak form.
///
/// Unknowns are ordered `[u_x0, u_y0, u_x1, … | ξ | p]`; P2 nodes are the
/// mesh vertices followed by edge midpoints in order of first appearance.
pub struct Oracle {
    pub mesh: Mesh,
    pub nodes: Vec<[f64; 2]>,
    pub nv: usize,
    elems: Vec<[usize; 6]>,
    mid: HashMap<[usize; 2], usize>,
}

pub struct Blocks {
    pub strain: Dense,
    /// `div[v][2·node + c] = (∂_c φ_node, L_v)`, stored as an `nv × nu` row-major array.
    pub div: Vec<f64>,
    pub mass: Dense,
    pub stiff: Dense,
    pub robin: Dense,
}

pub struct Loads {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

fn key(a: usize, b: usize) -> [usize; 2] {
    [a.min(b), a.max(b)]
}

impl Oracle {
    pub fn new(mesh: &Mesh) -> Self {
        let mut nodes = mesh.vertices().to_vec();
        let nv = nodes.len();
        let mut mid = HashMap::new();
        let mut elems = Vec::new();
        for tri in mesh.triangles() {
            let mut e = [tri[0], tri[1], tri[2], 0, 0, 0];
            for (k, (a, b)) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])].into_iter().enumerate() {
                let id = *mid.entry(key(a, b)).or_insert_with(|| {
                    let (pa, pb) = (nodes[a], nodes[b]);
                    nodes.push([(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]);
                    nodes.len() - 1
                });
                e[3 + k] = id;
            }
            elems.push(e);
        }
        Self { mesh: mesh.clone(), nodes, nv, elems, mid }
    }

    pub fn nu(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn n_total(&self) -> usize {
        self.nu() + 2 * self.nv
    }

    /// Index of the P2 node at `x`.
    pub fn node_at(&self, x: [f64; 2]) -> usize {
        self.nodes
            .iter()
            .position(|n| (n[0] - x[0]).abs() < 1e-12 && (n[1] - x[1]).abs() < 1e-12)
            .unwrap_or_else(|| panic!("no oracle node at {x:?}"))
    }

    /// Quadrature points `(x, L, weight)` of triangle `t` from a collapsed
    /// tensor Gauss rule, exact to degree 6.
    fn quad(&self, t: usize) -> Vec<([f64; 2], [f64; 3], f64)> {
        let tri = self.mesh.triangles()[t];
        let v = tri.map(|i| self.nodes[i]);
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        let mut out = Vec::new();
        for &(a, wa) in &GL4 {
            for &(b, wb) in &GL4 {
                let (r, s) = (a, b * (1.0 - a));
                let l = [1.0 - r - s, r, s];
                let x = [
                    l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
                    l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
                ];
                out.push((x, l, wa * wb * (1.0 - a) * 2.0 * area));
            }
        }
        out
    }

    fn bary_grads(&self, t: usize) -> [[f64; 2]; 3] {
        let v = self.mesh.triangles()[t].map(|i| self.nodes[i]);
        let d = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        [
            [(v[1][1] - v[2][1]) / d, (v[2][0] - v[1][0]) / d],
            [(v[2][1] - v[0][1]) / d, (v[0][0] - v[2][0]) / d],
            [(v[0][1] - v[1][1]) / d, (v[1][0] - v[0][0]) / d],
        ]
    }

    fn p2(l: [f64; 3], g: [[f64; 2]; 3]) -> ([f64; 6], [[f64; 2]; 6]) {
        let mut val = [0.0; 6];
        let mut grad = [[0.0; 2]; 6];
        for i in 0..3 {
            val[i] = l[i] * (2.0 * l[i] - 1.0);
            grad[i] = [(4.0 * l[i] - 1.0) * g[i][0], (4.0 * l[i] - 1.0) * g[i][1]];
        }
        for (k, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
            val[3 + k] = 4.0 * l[a] * l[b];
            grad[3 + k] = [4.0 * (l[a] * g[b][0] + l[b] * g[a][0]), 4.0 * (l[a] * g[b][1] + l[b] * g[a][1])];
        }
        (val, grad)
    }

    /// Boundary edges as `(a, b, midpoint, outward normal, length, tag)`.
    fn boundary(&self) -> Vec<(usize, usize, usize, [f64; 2], f64, u32)> {
        let mut out = Vec::new();
        for &BoundaryEdge { vertices: [a, b], tag } in self.mesh.boundary_edges() {
            let (pa, pb) = (self.nodes[a], self.nodes[b]);
            let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
            let mut n = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
            let tri = self
                .mesh
                .triangles()
                .iter()
                .find(|t| t.contains(&a) && t.contains(&b))
                .expect("boundary edge without a triangle");
            let c = self.nodes[*tri.iter().find(|&&v| v != a && v != b).unwrap()];
            if (c[0] - pa[0]) * n[0] + (c[1] - pa[1]) * n[1] > 0.0 {
                n = [-n[0], -n[1]];
            }
            out.push((a, b, self.mid[&key(a, b)], n, len, tag));
        }
        out
    }

    pub fn blocks(&self, data: &ProblemData) -> Blocks {
        let (nu, nv) = (self.nu(), self.nv);
        let mut strain = Dense::zeros(nu);
        let mut div = vec![0.0; nv * nu];
        let mut mass = Dense::zeros(nv);
        let mut stiff = Dense::zeros(nv);
        let mut robin = Dense::zeros(nv);
        for (t, e) in self.elems.iter().enumerate() {
            let g = self.bary_grads(t);
            for (_, l, w) in self.quad(t) {
                let (phi, dphi) = Self::p2(l, g);
                let _ = phi;
                for a in 0..6 {
                    for ca in 0..2 {
                        let ea = sym(ca, dphi[a]);
                        for b in 0..6 {
                            for cb in 0..2 {
                                let eb = sym(cb, dphi[b]);
                                let c: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| ea[i][j] * eb[i][j]).sum();
                                *strain.at(2 * e[a] + ca, 2 * e[b] + cb) += w * c;
                            }
                        }
                        for v in 0..3 {
                            div[e[v] * nu + 2 * e[a] + ca] += w * dphi[a][ca] * l[v];
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        *mass.at(e[i], e[j]) += w * l[i] * l[j];
                        *stiff.at(e[i], e[j]) += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    }
                }
            }
        }
        for (a, b, _, _, len, tag) in self.boundary() {
            for r in data.robin.iter().filter(|r| r.tag == tag) {
                for &(s, ws) in &GL4 {
                    let psi = [1.0 - s, s];
                    let idx = [a, b];
                    for i in 0..2 {
                        for j in 0..2 {
                            *robin.at(idx[i], idx[j]) += r.c_b * ws * len * psi[i] * psi[j];
                        }
                    }
                }
            }
        }
        Blocks { strain, div, mass, stiff, robin }
    }

    pub fn loads(&self, data: &ProblemData, t: f64) -> Loads {
        let mut fu = vec![0.0; self.nu()];
        let mut fp = vec![0.0; self.nv];
        for (k, e) in self.elems.iter().enumerate() {
            let g = self.bary_grads(k);
            let in_region = data
                .source
                .as_ref()
                .map(|s| s.region.map_or(true, |r| self.mesh.regions()[k] == r))
                .unwrap_or(false);
            for (x, l, w) in self.quad(k) {
                let (phi, _) = Self::p2(l, g);
                if let Some(f) = &data.body_force {
                    let fv = f(x[0], x[1], t);
                    for a in 0..6 {
                        for c in 0..2 {
                            fu[2 * e[a] + c] += w * fv[c] * phi[a];
                        }
                    }
                }
                if in_region {
                    let q = (data.source.as_ref().unwrap().value)(x[0], x[1], t);
                    for i in 0..3 {
                        fp[e[i]] += w * q * l[i];
                    }
                }
            }
        }
        for (a, b, m, n, len, tag) in self.boundary() {
            let (pa, pb) = (self.nodes[a], self.nodes[b]);
            for &(s, ws) in &GL4 {
                let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                let q2 = [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)];
                let q1 = [1.0 - s, s];
                let w = ws * len;
                for (tg, h) in &data.traction {
                    if *tg == tag {
                        let hv = h(x[0], x[1], t, n);
                        for (node, v) in [a, b, m].into_iter().zip(q2) {
                            for c in 0..2 {
                                fu[2 * node + c] += w * hv[c] * v;
                            }
                        }
                    }
                }
                for (tg, g2) in &data.flux {
                    if *tg == tag {
                        let gv = g2(x[0], x[1], t, n);
                        fp[a] += w * gv * q1[0];
                        fp[b] += w * gv * q1[1];
                    }
                }
                for r in data.robin.iter().filter(|r| r.tag == tag) {
                    fp[a] += w * r.c_b * r.p_far * q1[0];
                    fp[b] += w * r.c_b * r.p_far * q1[1];
                }
            }
        }
        Loads { u: fu, p: fp }
    }

    /// Prescribed displacement entries `(index, value)` in oracle numbering.
    pub fn dirichlet_u(&self, data: &ProblemData, t: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (tag, g) in &data.dirichlet_u {
            for (a, b, m, _, _, tg) in self.boundary() {
                if tg == *tag {
                    for node in [a, b, m] {
                        let x = self.nodes[node];
                        let v = g(x[0], x[1], t);
                        out.push((2 * node, v[0]));
                        out.push((2 * node + 1, v[1]));
                    }
                }
            }
        }
        out
    }

    /// Prescribed pressure entries `(vertex, value)`.
    pub fn dirichlet_p(&self, data: &ProblemData, t: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (tag, g) in &data.dirichlet_p {
            for (a, b, _, _, _, tg) in self.boundary() {
                if tg == *tag {
                    for v in [a, b] {
                        let x = self.nodes[v];
                        out.push((v, g(x[0], x[1], t)));
                    }
                }
            }
        }
        out
    }

    /// One backward-Euler step of the monolithic scheme from `(ξⁿ, pⁿ)` at `t0`.
    /// Returns `[u | ξ | p]` at `t0 + Δt`.
    pub fn coupled_step(&self, par: &Params, data: &ProblemData, xi: &[f64], p: &[f64], t0: f64) -> Vec<f64> {
        let (nu, nv) = (self.nu(), self.nv);
        let (ox, op) = (nu, nu + nv);
        let t1 = t0 + par.dt;
        let bl = self.blocks(data);
        let ld = self.loads(data, t1);
        let mut a = Dense::zeros(self.n_total());
        for i in 0..nu {
            for j in 0..nu {
                *a.at(i, j) = 2.0 * par.mu * bl.strain.get(i, j);
            }
        }
        for v in 0..nv {
            for j in 0..nu {
                let d = bl.div[v * nu + j];
                *a.at(j, ox + v) = -d;
                *a.at(ox + v, j) = -d;
            }
            for w in 0..nv {
                let m = bl.mass.get(v, w);
                *a.at(ox + v, ox + w) = -m / par.lambda;
                *a.at(ox + v, op + w) = par.alpha * m / par.lambda;
                *a.at(op + v, ox + w) = -par.alpha * m / (par.lambda * par.dt);
                *a.at(op + v, op + w) =
                    par.storage() * m / par.dt + par.k * bl.stiff.get(v, w) + bl.robin.get(v, w);
            }
        }
        let mut rhs = vec![0.0; self.n_total()];
        rhs[..nu].copy_from_slice(&ld.u);
        let mp = bl.mass.mul(p);
        let mx = bl.mass.mul(xi);
        for v in 0..nv {
            rhs[op + v] = ld.p[v] + par.storage() / par.dt * mp[v] - par.alpha / (par.lambda * par.dt) * mx[v];
        }
        for (i, g) in self.dirichlet_u(data, t1) {
            a.pin(i);
            rhs[i] = g;
        }
        for (v, g) in self.dirichlet_p(data, t1) {
            a.pin(op + v);
            rhs[op + v] = g;
        }
        dense_solve(&a, &rhs)
    }

    /// One step of the splitting scheme: Stokes with `pⁿ`, then diffusion.
    pub fn decoupled_step(&self, par: &Params, data: &ProblemData, xi: &[f64], p: &[f64], t0: f64) -> Vec<f64> {
        let (nu, nv) = (self.nu(), self.nv);
        let t1 = t0 + par.dt;
        let bl = self.blocks(data);
        let ld = self.loads(data, t1);
        let mut s = Dense::zeros(nu + nv);
        for i in 0..nu {
            for j in 0..nu {
                *s.at(i, j) = 2.0 * par.mu * bl.strain.get(i, j);
            }
        }
        for v in 0..nv {
            for j in 0..nu {
                let d = bl.div[v * nu + j];
                *s.at(j, nu + v) = -d;
                *s.at(nu + v, j) = -d;
            }
            for w in 0..nv {
                *s.at(nu + v, nu + w) = -bl.mass.get(v, w) / par.lambda;
            }
        }
        let mut rs = vec![0.0; nu + nv];
        rs[..nu].copy_from_slice(&ld.u);
        let mp = bl.mass.mul(p);
        for v in 0..nv {
            rs[nu + v] = -par.alpha / par.lambda * mp[v];
        }
        for (i, g) in self.dirichlet_u(data, t1) {
            s.pin(i);
            rs[i] = g;
        }
        let uxi = dense_solve(&s, &rs);
        let xi_next = &uxi[nu..];

        let mut d = Dense::zeros(nv);
        for v in 0..nv {
            for w in 0..nv {
                *d.at(v, w) =
                    par.storage() * bl.mass.get(v, w) / par.dt + par.k * bl.stiff.get(v, w) + bl.robin.get(v, w);
            }
        }
        let dxi: Vec<f64> = xi_next.iter().zip(xi).map(|(a, b)| a - b).collect();
        let mdxi = bl.mass.mul(&dxi);
        let mut rd: Vec<f64> = (0..nv)
            .map(|v| ld.p[v] + par.storage() / par.dt * mp[v] + par.alpha / (par.lambda * par.dt) * mdxi[v])
            .collect();
        for (v, g) in self.dirichlet_p(data, t1) {
            d.pin(v);
            rd[v] = g;
        }
        let p_next = dense_solve(&d, &rd);
        let mut out = uxi;
        out.extend(p_next);
        out
    }
}

/// Symmetric gradient of `φ e_c`.
fn sym(c: usize, g: [f64; 2]) -> [[f64; 2]; 2] {
    let mut e = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let a = if i == c { g[j] } else { 0.0 };
            let b = if j == c { g[i] } else { 0.0 };
            e[i][j] = 0.5 * (a + b);
        }
    }
    e
}

/// `unit_square_mesh(2)` with the centre vertex moved and alternating regions.
pub fn distorted_square() -> Mesh {
    let base = unit_square_mesh(2);
    let mut vertices = base.vertices().to_vec();
    for v in &mut vertices {
        if (v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12 {
            *v = [0.56, 0.43];
        }
    }
    let regions = (0..base.n_triangles()).map(|t| (t % 2) as u32).collect();
    Mesh::new(vertices, base.triangles().to_vec(), regions, base.boundary_edges().to_vec()).unwrap()
}

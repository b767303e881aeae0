use std::collections::BTreeMap;
use std::sync::Arc;

use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Continuous piecewise-linear scalar field.
    P1,
    /// Continuous piecewise-quadratic field with two components.
    P2Vector,
}

impl Family {
    pub fn components(self) -> usize {
        match self {
            Family::P1 => 1,
            Family::P2Vector => 2,
        }
    }

    pub fn local_nodes(self) -> usize {
        match self {
            Family::P1 => 3,
            Family::P2Vector => 6,
        }
    }

    pub fn local_dofs(self) -> usize {
        self.local_nodes() * self.components()
    }
}

/// Lagrange space over a mesh.
///
/// Nodes are numbered vertices first (mesh order), then edge midpoints in the
/// mesh's sorted edge order. Vector components are interleaved per node:
/// DOF `2·node + component`.
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    family: Family,
    dof_map: Vec<usize>,
    n_dofs: usize,
    boundary_dofs: BTreeMap<u32, Vec<(usize, usize)>>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, family: Family) -> Self {
        let nv = mesh.n_vertices();
        let nc = family.components();
        let n_nodes = match family {
            Family::P1 => nv,
            Family::P2Vector => nv + mesh.n_edges(),
        };
        let mut dof_map = Vec::with_capacity(mesh.n_triangles() * family.local_dofs());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let mut nodes = [0usize; 6];
            nodes[..3].copy_from_slice(tri);
            if family == Family::P2Vector {
                for (k, e) in mesh.triangle_edges(t).into_iter().enumerate() {
                    nodes[3 + k] = nv + e;
                }
            }
            for &node in &nodes[..family.local_nodes()] {
                for c in 0..nc {
                    dof_map.push(nc * node + c);
                }
            }
        }

        let mut boundary_nodes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, be) in mesh.boundary_edges().iter().enumerate() {
            let nodes = boundary_nodes.entry(be.tag).or_default();
            nodes.extend_from_slice(&be.vertices);
            if family == Family::P2Vector {
                nodes.push(nv + mesh.boundary_edge_index(i));
            }
        }
        let boundary_dofs = boundary_nodes
            .into_iter()
            .map(|(tag, mut nodes)| {
                nodes.sort_unstable();
                nodes.dedup();
                let dofs = nodes
                    .into_iter()
                    .flat_map(|n| (0..nc).map(move |c| (nc * n + c, c)))
                    .collect();
                (tag, dofs)
            })
            .collect();

        Self { mesh, family, dof_map, n_dofs: nc * n_nodes, boundary_dofs }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_nodes(&self) -> usize {
        self.n_dofs / self.family.components()
    }

    /// Global DOFs of triangle `t` in local basis order.
    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.family.local_dofs();
        &self.dof_map[t * n..(t + 1) * n]
    }

    /// `(global DOF, component)` pairs on boundary edges carrying `tag`;
    /// empty when the tag does not occur.
    pub fn boundary_dofs(&self, tag: u32) -> &[(usize, usize)] {
        self.boundary_dofs.get(&tag).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let nv = self.mesh.n_vertices();
        if node < nv {
            self.mesh.vertices()[node]
        } else {
            let [a, b] = self.mesh.edges()[node - nv];
            let (pa, pb) = (self.mesh.vertices()[a], self.mesh.vertices()[b]);
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
        }
    }

    pub fn dof_coords(&self, dof: usize) -> [f64; 2] {
        self.node_coords(dof / self.family.components())
    }
}

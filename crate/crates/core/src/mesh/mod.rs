//! Conforming 2D triangle meshes with region tags on elements and integer
//! tags on boundary edges.
//!
//! A [`Mesh`] is validated once at construction and immutable afterwards.
//! Edge topology (sorted vertex pairs, element-to-edge and edge-to-element
//! maps) is computed eagerly since every finite-element space built on the
//! mesh needs it.

mod generate;
mod io;

pub use generate::{refine_uniform, synthetic_brain_mesh, unit_square_mesh};
pub use io::{load_mesh, read_mesh, write_mesh, write_mesh_to};

use thiserror::Error;

/// Region tag of ordinary tissue.
pub const REGION_NORMAL: u32 = 0;
/// Region tag of the injured subdomain.
pub const REGION_INJURED: u32 = 1;

/// Boundary tags of the unit square: x = 1, y = 0, x = 0, y = 1.
pub const SQUARE_RIGHT: u32 = 1;
pub const SQUARE_BOTTOM: u32 = 2;
pub const SQUARE_LEFT: u32 = 3;
pub const SQUARE_TOP: u32 = 4;

/// Outer (skull side) wall of the brain domain.
pub const BRAIN_OUTER: u32 = 1;
/// Ventricle wall.
pub const BRAIN_VENTRICLE: u32 = 2;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{entity} {id} references vertex {index}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        entity: &'static str,
        id: usize,
        index: usize,
        count: usize,
    },
    #[error("triangle {triangle} has non-positive signed area {area:e} (must be counterclockwise)")]
    NonPositiveArea { triangle: usize, area: f64 },
    #[error("triangle {triangle} repeats a vertex")]
    DegenerateTriangle { triangle: usize },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("boundary edge {id} ({v1}, {v2}) is not on the boundary of the triangulation")]
    NotABoundaryEdge { id: usize, v1: usize, v2: usize },
    #[error("boundary edge {id} ({v1}, {v2}) is listed more than once")]
    DuplicateBoundaryEdge { id: usize, v1: usize, v2: usize },
    #[error("boundary edge ({0}, {1}) carries no tag")]
    UntaggedBoundaryEdge(usize, usize),
    #[error("mesh has no triangles")]
    Empty,
    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: u32,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<u32>,
    boundary_edges: Vec<BoundaryEdge>,
    // derived topology
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<[Option<usize>; 2]>,
    boundary_edge_ids: Vec<usize>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.regions == other.regions
            && self.boundary_edges == other.boundary_edges
    }
}

fn sorted_pair(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds a mesh and checks every structural invariant: indices in range,
    /// counterclockwise triangles, manifold edges, and a one-to-one match
    /// between tagged boundary edges and the topological boundary.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<u32>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        if regions.len() != triangles.len() {
            return Err(MeshError::InvalidParameter(format!(
                "{} region tags for {} triangles",
                regions.len(),
                triangles.len()
            )));
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        entity: "triangle",
                        id: t,
                        index: v,
                        count: nv,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(MeshError::NonPositiveArea { triangle: t, area });
            }
        }
        for (id, be) in boundary_edges.iter().enumerate() {
            for &v in &be.vertices {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        entity: "boundary edge",
                        id,
                        index: v,
                        count: nv,
                    });
                }
            }
        }

        let mut keyed: Vec<([usize; 2], usize, usize)> = Vec::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                keyed.push((sorted_pair(tri[k], tri[(k + 1) % 3]), t, k));
            }
        }
        keyed.sort_unstable();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_triangles: Vec<[Option<usize>; 2]> = Vec::new();
        let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
        for (key, t, k) in keyed {
            if edges.last() != Some(&key) {
                edges.push(key);
                edge_triangles.push([Some(t), None]);
            } else {
                let slot = edge_triangles.last_mut().unwrap();
                if slot[1].is_some() {
                    return Err(MeshError::NonManifoldEdge(key[0], key[1]));
                }
                slot[1] = Some(t);
            }
            triangle_edges[t][k] = edges.len() - 1;
        }

        let mut tagged = vec![false; edges.len()];
        let mut boundary_edge_ids = Vec::with_capacity(boundary_edges.len());
        for (id, be) in boundary_edges.iter().enumerate() {
            let key = sorted_pair(be.vertices[0], be.vertices[1]);
            let e = match edges.binary_search(&key) {
                Ok(e) if edge_triangles[e][1].is_none() => e,
                _ => {
                    return Err(MeshError::NotABoundaryEdge {
                        id,
                        v1: be.vertices[0],
                        v2: be.vertices[1],
                    })
                }
            };
            if tagged[e] {
                return Err(MeshError::DuplicateBoundaryEdge {
                    id,
                    v1: be.vertices[0],
                    v2: be.vertices[1],
                });
            }
            tagged[e] = true;
            boundary_edge_ids.push(e);
        }
        for (e, adj) in edge_triangles.iter().enumerate() {
            if adj[1].is_none() && !tagged[e] {
                return Err(MeshError::UntaggedBoundaryEdge(edges[e][0], edges[e][1]));
            }
        }

        Ok(Self {
            vertices,
            triangles,
            regions,
            boundary_edges,
            edges,
            triangle_edges,
            edge_triangles,
            boundary_edge_ids,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn regions(&self) -> &[u32] {
        &self.regions
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unique edges as sorted vertex pairs, in lexicographic order.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Global edge index of local edge `k` (between local vertices `k` and `k+1`).
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// The one or two triangles sharing edge `e`.
    pub fn edge_triangles(&self, e: usize) -> [Option<usize>; 2] {
        self.edge_triangles[e]
    }

    /// Global edge index of the `i`-th tagged boundary edge.
    pub fn boundary_edge_index(&self, i: usize) -> usize {
        self.boundary_edge_ids[i]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&sorted_pair(a, b)).ok()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn has_boundary_tag(&self, tag: u32) -> bool {
        self.boundary_edges.iter().any(|be| be.tag == tag)
    }

    pub fn boundary_length(&self, tag: u32) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|be| be.tag == tag)
            .map(|be| {
                let a = self.vertices[be.vertices[0]];
                let b = self.vertices[be.vertices[1]];
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }

    /// Unit normal of boundary edge `i` pointing out of the domain.
    pub fn boundary_outward_normal(&self, i: usize) -> [f64; 2] {
        let be = &self.boundary_edges[i];
        let a = self.vertices[be.vertices[0]];
        let b = self.vertices[be.vertices[1]];
        let t = self.edge_triangles[self.boundary_edge_ids[i]][0].unwrap();
        let tri = self.triangles[t];
        let opposite = *tri
            .iter()
            .find(|&&v| v != be.vertices[0] && v != be.vertices[1])
            .unwrap();
        let c = self.vertices[opposite];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        let mut n = [dy / len, -dx / len];
        // flip if pointing toward the interior vertex
        if n[0] * (c[0] - a[0]) + n[1] * (c[1] - a[1]) > 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }

    /// Triangles sharing an edge with `t`.
    pub fn neighbors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.triangle_edges[t].into_iter().filter_map(move |e| {
            let [a, b] = self.edge_triangles[e];
            if a == Some(t) {
                b
            } else {
                a
            }
        })
    }

    pub fn region_area(&self, region: u32) -> f64 {
        (0..self.n_triangles())
            .filter(|&t| self.regions[t] == region)
            .map(|t| self.triangle_area(t))
            .sum()
    }
}

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use super::{
    signed_area, BoundaryEdge, Mesh, MeshError, BRAIN_OUTER, BRAIN_VENTRICLE, REGION_INJURED,
    REGION_NORMAL, SQUARE_BOTTOM, SQUARE_LEFT, SQUARE_RIGHT, SQUARE_TOP,
};

/// Structured mesh of [0,1]² with `2n²` right triangles (diagonals running
/// from lower-left to upper-right).
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn unit_square_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "unit_square_mesh needs n >= 1");
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let h = n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / h, j as f64 / h]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut boundary = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary.push(BoundaryEdge { vertices: [id(i, 0), id(i + 1, 0)], tag: SQUARE_BOTTOM });
    }
    for j in 0..n {
        boundary.push(BoundaryEdge { vertices: [id(n, j), id(n, j + 1)], tag: SQUARE_RIGHT });
    }
    for i in (0..n).rev() {
        boundary.push(BoundaryEdge { vertices: [id(i + 1, n), id(i, n)], tag: SQUARE_TOP });
    }
    for j in (0..n).rev() {
        boundary.push(BoundaryEdge { vertices: [id(0, j + 1), id(0, j)], tag: SQUARE_LEFT });
    }
    let regions = vec![REGION_NORMAL; triangles.len()];
    Mesh::new(vertices, triangles, regions, boundary).expect("structured square mesh is valid")
}

/// Red refinement: every triangle is split into four similar children by
/// joining its edge midpoints. Midpoint vertex `n_vertices + e` belongs to
/// global edge `e`, so shared edges are never duplicated.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let nv = mesh.n_vertices();
    let mut vertices = mesh.vertices().to_vec();
    vertices.reserve(mesh.n_edges());
    for &[a, b] in mesh.edges() {
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    let mut regions = Vec::with_capacity(4 * mesh.n_triangles());
    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let [eab, ebc, eca] = mesh.triangle_edges(t);
        let (mab, mbc, mca) = (nv + eab, nv + ebc, nv + eca);
        triangles.extend_from_slice(&[[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mab, mbc, mca]]);
        regions.extend_from_slice(&[mesh.regions()[t]; 4]);
    }
    let mut boundary = Vec::with_capacity(2 * mesh.boundary_edges().len());
    for (i, be) in mesh.boundary_edges().iter().enumerate() {
        let m = nv + mesh.boundary_edge_index(i);
        let [v1, v2] = be.vertices;
        boundary.push(BoundaryEdge { vertices: [v1, m], tag: be.tag });
        boundary.push(BoundaryEdge { vertices: [m, v2], tag: be.tag });
    }
    Mesh::new(vertices, triangles, regions, boundary).expect("refinement of a valid mesh is valid")
}

/// Ramanujan's approximation of the perimeter of an ellipse with semi-axes `a`, `b`.
fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let h = ((a - b) / (a + b)).powi(2);
    PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()))
}

struct RingLayout {
    scales: Vec<f64>,
    counts: Vec<usize>,
}

impl RingLayout {
    fn new(a: f64, b: f64, inner_scale: f64, h: f64) -> Self {
        let thickness = (1.0 - inner_scale) * 0.5 * (a + b);
        let bands = ((thickness / (h * 0.5 * 3f64.sqrt())).round() as usize).max(1);
        let perimeter = ellipse_perimeter(a, b);
        let scales: Vec<f64> = (0..=bands)
            .map(|k| inner_scale + (1.0 - inner_scale) * k as f64 / bands as f64)
            .collect();
        let counts = scales
            .iter()
            .map(|s| ((s * perimeter / h).round() as usize).max(8))
            .collect();
        Self { scales, counts }
    }

    fn n_triangles(&self) -> usize {
        self.counts.windows(2).map(|w| w[0] + w[1]).sum()
    }
}

#[derive(PartialEq)]
struct Candidate {
    dist: f64,
    triangle: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // min-heap on distance, ties broken by index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.triangle.cmp(&self.triangle))
    }
}

/// Two-ellipse stand-in for a brain slice: outer ellipse with full axes
/// `outer_width × outer_height` (tag [`BRAIN_OUTER`]) around a concentric
/// elliptic cavity scaled by `ventricle_scale` (tag [`BRAIN_VENTRICLE`]).
///
/// The annulus is filled ring by ring; each ring carries a node count
/// proportional to its perimeter so elements stay quasi-uniform. A compact,
/// edge-connected patch touching the ventricle wall is tagged
/// [`REGION_INJURED`] and holds `round(injured_fraction · n_triangles)` elements.
pub fn synthetic_brain_mesh(
    outer_width: f64,
    outer_height: f64,
    ventricle_scale: f64,
    injured_fraction: f64,
    target_elements: usize,
) -> Result<Mesh, MeshError> {
    if !(outer_width > 0.0 && outer_height > 0.0) {
        return Err(MeshError::InvalidParameter("outer axes must be positive".into()));
    }
    if !(ventricle_scale > 0.0 && ventricle_scale < 1.0) {
        return Err(MeshError::InvalidParameter(format!(
            "ventricle_scale {ventricle_scale} must lie in (0, 1); the cavity would reach the outer wall"
        )));
    }
    if !(injured_fraction > 0.0 && injured_fraction < 0.5) {
        return Err(MeshError::InvalidParameter(format!(
            "injured_fraction {injured_fraction} must lie in (0, 0.5)"
        )));
    }
    if target_elements < 32 {
        return Err(MeshError::InvalidParameter("target_elements must be at least 32".into()));
    }
    let (a, b) = (0.5 * outer_width, 0.5 * outer_height);
    let area = PI * a * b * (1.0 - ventricle_scale * ventricle_scale);

    // size an equilateral-ish element so the count lands near the target
    let mut h = (area / (target_elements as f64 * 0.25 * 3f64.sqrt())).sqrt();
    let mut layout = RingLayout::new(a, b, ventricle_scale, h);
    for _ in 0..20 {
        let ratio = layout.n_triangles() as f64 / target_elements as f64;
        if (ratio - 1.0).abs() < 0.01 {
            break;
        }
        h *= ratio.sqrt();
        layout = RingLayout::new(a, b, ventricle_scale, h);
    }

    let mut vertices = Vec::new();
    let mut ring_start = Vec::with_capacity(layout.scales.len());
    for (&s, &m) in layout.scales.iter().zip(&layout.counts) {
        ring_start.push(vertices.len());
        for i in 0..m {
            let theta = 2.0 * PI * i as f64 / m as f64;
            vertices.push([s * a * theta.cos(), s * b * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(layout.n_triangles());
    for k in 0..layout.scales.len() - 1 {
        let (ma, mb) = (layout.counts[k], layout.counts[k + 1]);
        let (sa, sb) = (ring_start[k], ring_start[k + 1]);
        let inner = |i: usize| sa + i % ma;
        let outer = |j: usize| sb + j % mb;
        let (mut i, mut j) = (0usize, 0usize);
        while i < ma || j < mb {
            let next_inner = (i + 1) as f64 / ma as f64;
            let next_outer = (j + 1) as f64 / mb as f64;
            let tri = if i < ma && (j == mb || next_inner <= next_outer) {
                i += 1;
                [inner(i - 1), outer(j), inner(i)]
            } else {
                j += 1;
                [inner(i), outer(j - 1), outer(j)]
            };
            let [p, q, r] = tri.map(|v| vertices[v]);
            if signed_area(p, q, r) > 0.0 {
                triangles.push(tri);
            } else {
                triangles.push([tri[0], tri[2], tri[1]]);
            }
        }
    }

    let mut boundary = Vec::new();
    let last = layout.scales.len() - 1;
    let (m0, s0) = (layout.counts[0], ring_start[0]);
    for i in 0..m0 {
        boundary.push(BoundaryEdge {
            vertices: [s0 + (i + 1) % m0, s0 + i],
            tag: BRAIN_VENTRICLE,
        });
    }
    let (mo, so) = (layout.counts[last], ring_start[last]);
    for i in 0..mo {
        boundary.push(BoundaryEdge {
            vertices: [so + i, so + (i + 1) % mo],
            tag: BRAIN_OUTER,
        });
    }

    let n_tri = triangles.len();
    let mesh = Mesh::new(vertices, triangles, vec![REGION_NORMAL; n_tri], boundary)?;

    // grow the injured patch from the ventricle wall at 45 degrees
    let seed_angle = 0.25 * PI;
    let seed_point = [
        ventricle_scale * a * seed_angle.cos(),
        ventricle_scale * b * seed_angle.sin(),
    ];
    let centroid = |t: usize| {
        let [p, q, r] = mesh.triangle_coords(t);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    };
    let dist = |t: usize| {
        let c = centroid(t);
        (c[0] - seed_point[0]).hypot(c[1] - seed_point[1])
    };
    let seed = (0..n_tri)
        .filter(|&t| mesh.triangles()[t].iter().filter(|&&v| v < s0 + m0).count() == 2)
        .min_by(|&x, &y| dist(x).total_cmp(&dist(y)))
        .ok_or_else(|| MeshError::InvalidParameter("no triangle touches the ventricle".into()))?;
    let n_injured = ((injured_fraction * n_tri as f64).round() as usize).max(1);
    let mut regions = vec![REGION_NORMAL; n_tri];
    let mut queued = vec![false; n_tri];
    let mut heap = BinaryHeap::new();
    heap.push(Candidate { dist: dist(seed), triangle: seed });
    queued[seed] = true;
    let mut taken = 0;
    while let Some(Candidate { triangle, .. }) = heap.pop() {
        regions[triangle] = REGION_INJURED;
        taken += 1;
        if taken == n_injured {
            break;
        }
        for nb in mesh.neighbors(triangle) {
            if !queued[nb] {
                queued[nb] = true;
                heap.push(Candidate { dist: dist(nb), triangle: nb });
            }
        }
    }

    Mesh::new(
        mesh.vertices().to_vec(),
        mesh.triangles().to_vec(),
        regions,
        mesh.boundary_edges().to_vec(),
    )
}

//! Affine triangle geometry and the P1/P2 Lagrange shape functions.
//!
//! Local P2 node order: the three vertices, then the midpoints of local edges
//! (0,1), (1,2), (2,0).

/// Affine map from the reference triangle onto a physical triangle.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    origin: [f64; 2],
    jac: [[f64; 2]; 2],
    det: f64,
    /// Physical gradients of the barycentric coordinates λ₀, λ₁, λ₂.
    bary_grads: [[f64; 2]; 3],
}

impl AffineMap {
    pub fn new(coords: [[f64; 2]; 3]) -> Self {
        let [p0, p1, p2] = coords;
        let jac = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        // rows of J^{-1} are the gradients of λ₁ and λ₂
        let g1 = [jac[1][1] / det, -jac[0][1] / det];
        let g2 = [-jac[1][0] / det, jac[0][0] / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        Self { origin: p0, jac, det, bary_grads: [g0, g1, g2] }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    /// |det J|, the scale factor for reference-triangle quadrature weights.
    pub fn jacobian_det(&self) -> f64 {
        self.det
    }

    pub fn map(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn bary_grads(&self) -> [[f64; 2]; 3] {
        self.bary_grads
    }

    /// Values of the three P1 shape functions at reference point `r`.
    pub fn p1_values(r: [f64; 2]) -> [f64; 3] {
        [1.0 - r[0] - r[1], r[0], r[1]]
    }

    /// Physical gradients of the P1 shape functions (constant per element).
    pub fn p1_grads(&self) -> [[f64; 2]; 3] {
        self.bary_grads
    }

    pub fn p2_values(r: [f64; 2]) -> [f64; 6] {
        let l = Self::p1_values(r);
        [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ]
    }

    pub fn p2_grads(&self, r: [f64; 2]) -> [[f64; 2]; 6] {
        let l = Self::p1_values(r);
        let g = self.bary_grads;
        let mut out = [[0.0; 2]; 6];
        for i in 0..3 {
            let s = 4.0 * l[i] - 1.0;
            out[i] = [s * g[i][0], s * g[i][1]];
        }
        for k in 0..3 {
            let (i, j) = (k, (k + 1) % 3);
            out[3 + k] = [
                4.0 * (l[j] * g[i][0] + l[i] * g[j][0]),
                4.0 * (l[j] * g[i][1] + l[i] * g[j][1]),
            ];
        }
        out
    }
}

/// Quadratic shape functions on an edge parametrized by `s ∈ [0, 1]`:
/// start vertex, end vertex, midpoint.
pub fn edge_p2_values(s: f64) -> [f64; 3] {
    [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)]
}

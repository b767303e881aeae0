use std::sync::Arc;

use super::element::AffineMap;
use super::quadrature::quadrature_rule;
use super::space::{FeSpace, Family};
use super::FemError;

/// Degree of the quadrature used for error norms and analytic load terms.
pub const NORM_QUADRATURE_DEGREE: usize = 6;

/// Discrete field: DOF values on a [`FeSpace`].
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    space: Arc<FeSpace>,
    values: Vec<f64>,
}

/// L² error and H¹ seminorm error of a discrete field against an analytic one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

impl ErrorNorms {
    /// Full H¹ norm of the error.
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

impl CoefficientVector {
    pub fn new(space: Arc<FeSpace>, values: Vec<f64>) -> Result<Self, FemError> {
        if values.len() != space.n_dofs() {
            return Err(FemError::LengthMismatch { expected: space.n_dofs(), found: values.len() });
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let n = space.n_dofs();
        Self { space, values: vec![0.0; n] }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn local(&self, t: usize) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (o, &d) in out.iter_mut().zip(self.space.element_dofs(t)) {
            *o = self.values[d];
        }
        out
    }

    /// Value and gradient of every component at reference point `r` of
    /// triangle `t`. Unused components are zero; `grad[c][j] = ∂_j field_c`.
    pub fn eval_local(&self, t: usize, map: &AffineMap, r: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let local = self.local(t);
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        match self.space.family() {
            Family::P1 => {
                let n = AffineMap::p1_values(r);
                let g = map.p1_grads();
                for i in 0..3 {
                    val[0] += local[i] * n[i];
                    grad[0][0] += local[i] * g[i][0];
                    grad[0][1] += local[i] * g[i][1];
                }
            }
            Family::P2Vector => {
                let n = AffineMap::p2_values(r);
                let g = map.p2_grads(r);
                for i in 0..6 {
                    for c in 0..2 {
                        let v = local[2 * i + c];
                        val[c] += v * n[i];
                        grad[c][0] += v * g[i][0];
                        grad[c][1] += v * g[i][1];
                    }
                }
            }
        }
        (val, grad)
    }

    /// Nodal value(s) at the given node index.
    pub fn node_value(&self, node: usize) -> [f64; 2] {
        match self.space.family() {
            Family::P1 => [self.values[node], 0.0],
            Family::P2Vector => [self.values[2 * node], self.values[2 * node + 1]],
        }
    }

    /// Values at mesh vertices (the P2 edge DOFs are dropped).
    pub fn vertex_values(&self) -> Vec<[f64; 2]> {
        (0..self.space.mesh().n_vertices()).map(|v| self.node_value(v)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest Euclidean nodal magnitude.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.space.n_nodes())
            .map(|n| {
                let [a, b] = self.node_value(n);
                a.hypot(b)
            })
            .fold(0.0, f64::max)
    }

    fn error_norms_impl(
        &self,
        exact: &dyn Fn(f64, f64) -> [f64; 2],
        exact_grad: &dyn Fn(f64, f64) -> [[f64; 2]; 2],
    ) -> ErrorNorms {
        let rule = quadrature_rule(NORM_QUADRATURE_DEGREE).expect("supported degree");
        let nc = self.space.family().components();
        let mesh = self.space.mesh();
        let mut l2 = 0.0;
        let mut semi = 0.0;
        for t in 0..mesh.n_triangles() {
            let map = AffineMap::new(mesh.triangle_coords(t));
            let scale = map.jacobian_det();
            for (r, w) in rule.reference_points().zip(&rule.weights) {
                let [x, y] = map.map(r);
                let (vh, gh) = self.eval_local(t, &map, r);
                let v = exact(x, y);
                let g = exact_grad(x, y);
                for c in 0..nc {
                    l2 += w * scale * (vh[c] - v[c]).powi(2);
                    semi += w * scale * ((gh[c][0] - g[c][0]).powi(2) + (gh[c][1] - g[c][1]).powi(2));
                }
            }
        }
        ErrorNorms { l2: l2.sqrt(), h1_semi: semi.sqrt() }
    }

    /// Errors of a P1 field against `exact(x, y, t)` with gradient `exact_grad`.
    pub fn scalar_error_norms(
        &self,
        exact: impl Fn(f64, f64, f64) -> f64,
        exact_grad: impl Fn(f64, f64, f64) -> [f64; 2],
        t: f64,
    ) -> ErrorNorms {
        assert_eq!(self.space.family(), Family::P1);
        self.error_norms_impl(&|x, y| [exact(x, y, t), 0.0], &|x, y| [exact_grad(x, y, t), [0.0; 2]])
    }

    /// Errors of a vector field; `exact_grad[c][j] = ∂_j u_c`.
    pub fn vector_error_norms(
        &self,
        exact: impl Fn(f64, f64, f64) -> [f64; 2],
        exact_grad: impl Fn(f64, f64, f64) -> [[f64; 2]; 2],
        t: f64,
    ) -> ErrorNorms {
        assert_eq!(self.space.family(), Family::P2Vector);
        self.error_norms_impl(&|x, y| exact(x, y, t), &|x, y| exact_grad(x, y, t))
    }

    /// L² norm of the difference of two fields on the same space.
    pub fn l2_distance(&self, other: &CoefficientVector) -> f64 {
        assert!(Arc::ptr_eq(&self.space, &other.space) || self.space.n_dofs() == other.space.n_dofs());
        let diff = CoefficientVector {
            space: self.space.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        };
        diff.error_norms_impl(&|_, _| [0.0; 2], &|_, _| [[0.0; 2]; 2]).l2
    }
}

/// Nodal interpolant of a scalar function on a P1 space.
pub fn interpolate_scalar(space: &Arc<FeSpace>, f: impl Fn(f64, f64, f64) -> f64, t: f64) -> CoefficientVector {
    assert_eq!(space.family(), Family::P1);
    let values = (0..space.n_nodes())
        .map(|n| {
            let [x, y] = space.node_coords(n);
            f(x, y, t)
        })
        .collect();
    CoefficientVector { space: space.clone(), values }
}

/// Nodal interpolant (vertices and edge midpoints) of a vector function on a
/// P2 space.
pub fn interpolate_vector(
    space: &Arc<FeSpace>,
    f: impl Fn(f64, f64, f64) -> [f64; 2],
    t: f64,
) -> CoefficientVector {
    assert_eq!(space.family(), Family::P2Vector);
    let mut values = Vec::with_capacity(space.n_dofs());
    for n in 0..space.n_nodes() {
        let [x, y] = space.node_coords(n);
        values.extend_from_slice(&f(x, y, t));
    }
    CoefficientVector { space: space.clone(), values }
}

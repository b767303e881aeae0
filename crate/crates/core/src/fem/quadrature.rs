//! Symmetric quadrature on the reference triangle {x ≥ 0, y ≥ 0, x + y ≤ 1}
//! and Gauss–Legendre rules on [0, 1] for edge integrals.

use std::f64::consts::PI;

use super::FemError;

/// A rule given in barycentric coordinates; weights sum to the reference
/// area 1/2.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Reference-triangle coordinates `(x, y) = (λ₁, λ₂)` of each point.
    pub fn reference_points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.points.iter().map(|b| [b[1], b[2]])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

struct Builder {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl Builder {
    fn new() -> Self {
        Self { points: Vec::new(), weights: Vec::new() }
    }

    // weights below are normalized to a unit-area triangle
    fn centroid(mut self, w: f64) -> Self {
        self.points.push([1.0 / 3.0; 3]);
        self.weights.push(0.5 * w);
        self
    }

    fn orbit3(mut self, a: f64, w: f64) -> Self {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a, b], [a, b, a], [b, a, a]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
        self
    }

    fn orbit6(mut self, a: f64, b: f64, w: f64) -> Self {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
        self
    }

    fn build(self, degree: usize) -> QuadratureRule {
        QuadratureRule { points: self.points, weights: self.weights, degree }
    }
}

/// Smallest built-in rule exact for polynomials of total degree `degree`.
///
/// Degrees 3 and 4 share the 6-point rule; degree 5 is Radon's 7-point
/// rule; degree 6 is the 12-point rule of Dunavant.
pub fn quadrature_rule(degree: usize) -> Result<QuadratureRule, FemError> {
    let rule = match degree {
        1 => Builder::new().centroid(1.0).build(1),
        2 => Builder::new().orbit3(1.0 / 6.0, 1.0 / 3.0).build(2),
        3 | 4 => Builder::new()
            .orbit3(0.445_948_490_915_964_886_318_329_253_883, 0.223_381_589_678_011_465_695_007_008_433)
            .orbit3(0.091_576_213_509_770_743_459_571_463_402_2, 0.109_951_743_655_321_867_638_326_324_900)
            .build(4),
        5 => {
            let r15 = 15f64.sqrt();
            Builder::new()
                .centroid(9.0 / 40.0)
                .orbit3((6.0 - r15) / 21.0, (155.0 - r15) / 1200.0)
                .orbit3((6.0 + r15) / 21.0, (155.0 + r15) / 1200.0)
                .build(5)
        }
        6 => Builder::new()
            .orbit3(0.249_286_745_170_910_421_291_638_553_107, 0.116_786_275_726_379_366_030_690_420_265)
            .orbit3(0.063_089_014_491_502_228_340_331_602_870_8, 0.050_844_906_370_206_816_920_936_809_106_9)
            .orbit6(
                0.053_145_049_844_816_947_353_249_671_631_4,
                0.310_352_451_033_784_405_416_607_733_956,
                0.082_851_075_618_373_575_193_553_456_421_4,
            )
            .build(6),
        _ => return Err(FemError::UnsupportedDegree(degree)),
    };
    Ok(rule)
}

/// Gauss–Legendre points and weights mapped to [0, 1] (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = 0.5 * (1.0 - x);
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (points, weights)
}

//! Strong-form residuals of the manufactured solution, with every derivative
//! written out by hand rather than taken from the library.

use biot::verify::{body_force, exact_fields, fluid_source, manufactured_material, normal_flux, traction, YOUNG_MODULUS};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Residual over the size of the terms it balances (floored at 1).
fn scaled(terms: &[f64], residual: f64) -> f64 {
    residual.abs() / terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0)
}

/// Largest scaled residual over `samples` random points of [0,1]² × [0, t_max],
/// covering balance of momentum, the total-pressure relation, mass balance,
/// the boundary data and the exact derivatives. α = c0 = 1.
pub fn max_residual(nu: f64, k: f64, samples: usize, t_max: f64, seed: u64) -> f64 {
    let mat = manufactured_material(nu, k).unwrap();
    let lam = YOUNG_MODULUS * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = YOUNG_MODULUS / (2.0 * (1.0 + nu));
    let (alpha, c0) = (1.0, 1.0);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x, y, t): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen_range(0.0..=t_max));
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let n = [th.cos(), th.sin()];
        let e = (-t).exp();

        let u = [x.sin() * e, y.sin() * e];
        let du = [[x.cos() * e, 0.0], [0.0, y.cos() * e]];
        let div_u = (x.cos() + y.cos()) * e;
        let p = (x + y).sin() * e;
        let dp = [(x + y).cos() * e; 2];
        let lap_p = -2.0 * (x + y).sin() * e;
        let xi = alpha * p - lam * div_u;
        let dxi = [alpha * dp[0] + lam * x.sin() * e, alpha * dp[1] + lam * y.sin() * e];
        // −div(2μ ε(u)) per component
        let div_strain = [2.0 * mu * x.sin() * e, 2.0 * mu * y.sin() * e];

        let ex = exact_fields(x, y, t, &mat);
        let mut r = vec![
            scaled(&[u[0]], ex.u[0] - u[0]),
            scaled(&[u[1]], ex.u[1] - u[1]),
            scaled(&[p], ex.p - p),
            scaled(&[xi], ex.xi - xi),
            scaled(&[dp[0]], ex.grad_p[0] - dp[0]),
            scaled(&[dp[1]], ex.grad_p[1] - dp[1]),
            scaled(&[dxi[0]], ex.grad_xi[0] - dxi[0]),
            scaled(&[dxi[1]], ex.grad_xi[1] - dxi[1]),
        ];
        for c in 0..2 {
            for j in 0..2 {
                r.push(scaled(&[du[c][j]], ex.grad_u[c][j] - du[c][j]));
            }
        }

        let f = body_force(x, y, t, &mat);
        for c in 0..2 {
            r.push(scaled(&[div_strain[c], dxi[c], f[c]], div_strain[c] + dxi[c] - f[c]));
        }
        r.push(scaled(&[ex.xi, lam * div_u, alpha * p], ex.xi + lam * div_u - alpha * p));

        // time derivatives of p and ξ are −p and −ξ
        let store = -(c0 + alpha * alpha / lam) * p;
        let couple = (alpha / lam) * xi;
        let q = fluid_source(x, y, t, &mat);
        r.push(scaled(&[store, couple, k * lap_p, q], store + couple - k * lap_p - q));

        let g = traction(x, y, t, n, &mat);
        for c in 0..2 {
            let sn = 2.0 * mu * (du[c][0] * n[0] + du[c][1] * n[1]) / 2.0
                + 2.0 * mu * (du[0][c] * n[0] + du[1][c] * n[1]) / 2.0;
            r.push(scaled(&[sn, xi * n[c], g[c]], sn - xi * n[c] - g[c]));
        }
        let h = normal_flux(x, y, t, n, &mat);
        let kn = k * (dp[0] * n[0] + dp[1] * n[1]);
        r.push(scaled(&[kn, h], kn - h));

        worst = r.into_iter().fold(worst, f64::max);
    }
    worst
}

use super::BiotError;

/// Lamé constants `(λ, μ)` from Young's modulus and Poisson ratio.
pub fn lame_from_e_nu(e: f64, nu: f64) -> Result<(f64, f64), BiotError> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(BiotError::Domain(format!("Young's modulus must be positive, got {e}")));
    }
    if !(nu > 0.0 && nu < 0.5) {
        return Err(BiotError::Domain(format!("Poisson ratio must lie in (0, 0.5), got {nu}")));
    }
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    Ok((lambda, mu))
}

/// Poroelastic material. λ, μ and K are derived on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiotMaterial {
    e: f64,
    nu: f64,
    alpha: f64,
    c0: f64,
    kappa: f64,
    mu_f: f64,
    lambda: f64,
    mu: f64,
}

impl BiotMaterial {
    pub fn new(e: f64, nu: f64, alpha: f64, c0: f64, kappa: f64, mu_f: f64) -> Result<Self, BiotError> {
        let (lambda, mu) = lame_from_e_nu(e, nu)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(BiotError::Domain(format!("Biot-Willis constant must lie in (0, 1], got {alpha}")));
        }
        if !(c0 >= 0.0 && c0.is_finite()) {
            return Err(BiotError::Domain(format!("storage coefficient must be nonnegative, got {c0}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(BiotError::Domain(format!("permeability must be positive, got {kappa}")));
        }
        if !(mu_f > 0.0 && mu_f.is_finite()) {
            return Err(BiotError::Domain(format!("fluid viscosity must be positive, got {mu_f}")));
        }
        Ok(Self { e, nu, alpha, c0, kappa, mu_f, lambda, mu })
    }

    /// Material with hydraulic conductivity `k` given directly (unit viscosity).
    pub fn with_conductivity(e: f64, nu: f64, alpha: f64, c0: f64, k: f64) -> Result<Self, BiotError> {
        Self::new(e, nu, alpha, c0, k, 1.0)
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu_f(&self) -> f64 {
        self.mu_f
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Hydraulic conductivity κ/μ_f.
    pub fn conductivity(&self) -> f64 {
        self.kappa / self.mu_f
    }

    /// Storage coefficient of the pressure equation, c0 + α²/λ.
    pub fn storage(&self) -> f64 {
        self.c0 + self.alpha * self.alpha / self.lambda
    }

    pub fn with_e(&self, e: f64) -> Result<Self, BiotError> {
        Self::new(e, self.nu, self.alpha, self.c0, self.kappa, self.mu_f)
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self, BiotError> {
        Self::new(self.e, nu, self.alpha, self.c0, self.kappa, self.mu_f)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self, BiotError> {
        Self::new(self.e, self.nu, self.alpha, self.c0, kappa, self.mu_f)
    }
}

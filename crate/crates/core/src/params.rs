use crate::{Error, Result};

/// Constitutive constants of the perfect-gas MHD model.
///
/// Viscosity is `mu1 + mu2 * v^(-alpha)`, heat conductivity is
/// `kappa * theta^beta`, pressure is `r * theta / v` and internal energy
/// is `cv * theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub mu1: f64,
    pub mu2: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub beta: f64,
    pub lambda: f64,
    pub nu: f64,
    pub r: f64,
    pub cv: f64,
}

impl PhysicalParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu1: f64,
        mu2: f64,
        alpha: f64,
        kappa: f64,
        beta: f64,
        lambda: f64,
        nu: f64,
        r: f64,
        cv: f64,
    ) -> Result<Self> {
        let p = Self {
            mu1,
            mu2,
            alpha,
            kappa,
            beta,
            lambda,
            nu,
            r,
            cv,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit constants with `mu2 = alpha`, the preset under which the
    /// representation formula for `v` holds.
    pub fn normalized(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, alpha, alpha, 1.0, beta, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu1", self.mu1),
            ("kappa", self.kappa),
            ("lambda", self.lambda),
            ("nu", self.nu),
            ("r", self.r),
            ("cv", self.cv),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be > 0 (got {value})"
                )));
            }
        }
        let nonnegative = [
            ("mu2", self.mu2),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ];
        for (name, value) in nonnegative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be >= 0 (got {value})"
                )));
            }
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        self.mu1 == 1.0
            && self.kappa == 1.0
            && self.lambda == 1.0
            && self.nu == 1.0
            && self.r == 1.0
            && self.cv == 1.0
            && self.mu2 == self.alpha
    }

    /// Adiabatic exponent `1 + R / c_v`.
    #[inline]
    pub fn gamma(&self) -> f64 {
        1.0 + self.r / self.cv
    }

    // Unchecked kernels used inside the stepping loops; the checked
    // public versions live in `constitutive`.

    #[inline]
    pub(crate) fn mu(&self, v: f64) -> f64 {
        if self.mu2 == 0.0 {
            self.mu1
        } else {
            self.mu1 + self.mu2 * v.powf(-self.alpha)
        }
    }

    #[inline]
    pub(crate) fn kappa_of(&self, theta: f64) -> f64 {
        if self.beta == 0.0 {
            self.kappa
        } else {
            self.kappa * theta.powf(self.beta)
        }
    }

    #[inline]
    pub(crate) fn pressure_of(&self, v: f64, theta: f64) -> f64 {
        self.r * theta / v
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::normalized(0.0, 1.0).expect("default preset is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_preset_ties_mu2_to_alpha() {
        let p = PhysicalParams::normalized(1.5, 0.5).unwrap();
        assert_eq!(p.mu2, 1.5);
        assert!(p.is_normalized());
        let mut q = p;
        q.lambda = 2.0;
        assert!(!q.is_normalized());
    }

    #[test]
    fn rejects_invalid_constants() {
        assert!(PhysicalParams::normalized(0.0, -1.0).is_err());
        assert!(PhysicalParams::normalized(-0.1, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 0.0, 1.0, 1.0, 1.0, f64::NAN, 1.0, 1.0).is_err());
        // beta = 0 is admissible for the solver even though the global theory wants beta > 0
        assert!(PhysicalParams::normalized(0.0, 0.0).is_ok());
    }
}

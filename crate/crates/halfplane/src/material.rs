//! Isotropic elastic material described by its Lamé parameters.
//!
//! Unit density is assumed everywhere, so the P- and S-wave speeds are
//! c_p = sqrt(lambda + 2*mu) and c_s = sqrt(mu). The interesting regime is
//! lambda/mu >> 1 (almost incompressible), where the two speeds separate.

use thiserror::Error;

/// Lamé parameter pair (lambda, mu) with unit density.
///
/// `mu` must be strictly positive; `lambda` may be zero (the ratio
/// lambda/mu = 0 endpoint is a legitimate, fully soft limit) but not negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
}

/// Rejected Lamé parameters.
#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("mu must be finite and > 0, got {0}")]
    InvalidMu(f64),
    #[error("lambda must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
}

impl Material {
    /// Validates and builds a material.
    pub fn new(lambda: f64, mu: f64) -> Result<Self, MaterialError> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(MaterialError::InvalidMu(mu));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(MaterialError::InvalidLambda(lambda));
        }
        Ok(Self { lambda, mu })
    }

    /// Ratio lambda/mu, the single parameter the scaled dispersion relation
    /// depends on.
    pub fn lam_over_mu(self) -> f64 {
        self.lambda / self.mu
    }

    /// gamma^2 = lambda/(2*mu + lambda), the coefficient in the normal-stress
    /// boundary condition. Lies in [0, 1).
    pub fn gamma_sq(self) -> f64 {
        self.lambda / (2.0 * self.mu + self.lambda)
    }

    /// Squared P-wave speed lambda + 2*mu.
    pub fn cp_sq(self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    /// P-wave speed sqrt(lambda + 2*mu).
    pub fn cp(self) -> f64 {
        self.cp_sq().sqrt()
    }

    /// Squared S-wave speed mu.
    pub fn cs_sq(self) -> f64 {
        self.mu
    }

    /// S-wave speed sqrt(mu).
    pub fn cs(self) -> f64 {
        self.mu.sqrt()
    }
}

//! Numerical laboratory for elastic waves on the half-plane x >= 0 with a free
//! surface at x = 0, periodic in y, in the almost-incompressible regime
//! (shear modulus mu much smaller than lambda).
//!
//! The displacement (u, v) of a unit-density isotropic material obeys
//!
//! ```text
//! u_tt = mu*Lap(u) + (lambda+mu)*(u_x + v_y)_x
//! v_tt = mu*Lap(v) + (lambda+mu)*(u_x + v_y)_y
//! ```
//!
//! with the traction condition at x = 0
//!
//! ```text
//! u_x + gamma^2 * v_y = g1,    u_y + v_x = g2,    gamma^2 = lambda/(2*mu + lambda).
//! ```
//!
//! The crate is organised around the normal-mode picture of this problem:
//!
//! - [`material`]: the Lamé pair (lambda, mu), wave speeds, gamma^2.
//! - [`dispersion`]: the scaled boundary determinant phi(s_tilde), its real
//!   reduction psi(sigma), and the surface-wave root sigma* = xi0_tilde^2 that
//!   fixes the Rayleigh speed c_r = xi0_tilde*sqrt(mu).
//! - [`exact`]: closed-form solutions used as references: the traveling
//!   Rayleigh surface wave, the P/S reflection (mode conversion) ansatz, and
//!   plane body waves.
//! - [`boundary`]: the Laplace/Fourier boundary response (solve for the mode
//!   amplitudes given traction data), the boundary-estimate bound, small-omega
//!   asymptotics, and truncation-error perturbation predictions (theta, the
//!   eigenvalue shift, and the points-per-wavelength rule).
//! - [`solver`]: second- and fourth-order finite-difference schemes with an
//!   energy-based free-surface closure, leapfrog time stepping (with a
//!   modified-equation correction at fourth order), and run/measure plumbing.
//!
//! Conventions used throughout:
//!
//! - Laplace variable s with Re(s) > 0 for decay as t -> infinity is scaled as
//!   s_tilde = s/(|omega|*sqrt(mu)) where omega is the y-Fourier frequency.
//! - All complex square roots use the principal branch with argument in
//!   (-pi, pi], so Re(sqrt(.)) >= 0; see [`dispersion::branch_sqrt`].

pub mod boundary;
pub mod dispersion;
pub mod exact;
pub mod material;
pub mod solver;

pub use material::Material;

/// Complex scalar type used across the crate.
pub type C64 = num_complex::Complex64;

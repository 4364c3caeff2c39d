//! Concrete initial-boundary-value problems for the strip solvers.
//!
//! A [`Problem`] supplies everything the time integrator needs beyond the
//! grid: the material, a reference field used for initial data / far-edge
//! Dirichlet data / error measurement, and the traction data (g1, g2) at the
//! free surface x = 0. All reference fields here are closed-form solutions
//! from [`crate::exact`], so convergence studies measure pure discretization
//! error.

use crate::exact::{
    mode_conversion_forcing, rayleigh_field, s_wave_field, solve_reflection, ModeConversionSpec,
    PlaneWave, PlaneWaveKind, RayleighWaveSpec,
};
use crate::material::Material;

/// Data source for one strip computation.
pub trait Problem: Sync {
    fn material(&self) -> Material;

    /// Reference displacement (u, v) at (x, y, t). Supplies initial data at
    /// t = 0 and t = dt and, by default, the Dirichlet data at the far edge;
    /// also the comparison field for error norms when [`Problem::has_exact`].
    fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64);

    /// Traction data (g1, g2) of `u_x + gamma^2*v_y = g1`, `u_y + v_x = g2`
    /// at the surface point (0, y) at time t.
    fn boundary_g(&self, y: f64, t: f64) -> (f64, f64);

    /// Dirichlet data at the truncated far edge x = lx.
    fn dirichlet(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        self.exact(x, y, t)
    }

    /// Whether [`Problem::exact`] is the true solution of this problem (and
    /// not just an initial-data snapshot), i.e. whether error records mean
    /// anything.
    fn has_exact(&self) -> bool {
        true
    }
}

/// Surface wave of y-frequency omega: traction-free boundary, the field
/// decays into the interior, and the whole pattern translates along y at the
/// surface-wave speed.
pub struct RayleighProblem {
    spec: RayleighWaveSpec,
}

impl RayleighProblem {
    pub fn new(material: Material, omega: f64) -> Self {
        Self { spec: RayleighWaveSpec::new(material, omega) }
    }

    /// Time for one full period of the surface oscillation.
    pub fn period(&self) -> f64 {
        self.spec.period()
    }

    pub fn spec(&self) -> &RayleighWaveSpec {
        &self.spec
    }
}

impl Problem for RayleighProblem {
    fn material(&self) -> Material {
        self.spec.material
    }

    fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        rayleigh_field(&self.spec, x, y, t)
    }

    fn boundary_g(&self, _y: f64, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
}

/// Outgoing S wave produced when an incident P wave hits the free surface.
/// Only the short mode-converted wave is computed: the traction carried by
/// the incident + reflected P pair moves to the boundary data (g1, g2), so
/// the S wave alone satisfies the forced surface condition, and it supplies
/// the initial data, the far-edge Dirichlet data, and the error reference.
pub struct ModeConversionProblem {
    spec: ModeConversionSpec,
}

impl ModeConversionProblem {
    pub fn new(material: Material, phi_angle: f64) -> Result<Self, crate::exact::ReflectionError> {
        Ok(Self { spec: solve_reflection(&material, phi_angle)? })
    }

    pub fn spec(&self) -> &ModeConversionSpec {
        &self.spec
    }

    pub fn period(&self) -> f64 {
        self.spec.period()
    }
}

impl Problem for ModeConversionProblem {
    fn material(&self) -> Material {
        self.spec.material
    }

    fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        s_wave_field(&self.spec, x, y, t)
    }

    fn boundary_g(&self, y: f64, t: f64) -> (f64, f64) {
        mode_conversion_forcing(&self.spec, y, t)
    }
}

/// Single traveling plane wave on the strip with its exact traction fed in
/// as boundary data; exercises inhomogeneous (g1, g2) at both edges and has
/// no boundary layer, so it isolates the interior + closure accuracy.
pub struct PlaneWaveProblem {
    wave: PlaneWave,
}

impl PlaneWaveProblem {
    pub fn new(material: Material, kind: PlaneWaveKind, kx: f64, ky: f64, amplitude: f64) -> Self {
        Self { wave: PlaneWave { material, kind, kx, ky, amplitude } }
    }

    fn direction(&self) -> (f64, f64) {
        let norm = (self.wave.kx * self.wave.kx + self.wave.ky * self.wave.ky).sqrt();
        match self.wave.kind {
            PlaneWaveKind::P => (self.wave.kx / norm, self.wave.ky / norm),
            PlaneWaveKind::S => (-self.wave.ky / norm, self.wave.kx / norm),
        }
    }

    fn omega_t(&self) -> f64 {
        let norm = (self.wave.kx * self.wave.kx + self.wave.ky * self.wave.ky).sqrt();
        self.wave.speed() * norm
    }
}

impl Problem for PlaneWaveProblem {
    fn material(&self) -> Material {
        self.wave.material
    }

    fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        self.wave.field(x, y, t)
    }

    fn boundary_g(&self, y: f64, t: f64) -> (f64, f64) {
        // u = A*dx*sin(theta), v = A*dy*sin(theta) with
        // theta = kx*x + ky*y - w*t, so each derivative pulls out
        // A*cos(theta) times a wavenumber.
        let (dx, dy) = self.direction();
        let theta = self.wave.ky * y - self.omega_t() * t;
        let amp = self.wave.amplitude * theta.cos();
        let g1 = amp * (dx * self.wave.kx + self.wave.material.gamma_sq() * dy * self.wave.ky);
        let g2 = amp * (dx * self.wave.ky + dy * self.wave.kx);
        (g1, g2)
    }
}

/// Wraps a problem into its homogeneous twin: same initial snapshot, but
/// zero traction data and a clamped far edge. The discrete energy of this
/// configuration is an exact invariant of the time integrator, which makes
/// it the reference setup for conservation checks.
pub struct FrozenBoundary<P: Problem> {
    inner: P,
}

impl<P: Problem> FrozenBoundary<P> {
    pub fn new(inner: P) -> Self {
        Self { inner }
    }
}

impl<P: Problem> Problem for FrozenBoundary<P> {
    fn material(&self) -> Material {
        self.inner.material()
    }

    fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        self.inner.exact(x, y, t)
    }

    fn boundary_g(&self, _y: f64, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn dirichlet(&self, _x: f64, _y: f64, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn has_exact(&self) -> bool {
        false
    }
}

//! Closed-form reference solutions of the half-plane problem.
//!
//! Three families, all exact solutions of the elastic wave equation with unit
//! density, used to initialise runs, drive boundaries, and measure errors:
//!
//! - The traveling Rayleigh surface wave: a traction-free solution that
//!   decays exponentially in x and moves along the surface at
//!   c_r = xi0_tilde*sqrt(mu). The benchmark for surface-phase accuracy.
//! - The P-to-S mode-conversion ansatz: an incident P wave hitting the free
//!   surface at angle phi produces reflected P and S waves with coefficients
//!   (R_p, R_s) fixed by the traction condition. Splitting the ansatz lets a
//!   run solve for the short-wavelength S part alone, with the long P parts
//!   moved into boundary forcing.
//! - Plane body waves on a fully periodic domain, for pure interior
//!   convergence measurements.

use crate::dispersion::{self, RayleighMode};
use crate::material::Material;
use std::f64::consts::PI;
use thiserror::Error;

/// A concrete traveling surface wave: material, y-frequency, surface mode.
#[derive(Debug, Clone, Copy)]
pub struct RayleighWaveSpec {
    pub material: Material,
    /// y-frequency; the wave has wavelength 2*pi/omega in y. Positive.
    pub omega: f64,
    pub mode: RayleighMode,
}

impl RayleighWaveSpec {
    /// Builds the spec, finding the surface mode of the material.
    ///
    /// # Panics
    /// Panics if omega is not finite and positive.
    pub fn new(material: Material, omega: f64) -> Self {
        assert!(omega.is_finite() && omega > 0.0, "omega must be > 0, got {omega}");
        Self { material, omega, mode: dispersion::find_rayleigh_mode(&material) }
    }

    /// Time period T = 2*pi/(omega*c_r) of the traveling wave.
    pub fn period(&self) -> f64 {
        2.0 * PI / (self.omega * self.mode.c_r)
    }
}

/// Time period of the surface wave with y-frequency `omega`:
/// T = 2*pi/(omega*xi0_tilde*sqrt(mu)). For omega = 2*pi this is
/// 1/(xi0_tilde*sqrt(mu)), which grows like mu^(-1/2) in the almost
/// incompressible limit.
pub fn rayleigh_period(material: &Material, omega: f64) -> f64 {
    RayleighWaveSpec::new(*material, omega).period()
}

/// Displacement (u, v) of the traveling Rayleigh wave at (x, y, t).
///
/// With Theta = omega*(y + c_r*t), k1 = omega*kappa10_over_w and
/// k2 = omega*kappa20_over_w:
///
/// ```text
/// u = exp(-k1*x)*cos(Theta) + coeff*exp(-k2*x)*cos(Theta)
/// v = kappa10_over_w*exp(-k1*x)*sin(Theta) + coeff/kappa20_over_w*exp(-k2*x)*sin(Theta)
/// ```
///
/// where coeff = xi0_tilde^2/2 - 1. The traction at x = 0 vanishes
/// identically, so this is a solution of the homogeneous problem.
pub fn rayleigh_field(spec: &RayleighWaveSpec, x: f64, y: f64, t: f64) -> (f64, f64) {
    let m = &spec.mode;
    let w = spec.omega;
    let theta = w * (y + m.c_r * t);
    let (sin_t, cos_t) = theta.sin_cos();
    let e1 = (-w * m.kappa10_over_w * x).exp();
    let e2 = (-w * m.kappa20_over_w * x).exp();
    let u = e1 * cos_t + m.coeff * e2 * cos_t;
    let v = m.kappa10_over_w * e1 * sin_t + m.coeff / m.kappa20_over_w * e2 * sin_t;
    (u, v)
}

/// P- and S-wavelengths (L_p, L_s) = (2*pi*sqrt(lambda+2*mu)/xi, 2*pi*sqrt(mu)/xi)
/// of body waves with time frequency xi.
pub fn wavelengths(material: &Material, xi: f64) -> (f64, f64) {
    (2.0 * PI * material.cp() / xi, 2.0 * PI * material.cs() / xi)
}

/// Rejected mode-conversion setup.
#[derive(Debug, Error, PartialEq)]
pub enum ReflectionError {
    #[error("incidence angle must lie in [0, pi/2), got {0}")]
    InvalidAngle(f64),
}

/// Incident-P / reflected-P / reflected-S configuration at the free surface.
///
/// The incident P wave `(k, omega_y)*exp(i*(xi*t + k*x + omega_y*y))` with
/// k = cos(phi), omega_y = sin(phi) travels toward the surface; the reflected
/// P wave `R_p*(-k, omega_y)*exp(i*(xi*t - k*x + omega_y*y))` and the
/// reflected (mode-converted) S wave
/// `R_s/sqrt(alpha^2*k^2 + omega_y^2)*(-omega_y, -alpha*k)*exp(i*(xi*t - alpha*k*x + omega_y*y))`
/// leave it. The dispersion relations fix xi^2 = lambda + 2*mu and
/// alpha^2 = 1 + (lambda+mu)/(mu*k^2); the traction-free condition fixes
/// (R_p, R_s). Physical fields are the real parts.
#[derive(Debug, Clone, Copy)]
pub struct ModeConversionSpec {
    pub material: Material,
    /// Incidence angle in [0, pi/2) measured from the surface normal.
    pub phi_angle: f64,
    /// x-wavenumber of the P waves: k = cos(phi).
    pub k: f64,
    /// Common y-wavenumber: omega_y = sin(phi).
    pub omega_y: f64,
    /// Time frequency xi = sqrt(lambda + 2*mu).
    pub xi: f64,
    /// S-wave obliquity: the S x-wavenumber is alpha*k.
    pub alpha: f64,
    /// Reflected-P amplitude.
    pub r_p: f64,
    /// Reflected-S amplitude (the mode-converted part).
    pub r_s: f64,
}

impl ModeConversionSpec {
    /// Normaliser sqrt(alpha^2*k^2 + omega_y^2) of the S polarisation vector.
    pub fn d_norm(&self) -> f64 {
        (self.alpha * self.alpha * self.k * self.k + self.omega_y * self.omega_y).sqrt()
    }

    /// Wavelength 2*pi/|k_p| of the P waves (the unit-speed normalisation
    /// makes |k_p| = 1).
    pub fn l_p(&self) -> f64 {
        2.0 * PI
    }

    /// Wavelength 2*pi/d_norm of the S wave: 2*pi*sqrt(mu/(lambda+2*mu)).
    pub fn l_s(&self) -> f64 {
        2.0 * PI / self.d_norm()
    }

    /// y-extent holding two incident wavelengths: L_y = 4*pi/sin(phi).
    /// Infinite at normal incidence.
    pub fn l_y(&self) -> f64 {
        4.0 * PI / self.omega_y
    }

    /// Matching x-extent L_x = 4*pi/cos(phi).
    pub fn l_x(&self) -> f64 {
        4.0 * PI / self.k
    }

    /// Time period T = 2*pi/xi of every wave in the ansatz.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.xi
    }
}

/// Solves the free-surface reflection problem at incidence angle `phi_angle`.
///
/// # Method
/// The traction rows of the summed ansatz at x = 0 give a real 2x2 system
///
/// ```text
/// (k^2 + g2*w^2)*R_p + a*k*w*(1-g2)/dn * R_s = -(k^2 + g2*w^2)
/// -2*k*w*R_p       + (a^2*k^2 - w^2)/dn * R_s = -2*k*w
/// ```
///
/// with g2 = gamma^2, w = omega_y, dn the polarisation normaliser; it is
/// solved by Cramer's rule. At normal incidence the system decouples to
/// R_p = -1, R_s = 0 (no conversion).
pub fn solve_reflection(material: &Material, phi_angle: f64) -> Result<ModeConversionSpec, ReflectionError> {
    if !(0.0..PI / 2.0).contains(&phi_angle) {
        return Err(ReflectionError::InvalidAngle(phi_angle));
    }
    let k = phi_angle.cos();
    let w = phi_angle.sin();
    let g2 = material.gamma_sq();
    let xi = material.cp();
    let alpha_sq = 1.0 + (material.lambda + material.mu) / (material.mu * k * k);
    let alpha = alpha_sq.sqrt();
    let dn = (alpha_sq * k * k + w * w).sqrt();
    let a11 = k * k + g2 * w * w;
    let a12 = alpha * k * w * (1.0 - g2) / dn;
    let a21 = -2.0 * k * w;
    let a22 = (alpha_sq * k * k - w * w) / dn;
    let (b1, b2) = (-(k * k + g2 * w * w), -2.0 * k * w);
    let det = a11 * a22 - a12 * a21;
    let r_p = (b1 * a22 - a12 * b2) / det;
    let r_s = (a11 * b2 - b1 * a21) / det;
    Ok(ModeConversionSpec { material: *material, phi_angle, k, omega_y: w, xi, alpha, r_p, r_s })
}

/// Real displacement of the incident P wave.
pub fn incident_field(spec: &ModeConversionSpec, x: f64, y: f64, t: f64) -> (f64, f64) {
    let c = (spec.xi * t + spec.k * x + spec.omega_y * y).cos();
    (spec.k * c, spec.omega_y * c)
}

/// Real displacement of the reflected P wave.
pub fn reflected_p_field(spec: &ModeConversionSpec, x: f64, y: f64, t: f64) -> (f64, f64) {
    let c = (spec.xi * t - spec.k * x + spec.omega_y * y).cos();
    (-spec.r_p * spec.k * c, spec.r_p * spec.omega_y * c)
}

/// Real displacement of the reflected, mode-converted S wave. This is the
/// short-wavelength field a mode-conversion run resolves numerically.
pub fn s_wave_field(spec: &ModeConversionSpec, x: f64, y: f64, t: f64) -> (f64, f64) {
    let c = (spec.xi * t - spec.alpha * spec.k * x + spec.omega_y * y).cos();
    let scale = spec.r_s / spec.d_norm();
    (-scale * spec.omega_y * c, -scale * spec.alpha * spec.k * c)
}

/// Sum of the three waves: an exact traction-free solution.
pub fn total_field(spec: &ModeConversionSpec, x: f64, y: f64, t: f64) -> (f64, f64) {
    let (ui, vi) = incident_field(spec, x, y, t);
    let (up, vp) = reflected_p_field(spec, x, y, t);
    let (us, vs) = s_wave_field(spec, x, y, t);
    (ui + up + us, vi + vp + vs)
}

/// Traction data (g1, g2) that the S wave alone satisfies at x = 0: minus
/// the traction of the incident + reflected-P pair,
///
/// ```text
/// g1 = (1 + R_p)*(k^2 + gamma^2*omega_y^2) * sin(xi*t + omega_y*y)
/// g2 = 2*k*omega_y*(1 - R_p)              * sin(xi*t + omega_y*y)
/// ```
pub fn mode_conversion_forcing(spec: &ModeConversionSpec, y: f64, t: f64) -> (f64, f64) {
    let g2c = spec.material.gamma_sq();
    let s = (spec.xi * t + spec.omega_y * y).sin();
    let g1 = (1.0 + spec.r_p) * (spec.k * spec.k + g2c * spec.omega_y * spec.omega_y) * s;
    let g2 = 2.0 * spec.k * spec.omega_y * (1.0 - spec.r_p) * s;
    (g1, g2)
}

/// Which body-wave polarisation a plane wave carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneWaveKind {
    /// Compressional: displacement parallel to the wave vector, speed
    /// sqrt(lambda + 2*mu).
    P,
    /// Shear: displacement perpendicular to the wave vector, speed sqrt(mu).
    S,
}

/// Plane body wave `amp * d * sin(kx*x + ky*y - c*|k|*t)` on unbounded or
/// periodic domains; d is the unit polarisation for `kind`.
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub material: Material,
    pub kind: PlaneWaveKind,
    pub kx: f64,
    pub ky: f64,
    pub amplitude: f64,
}

impl PlaneWave {
    /// Phase speed for the polarisation.
    pub fn speed(&self) -> f64 {
        match self.kind {
            PlaneWaveKind::P => self.material.cp(),
            PlaneWaveKind::S => self.material.cs(),
        }
    }

    /// Real displacement at (x, y, t).
    pub fn field(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let norm = self.kx.hypot(self.ky);
        let (dx, dy) = match self.kind {
            PlaneWaveKind::P => (self.kx / norm, self.ky / norm),
            PlaneWaveKind::S => (-self.ky / norm, self.kx / norm),
        };
        let s = (self.kx * x + self.ky * y - self.speed() * norm * t).sin();
        (self.amplitude * dx * s, self.amplitude * dy * s)
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// FD step for residual checks of analytic solutions; small enough for
    /// accuracy, large enough to stay clear of cancellation.
    const FD_H: f64 = 1e-4;

    /// Second-order centered second difference of a scalar function.
    fn d2<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        (f(x + FD_H) - 2.0 * f(x) + f(x - FD_H)) / (FD_H * FD_H)
    }

    /// Centered first difference.
    fn d1<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        (f(x + FD_H) - f(x - FD_H)) / (2.0 * FD_H)
    }

    /// Max PDE residual of a displacement field at a point, relative to the
    /// acceleration scale.
    fn pde_residual<F>(material: &Material, field: F, x: f64, y: f64, t: f64) -> f64
    where
        F: Fn(f64, f64, f64) -> (f64, f64) + Copy,
    {
        let (lam, mu) = (material.lambda, material.mu);
        let u = |x: f64, y: f64, t: f64| field(x, y, t).0;
        let v = |x: f64, y: f64, t: f64| field(x, y, t).1;
        let u_tt = d2(|s| u(x, y, s), t);
        let v_tt = d2(|s| v(x, y, s), t);
        let u_xx = d2(|s| u(s, y, t), x);
        let u_yy = d2(|s| u(x, s, t), y);
        let v_xx = d2(|s| v(s, y, t), x);
        let v_yy = d2(|s| v(x, s, t), y);
        let u_xy = d1(|s| d1(|r| u(s, r, t), y), x);
        let v_xy = d1(|s| d1(|r| v(s, r, t), y), x);
        let ru = mu * (u_xx + u_yy) + (lam + mu) * (u_xx + v_xy) - u_tt;
        let rv = mu * (v_xx + v_yy) + (lam + mu) * (u_xy + v_yy) - v_tt;
        let scale = u_tt.abs().max(v_tt.abs()).max(1e-3);
        ru.abs().max(rv.abs()) / scale
    }

    #[test]
    fn rayleigh_surface_point_values() {
        // At the origin at t=0 the wave reads (xi0_tilde^2/2, 0).
        let m = Material::new(1.0, 0.01).unwrap();
        let spec = RayleighWaveSpec::new(m, 2.0 * PI);
        let (u, v) = rayleigh_field(&spec, 0.0, 0.0, 0.0);
        assert_relative_eq!(u, spec.mode.xi0_tilde.powi(2) / 2.0, max_relative = 1e-13);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rayleigh_periods_reference() {
        // 50-digit oracle values for lambda = 1, omega = 2*pi.
        let cases = [(0.1, 3.330_276_509_600_940_7), (0.01, 10.474_477_451_784_196), (0.001, 33.104_153_158_191_763)];
        for (mu, t_ref) in cases {
            let m = Material::new(1.0, mu).unwrap();
            assert_relative_eq!(rayleigh_period(&m, 2.0 * PI), t_ref, max_relative = 1e-12);
        }
    }

    #[test]
    fn rayleigh_traction_free_surface() {
        let m = Material::new(1.0, 0.1).unwrap();
        let spec = RayleighWaveSpec::new(m, 2.0 * PI);
        let g2 = m.gamma_sq();
        for i in 0..7 {
            let y = 0.13 * i as f64;
            let t = 0.21 * i as f64;
            let u = |x: f64| rayleigh_field(&spec, x, y, t).0;
            let v_y = d1(|s| rayleigh_field(&spec, 0.0, s, t).1, y);
            let u_y = d1(|s| rayleigh_field(&spec, 0.0, s, t).0, y);
            let v_x = d1(|s| rayleigh_field(&spec, s, y, t).1, 0.0);
            let u_x = d1(u, 0.0);
            // FD-level zero: the x-decay rates are O(2*pi), so centered
            // differences leave O(h^2 * (2 pi)^3) ~ 3e-6.
            assert_abs_diff_eq!(u_x + g2 * v_y, 0.0, epsilon = 5e-5);
            assert_abs_diff_eq!(u_y + v_x, 0.0, epsilon = 5e-5);
        }
    }

    #[test]
    fn rayleigh_satisfies_wave_equation() {
        for mu in [0.5, 0.1, 0.01] {
            let m = Material::new(1.0, mu).unwrap();
            let spec = RayleighWaveSpec::new(m, 2.0 * PI);
            for (x, y, t) in [(0.0, 0.2, 0.1), (0.3, 0.7, 1.4), (1.1, 0.0, 0.6)] {
                let r = pde_residual(&m, |x, y, t| rayleigh_field(&spec, x, y, t), x, y, t);
                assert!(r < 2e-5, "residual {r} at mu={mu}, ({x},{y},{t})");
            }
        }
    }

    #[test]
    fn rayleigh_moves_rigidly_at_cr() {
        // u(x, y, t+dt) = u(x, y - c_r*dt, t): pure translation in -y.
        let m = Material::new(1.0, 0.1).unwrap();
        let spec = RayleighWaveSpec::new(m, 2.0 * PI);
        let dt = 0.37;
        for (x, y) in [(0.0, 0.1), (0.5, 0.9), (2.0, 0.4)] {
            let (u1, v1) = rayleigh_field(&spec, x, y, dt);
            let (u2, v2) = rayleigh_field(&spec, x, y + spec.mode.c_r * dt, 0.0);
            assert_relative_eq!(u1, u2, max_relative = 1e-12, epsilon = 1e-13);
            assert_relative_eq!(v1, v2, max_relative = 1e-12, epsilon = 1e-13);
        }
    }

    #[test]
    fn reflection_reference_values() {
        // Frozen from an independent solve of the traction system; residuals
        // of the raw traction rows were ~3e-16 there.
        let cases = [
            (1.0, 2.236_067_977_499_789_4, -0.282_859_652_727_425_75, -1.110_989_048_752_033_5),
            (0.1, 4.795_831_523_312_719_1, -0.923_752_139_236_442_73, -0.605_824_808_423_061_08),
            (0.01, 14.247_806_848_775_006, -0.997_210_482_385_121_78, -0.199_711_258_710_861_82),
        ];
        for (mu, alpha, rp, rs) in cases {
            let m = Material::new(1.0, mu).unwrap();
            let spec = solve_reflection(&m, PI / 4.0).unwrap();
            assert_relative_eq!(spec.alpha, alpha, max_relative = 1e-13);
            assert_relative_eq!(spec.r_p, rp, max_relative = 1e-13);
            assert_relative_eq!(spec.r_s, rs, max_relative = 1e-13);
        }
    }

    #[test]
    fn normal_incidence_reflects_without_conversion() {
        let m = Material::new(1.0, 1.0).unwrap();
        let spec = solve_reflection(&m, 0.0).unwrap();
        assert_relative_eq!(spec.alpha * spec.alpha, 3.0, max_relative = 1e-14);
        assert_relative_eq!(spec.r_p, -1.0, max_relative = 1e-14);
        assert_abs_diff_eq!(spec.r_s, 0.0, epsilon = 1e-15);
        assert!(solve_reflection(&m, PI / 2.0).is_err());
        assert!(solve_reflection(&m, -0.1).is_err());
    }

    #[test]
    fn wavelengths_and_period() {
        let m = Material::new(1.0, 0.01).unwrap();
        let spec = solve_reflection(&m, PI / 4.0).unwrap();
        assert_relative_eq!(spec.l_s(), 0.622_128_049_397_100_76, max_relative = 1e-13);
        assert_relative_eq!(spec.period(), 6.221_280_493_971_007_4, max_relative = 1e-13);
        assert_relative_eq!(spec.l_p(), 2.0 * PI, max_relative = 1e-15);
        let (lp, ls) = wavelengths(&m, m.cp());
        assert_relative_eq!(lp, spec.l_p(), max_relative = 1e-14);
        assert_relative_eq!(ls, spec.l_s(), max_relative = 1e-14);
        let mu01 = Material::new(1.0, 0.1).unwrap();
        let s01 = solve_reflection(&mu01, PI / 4.0).unwrap();
        assert_relative_eq!(s01.period(), 5.735_737_209_545_476_4, max_relative = 1e-13);
    }

    #[test]
    fn total_field_is_traction_free() {
        for mu in [1.0, 0.1, 0.01] {
            let m = Material::new(1.0, mu).unwrap();
            let spec = solve_reflection(&m, PI / 4.0).unwrap();
            let g2 = m.gamma_sq();
            for i in 0..9 {
                let y = -1.0 + 0.4 * i as f64;
                let t = 0.15 * i as f64;
                let u_x = d1(|s| total_field(&spec, s, y, t).0, 0.0);
                let v_y = d1(|s| total_field(&spec, 0.0, s, t).1, y);
                let u_y = d1(|s| total_field(&spec, 0.0, s, t).0, y);
                let v_x = d1(|s| total_field(&spec, s, y, t).1, 0.0);
                // alpha*k reaches ~10 at mu=0.01, so allow O(h^2*(alpha k)^3).
                let fd_tol = 1e-8 * (spec.alpha * spec.k).powi(3).max(1.0);
                assert_abs_diff_eq!(u_x + g2 * v_y, 0.0, epsilon = fd_tol);
                assert_abs_diff_eq!(u_y + v_x, 0.0, epsilon = fd_tol);
            }
        }
    }

    #[test]
    fn s_wave_traction_matches_forcing() {
        for mu in [1.0, 0.1, 0.01] {
            let m = Material::new(1.0, mu).unwrap();
            let spec = solve_reflection(&m, PI / 4.0).unwrap();
            let g2c = m.gamma_sq();
            for i in 0..9 {
                let y = -2.0 + 0.6 * i as f64;
                let t = 0.11 * i as f64;
                let u_x = d1(|s| s_wave_field(&spec, s, y, t).0, 0.0);
                let v_y = d1(|s| s_wave_field(&spec, 0.0, s, t).1, y);
                let u_y = d1(|s| s_wave_field(&spec, 0.0, s, t).0, y);
                let v_x = d1(|s| s_wave_field(&spec, s, y, t).1, 0.0);
                let (g1, g2) = mode_conversion_forcing(&spec, y, t);
                let fd_tol = 1e-8 * (spec.alpha * spec.k).powi(3).max(1.0);
                assert_abs_diff_eq!(u_x + g2c * v_y, g1, epsilon = fd_tol);
                assert_abs_diff_eq!(u_y + v_x, g2, epsilon = fd_tol);
            }
        }
    }

    #[test]
    fn conversion_waves_satisfy_wave_equation() {
        let m = Material::new(1.0, 0.1).unwrap();
        let spec = solve_reflection(&m, PI / 4.0).unwrap();
        for (x, y, t) in [(0.0, 0.3, 0.2), (1.0, -0.5, 0.9), (2.2, 1.8, 2.3)] {
            assert!(pde_residual(&m, |x, y, t| s_wave_field(&spec, x, y, t), x, y, t) < 2e-5);
            assert!(pde_residual(&m, |x, y, t| total_field(&spec, x, y, t), x, y, t) < 2e-5);
        }
    }

    #[test]
    fn plane_waves_satisfy_wave_equation() {
        let m = Material::new(1.3, 0.6).unwrap();
        for kind in [PlaneWaveKind::P, PlaneWaveKind::S] {
            let w = PlaneWave { material: m, kind, kx: 2.0 * PI, ky: 4.0 * PI, amplitude: 0.7 };
            for (x, y, t) in [(0.1, 0.2, 0.0), (0.4, 0.9, 1.1)] {
                let r = pde_residual(&m, |x, y, t| w.field(x, y, t), x, y, t);
                assert!(r < 5e-4, "residual {r} for {kind:?}");
            }
        }
    }
}

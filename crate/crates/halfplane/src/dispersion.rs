//! Normal-mode dispersion analysis for the free-surface half-plane.
//!
//! Inserting the mode ansatz `exp(s*t + i*omega*y - kappa*x)` into the elastic
//! wave equation yields two decay rates,
//!
//! ```text
//! kappa1 = sqrt(omega^2 + s^2/mu),    kappa2 = sqrt(omega^2 + s^2/(lambda+2*mu)),
//! ```
//!
//! and the traction-free boundary condition couples the two mode amplitudes
//! through a 2x2 system whose determinant, after scaling out |omega| and the
//! S-wave speed with `s_tilde = s/(|omega|*sqrt(mu))`, is
//!
//! ```text
//! phi(s_tilde) = sqrt(1+s_tilde^2) * sqrt(1+a*s_tilde^2) - (1+s_tilde^2/2)^2,
//! a = mu/(lambda+2*mu).
//! ```
//!
//! phi has no zeros for Re(s_tilde) > 0; the surface (Rayleigh) wave appears
//! as the pair of generalized eigenvalues `s_tilde = ±i*xi0_tilde` on the
//! imaginary axis. Substituting sigma = xi_tilde^2 turns the root condition
//! into the real quartic-like function
//!
//! ```text
//! psi(sigma) = (1-sigma)*(1-a*sigma) - (1-sigma/2)^4,
//! ```
//!
//! which has exactly one root sigma* in (0,1) for every ratio
//! lambda/mu in [0, inf]. This module finds that root, assembles the derived
//! surface-mode constants (decay rates, the derivative |phi'| controlling
//! perturbation sensitivity, the Rayleigh speed), and exposes the raw
//! determinant for cross-checks.

use crate::material::Material;
use crate::C64;

/// Tolerances and iteration limits for the root finder.
pub mod tol {
    /// Bisection shrinks the bracket to this width before Newton takes over.
    pub const BISECT_WIDTH: f64 = 1e-3;
    /// Newton stops when |psi| falls below this (psi is O(1) on [0,1]).
    pub const PSI_RESIDUAL: f64 = 1e-15;
    /// Hard cap on Newton steps; convergence is quadratic and takes < 10.
    pub const NEWTON_MAX: usize = 60;
    /// The root bracket excludes the endpoint zeros/extremes of psi.
    pub const BRACKET_MARGIN: f64 = 1e-9;
}

/// Principal-branch complex square root with argument in (-pi, pi], so that
/// Re(result) >= 0 and arguments on the negative real axis map to the
/// positive imaginary axis: branch_sqrt(-4) = 2i.
///
/// A negative-zero imaginary part is normalised to +0 first; IEEE atan2 would
/// otherwise put `-4 - 0i` just below the cut and return -2i.
pub fn branch_sqrt(z: C64) -> C64 {
    let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
    z.sqrt()
}

/// Mode decay rate kappa = sqrt(omega^2 + s^2/speed_sq) on the principal
/// branch. For Re(s) > 0 this satisfies Re(kappa) >= Re(s)/speed (the modes
/// genuinely decay in x), which is what makes the half-plane problem
/// boundary-stable.
pub fn kappa(s: C64, omega: f64, speed_sq: f64) -> C64 {
    branch_sqrt(C64::new(omega * omega, 0.0) + s * s / speed_sq)
}

/// Laplace variable scaled by the S-wave scale of the mode:
/// s_tilde = s/(|omega|*sqrt(mu)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledLaplaceVar(pub C64);

impl ScaledLaplaceVar {
    /// Scale a physical Laplace variable.
    pub fn from_physical(s: C64, omega: f64, mu: f64) -> Self {
        Self(s / (omega.abs() * mu.sqrt()))
    }

    /// Undo the scaling.
    pub fn physical(self, omega: f64, mu: f64) -> C64 {
        self.0 * omega.abs() * mu.sqrt()
    }
}

/// 1/(2 + lambda/mu), i.e. mu/(lambda + 2*mu); accepts lam_over_mu = inf.
fn ratio_a(lam_over_mu: f64) -> f64 {
    assert!(
        lam_over_mu >= 0.0 && !lam_over_mu.is_nan(),
        "lambda/mu must be in [0, inf], got {lam_over_mu}"
    );
    if lam_over_mu.is_infinite() {
        0.0
    } else {
        1.0 / (lam_over_mu + 2.0)
    }
}

/// Scaled boundary determinant
/// `phi(s_tilde) = sqrt(1+s_tilde^2)*sqrt(1+a*s_tilde^2) - (1+s_tilde^2/2)^2`.
///
/// Zeros of phi in the closed right half-plane are the generalized
/// eigenvalues of the half-plane problem; there are none with Re > 0 and a
/// conjugate pair at ±i*xi0_tilde on the axis.
pub fn phi(s_tilde: C64, lam_over_mu: f64) -> C64 {
    let a = ratio_a(lam_over_mu);
    let st2 = s_tilde * s_tilde;
    let one = C64::new(1.0, 0.0);
    let k1 = branch_sqrt(one + st2);
    let k2 = branch_sqrt(one + st2 * a);
    let half = one + st2 * 0.5;
    k1 * k2 - half * half
}

/// Derivative of [`phi`] with respect to s_tilde:
/// `phi'(s) = s*k2/k1 + a*s*k1/k2 - 2*s*(1+s^2/2)` with k1, k2 the two
/// branch square roots. Valid away from the branch points s_tilde = ±i and
/// ±i/sqrt(a).
pub fn phi_prime(s_tilde: C64, lam_over_mu: f64) -> C64 {
    let a = ratio_a(lam_over_mu);
    let st2 = s_tilde * s_tilde;
    let one = C64::new(1.0, 0.0);
    let k1 = branch_sqrt(one + st2);
    let k2 = branch_sqrt(one + st2 * a);
    s_tilde * k2 / k1 + s_tilde * k1 / k2 * a - s_tilde * (one + st2 * 0.5) * 2.0
}

/// Real reduction of the determinant on the imaginary axis: with
/// s_tilde = i*xi_tilde and sigma = xi_tilde^2 in [0, 1],
/// `psi(sigma) = (1-sigma)*(1-a*sigma) - (1-sigma/2)^4`.
///
/// psi(0) = 0 (not an eigenvalue: the mode amplitude vanishes there),
/// psi(1) = -1/16, and psi has exactly one root in (0,1).
pub fn psi(sigma: f64, lam_tilde: f64) -> f64 {
    let a = ratio_a(lam_tilde);
    let half = 1.0 - sigma / 2.0;
    (1.0 - sigma) * (1.0 - a * sigma) - half * half * half * half
}

/// d psi / d sigma = -(1+a) + 2*a*sigma + 2*(1-sigma/2)^3.
/// psi'(0) = (1+lambda/mu)/(2+lambda/mu) > 0 and
/// psi'(1) = -(2+3*lambda/mu)/(8+4*lambda/mu) < 0.
pub fn psi_prime(sigma: f64, lam_tilde: f64) -> f64 {
    let a = ratio_a(lam_tilde);
    let half = 1.0 - sigma / 2.0;
    -(1.0 + a) + 2.0 * a * sigma + 2.0 * half * half * half
}

/// Scalar root by bisection followed by guarded Newton.
///
/// # Method
/// The bracket [a, b] must straddle a sign change. Bisection shrinks it to
/// width [`tol::BISECT_WIDTH`]; Newton then iterates from the midpoint,
/// falling back to the bracket midpoint whenever a step leaves [a, b], until
/// the residual passes [`tol::PSI_RESIDUAL`] or the step stagnates.
///
/// # Panics
/// Panics if f(a) and f(b) have the same sign.
fn newton_bisect<F>(f: F, mut a: f64, mut b: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    assert!(
        fa * fb < 0.0,
        "root bracket [{a}, {b}] does not straddle a sign change ({fa}, {fb})"
    );
    let increasing = fa < 0.0;
    while b - a > tol::BISECT_WIDTH {
        let mid = 0.5 * (a + b);
        let (fm, _) = f(mid);
        if (fm < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..tol::NEWTON_MAX {
        let (fx, fpx) = f(x);
        if fx.abs() <= tol::PSI_RESIDUAL {
            break;
        }
        // Keep the bracket valid so a wild Newton step cannot escape.
        if (fx < 0.0) == increasing {
            a = a.max(x.min(b));
        } else {
            b = b.min(x.max(a));
        }
        let step = fx / fpx;
        let next = x - step;
        x = if next > a && next < b { next } else { 0.5 * (a + b) };
        if step.abs() < f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Root sigma* of [`psi`] in (0, 1): the squared scaled surface-wave
/// frequency xi0_tilde^2. Monotone increasing in lambda/mu, from
/// 2 - 2*q with q the golden ratio conjugate at lambda/mu = 0 to
/// 2 - 2*q with q^3 + q^2 + q = 1 at lambda/mu = inf.
pub fn rayleigh_sigma(lam_tilde: f64) -> f64 {
    newton_bisect(
        |sig| (psi(sig, lam_tilde), psi_prime(sig, lam_tilde)),
        tol::BRACKET_MARGIN,
        1.0 - tol::BRACKET_MARGIN,
    )
}

/// Surface-mode constants depending only on the ratio lambda/mu.
#[derive(Debug, Clone, Copy)]
pub struct ScaledMode {
    /// sigma* = xi0_tilde^2, the root of psi in (0, 1).
    pub sigma: f64,
    /// Scaled surface-wave frequency xi0_tilde = sqrt(sigma*).
    pub xi0_tilde: f64,
    /// S-mode decay rate over |omega|: kappa10/|omega| = sqrt(1 - sigma*).
    pub kappa10_over_w: f64,
    /// P-mode decay rate over |omega|: kappa20/|omega| = sqrt(1 - a*sigma*).
    pub kappa20_over_w: f64,
    /// Real constant C0 = kappa1*kappa2*phi'(s0)/s0 at the eigenvalue;
    /// equals 1 - a*sigma + a*(1-sigma) - 2*(1-sigma/2)^3.
    pub c0: f64,
    /// |phi'(i*xi0_tilde)| = C0*xi0_tilde/(kappa10*kappa20/omega^2):
    /// sensitivity of the eigenvalue to boundary perturbations.
    pub phi_prime_abs: f64,
    /// Amplitude of the P-partial in the surface eigenfunction relative to
    /// the S-partial: coeff = sigma*/2 - 1 (always in (-1, -1/2)).
    pub coeff: f64,
}

/// Computes the surface-mode constants for a ratio lambda/mu in [0, inf].
pub fn scaled_mode(lam_over_mu: f64) -> ScaledMode {
    let a = ratio_a(lam_over_mu);
    let sigma = rayleigh_sigma(lam_over_mu);
    let xi0_tilde = sigma.sqrt();
    let kappa10_over_w = (1.0 - sigma).sqrt();
    let kappa20_over_w = (1.0 - a * sigma).sqrt();
    let half = 1.0 - sigma / 2.0;
    let c0 = 1.0 - a * sigma + a * (1.0 - sigma) - 2.0 * half * half * half;
    let phi_prime_abs = c0 * xi0_tilde / (kappa10_over_w * kappa20_over_w);
    ScaledMode {
        sigma,
        xi0_tilde,
        kappa10_over_w,
        kappa20_over_w,
        c0,
        phi_prime_abs,
        coeff: sigma / 2.0 - 1.0,
    }
}

/// Surface (Rayleigh) mode of a concrete material: the scaled constants plus
/// the physical propagation speed.
#[derive(Debug, Clone, Copy)]
pub struct RayleighMode {
    /// Scaled frequency xi0_tilde; the generalized eigenvalues sit at
    /// s = ±i*xi0_tilde*sqrt(mu)*|omega|.
    pub xi0_tilde: f64,
    /// S-partial decay rate per unit |omega|.
    pub kappa10_over_w: f64,
    /// P-partial decay rate per unit |omega|.
    pub kappa20_over_w: f64,
    /// |phi'| at the eigenvalue (perturbation sensitivity).
    pub phi_prime_abs: f64,
    /// P-partial amplitude xi0_tilde^2/2 - 1 in the eigenfunction.
    pub coeff: f64,
    /// Surface-wave speed c_r = xi0_tilde*sqrt(mu), slightly below the
    /// S-wave speed.
    pub c_r: f64,
}

/// Finds the surface mode of `material`.
pub fn find_rayleigh_mode(material: &Material) -> RayleighMode {
    let m = scaled_mode(material.lam_over_mu());
    RayleighMode {
        xi0_tilde: m.xi0_tilde,
        kappa10_over_w: m.kappa10_over_w,
        kappa20_over_w: m.kappa20_over_w,
        phi_prime_abs: m.phi_prime_abs,
        coeff: m.coeff,
        c_r: m.xi0_tilde * material.mu.sqrt(),
    }
}

/// Unscaled boundary determinant
/// `Delta = 2*omega^2*(1-gamma^2)*kappa1*kappa2
///          - (kappa2^2 - gamma^2*omega^2)*(kappa1^2 + omega^2)`.
///
/// Related to the scaled determinant by
/// (lambda+2*mu)*Delta = 4*mu*omega^4*phi(s_tilde); kept as an independent
/// formulation for cross-checks.
pub fn determinant_delta(s: C64, omega: f64, material: &Material) -> C64 {
    let k1 = kappa(s, omega, material.cs_sq());
    let k2 = kappa(s, omega, material.cp_sq());
    let g2 = material.gamma_sq();
    let w2 = omega * omega;
    k1 * k2 * (2.0 * w2 * (1.0 - g2)) - (k2 * k2 - g2 * w2) * (k1 * k1 + w2)
}

#[cfg(test)]
mod test {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Reference surface-mode constants from a 50-digit Newton iteration on
    /// psi, cross-checked against the closed forms at both ratio endpoints
    /// (golden-ratio conjugate at 0, reciprocal tribonacci constant at inf).
    /// Columns: lambda/mu, sigma*, kappa10/|w|, kappa20/|w|, C0, |phi'|.
    const REFERENCE: [(f64, f64, f64, f64, f64, f64); 7] = [
        (0.0, 0.76393202250021030, 0.48586827175664568, 0.78615137775742329,
         0.26393202250021030, 0.60394129215991569),
        (1.0, 0.84529946162074847, 0.39331989319032864, 0.84748658561247083,
         0.38490017945975051, 1.06163362269083425),
        (4.0, 0.88773223418537009, 0.33506382349431565, 0.92306263473058623,
         0.52674830197822081, 1.60466887131436503),
        (8.0, 0.89913748259864587, 0.31758859771936732, 0.95398440854142654,
         0.58663915503070666, 1.83602216228167227),
        (10.0, 0.90165295822868223, 0.31360331913313318, 0.96169758941204753,
         0.60180564689333391, 1.89477125027675855),
        (100.0, 0.91145507533770194, 0.29756499233326836, 0.99552205697717303,
         0.66946985460431629, 2.15757517595322639),
        (f64::INFINITY, 0.91262197461584728, 0.29559774252208477, 1.0,
         0.67857351042832227, 2.19301322075756657),
    ];

    #[test]
    fn branch_sqrt_convention() {
        // Negative real axis belongs to the upper branch.
        assert_eq!(branch_sqrt(C64::new(-4.0, 0.0)), C64::new(0.0, 2.0));
        // ... including a negative-zero imaginary part.
        assert_eq!(branch_sqrt(C64::new(-4.0, -0.0)), C64::new(0.0, 2.0));
        let r = branch_sqrt(C64::new(0.0, 2.0));
        assert_relative_eq!(r.re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.im, 1.0, max_relative = 1e-15);
        // Just below the cut: conjugate of just above.
        let lo = branch_sqrt(C64::new(-4.0, -1e-12));
        assert!(lo.im < 0.0 && lo.re >= 0.0);
    }

    #[test]
    fn kappa_matches_scaled_form() {
        let m = Material::new(2.3, 0.7).unwrap();
        let s = C64::new(0.4, -1.1);
        let omega = -1.7;
        let st = ScaledLaplaceVar::from_physical(s, omega, m.mu).0;
        let one = C64::new(1.0, 0.0);
        let k1 = kappa(s, omega, m.cs_sq());
        let k2 = kappa(s, omega, m.cp_sq());
        let k1s = branch_sqrt(one + st * st) * omega.abs();
        let a = m.mu / m.cp_sq();
        let k2s = branch_sqrt(one + st * st * a) * omega.abs();
        assert_relative_eq!(k1.re, k1s.re, max_relative = 1e-13);
        assert_relative_eq!(k1.im, k1s.im, max_relative = 1e-13);
        assert_relative_eq!(k2.re, k2s.re, max_relative = 1e-13);
        assert_relative_eq!(k2.im, k2s.im, max_relative = 1e-13);
    }

    #[test]
    fn psi_endpoint_identities() {
        for lt in [0.0, 1.0, 10.0, f64::INFINITY] {
            assert_eq!(psi(0.0, lt), 0.0, "psi(0) must vanish exactly");
            assert_abs_diff_eq!(psi(1.0, lt), -1.0 / 16.0, epsilon = 1e-15);
            let expect0 = if lt.is_infinite() { 1.0 } else { (1.0 + lt) / (2.0 + lt) };
            assert_relative_eq!(psi_prime(0.0, lt), expect0, max_relative = 1e-14);
            let expect1 = if lt.is_infinite() { -0.75 } else { -(2.0 + 3.0 * lt) / (8.0 + 4.0 * lt) };
            assert_relative_eq!(psi_prime(1.0, lt), expect1, max_relative = 1e-14);
        }
    }

    #[test]
    fn surface_mode_reference_values() {
        for (lt, sigma, k10, k20, c0, phip) in REFERENCE {
            let m = scaled_mode(lt);
            assert_relative_eq!(m.sigma, sigma, max_relative = 1e-13);
            assert_relative_eq!(m.kappa10_over_w, k10, max_relative = 1e-13);
            assert_relative_eq!(m.kappa20_over_w, k20, max_relative = 1e-13);
            assert_relative_eq!(m.c0, c0, max_relative = 1e-13);
            assert_relative_eq!(m.phi_prime_abs, phip, max_relative = 1e-13);
            // The root really is a root of the determinant.
            let at_root = phi(C64::new(0.0, m.xi0_tilde), lt);
            assert!(at_root.norm() < 1e-13, "phi at the mode = {at_root}");
        }
    }

    #[test]
    fn endpoint_closed_forms() {
        // lambda/mu = 0: with q = (sqrt(5)-1)/2 (so q^2 + q = 1),
        // sigma* = 2-2q, kappa20^2 = q, kappa10 = q^(3/2), C0 = 3/2 - 2q.
        let q = (5f64.sqrt() - 1.0) / 2.0;
        let m0 = scaled_mode(0.0);
        assert_relative_eq!(m0.sigma, 2.0 - 2.0 * q, max_relative = 1e-14);
        assert_relative_eq!(m0.kappa20_over_w * m0.kappa20_over_w, q, max_relative = 1e-14);
        assert_relative_eq!(m0.kappa10_over_w, q.powf(1.5), max_relative = 1e-13);
        assert_relative_eq!(m0.c0, 1.5 - 2.0 * q, max_relative = 1e-12);
        // lambda/mu = inf: with q^3 + q^2 + q = 1 (reciprocal tribonacci),
        // sigma* = 2-2q, kappa10 = q^2, C0 = 1 - 2*q^3.
        let q = 0.543_689_012_692_076_3_f64;
        assert_abs_diff_eq!(q * q * q + q * q + q, 1.0, epsilon = 1e-15);
        let mi = scaled_mode(f64::INFINITY);
        assert_relative_eq!(mi.sigma, 2.0 - 2.0 * q, max_relative = 1e-14);
        assert_relative_eq!(mi.kappa10_over_w, q * q, max_relative = 1e-13);
        assert_relative_eq!(mi.c0, 1.0 - 2.0 * q * q * q, max_relative = 1e-12);
    }

    #[test]
    fn phi_prime_matches_central_difference() {
        let pts = [
            (C64::new(0.6, 0.3), 1.0),
            (C64::new(0.1, -2.0), 0.0),
            (C64::new(2.0, 5.0), 37.5),
            (C64::new(0.9, -0.2), f64::INFINITY),
        ];
        for (st, lt) in pts {
            let d = C64::new(1e-5, 0.0);
            let num = (phi(st + d, lt) - phi(st - d, lt)) / (2.0 * d);
            let ana = phi_prime(st, lt);
            assert!((num - ana).norm() <= 1e-8 * ana.norm().max(1.0));
        }
    }

    #[test]
    fn phi_prime_at_mode_is_imaginary_with_ratio_c0() {
        // kappa1*kappa2*phi'(s0)/s0 = C0 exactly (real), and
        // |phi'| = C0*xi0/(k10*k20).
        for lt in [0.0, 1.0, 10.0, 1e4, f64::INFINITY] {
            let m = scaled_mode(lt);
            let s0 = C64::new(0.0, m.xi0_tilde);
            let p = phi_prime(s0, lt);
            assert!(p.re.abs() < 1e-13, "Re phi'(s0) = {}", p.re);
            let lhs = p / s0 * m.kappa10_over_w * m.kappa20_over_w;
            assert_relative_eq!(lhs.re, m.c0, max_relative = 1e-10);
            assert!(lhs.im.abs() < 1e-12);
            assert_relative_eq!(p.norm(), m.phi_prime_abs, max_relative = 1e-10);
        }
    }

    #[test]
    fn sigma_monotone_in_ratio() {
        let ratios = [0.0, 0.3, 1.0, 2.0, 5.0, 20.0, 1e3, 1e6];
        let mut prev = -1.0;
        for lt in ratios {
            let s = rayleigh_sigma(lt);
            assert!(s > prev, "sigma* must increase with lambda/mu");
            assert!(s > 0.0 && s < 1.0);
            prev = s;
        }
        assert!(rayleigh_sigma(1e12) < rayleigh_sigma(f64::INFINITY));
    }

    #[test]
    fn determinant_matches_scaled_phi() {
        // (lambda+2*mu)*Delta = 4*mu*omega^4*phi(s_tilde)
        let mats = [
            Material::new(1.0, 1.0).unwrap(),
            Material::new(1.0, 0.01).unwrap(),
            Material::new(0.0, 2.0).unwrap(),
            Material::new(7.3, 0.4).unwrap(),
        ];
        let pts = [C64::new(0.5, 0.0), C64::new(0.2, 1.4), C64::new(3.0, -2.0), C64::new(0.01, 0.6)];
        for m in mats {
            for omega in [1.0, -2.5, 0.3] {
                for s in pts {
                    let st = ScaledLaplaceVar::from_physical(s, omega, m.mu).0;
                    let lhs = determinant_delta(s, omega, &m) * m.cp_sq();
                    let rhs = phi(st, m.lam_over_mu()) * 4.0 * m.mu * omega.powi(4);
                    assert!(
                        (lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1e-8),
                        "identity failed: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn rayleigh_speed_below_shear_speed() {
        for (lam, mu) in [(1.0, 0.1), (1.0, 0.001), (3.0, 2.0), (0.0, 1.0)] {
            let m = Material::new(lam, mu).unwrap();
            let mode = find_rayleigh_mode(&m);
            assert!(mode.c_r < m.cs());
            assert!(mode.c_r > 0.87 * m.cs(), "Rayleigh speed is near the shear speed");
            assert!(mode.coeff > -1.0 && mode.coeff < -0.5);
        }
    }
}

//! Laplace/Fourier boundary response of the half-plane and the perturbation
//! theory that predicts numerical phase error from boundary truncation terms.
//!
//! After Laplace transform in t (variable s, Re(s) > 0) and Fourier transform
//! in y (frequency omega), the decaying solution is a combination of an
//! S-like and a P-like mode with amplitudes (u01_hat, u02_hat). The traction
//! data (g1_hat, g2_hat) determine them through a 2x2 system whose scaled
//! determinant is phi(s_tilde); this module solves that system, exposes the
//! resulting boundary traces u_hat(0), v_hat(0), their strong estimate, the
//! omega -> 0 limit, and the first-order shift of the surface-wave eigenvalue
//! under order-h^2/h^4 boundary truncation errors.

use crate::dispersion::{self, branch_sqrt, phi_prime, RayleighMode, ScaledLaplaceVar};
use crate::material::Material;
use crate::C64;
use thiserror::Error;

/// The solve refuses |phi| below this: the 2x2 system is near-singular, i.e.
/// s sits next to a generalized eigenvalue and amplitudes diverge like
/// 1/dist. Callers probing the resonance should stay outside this guard.
pub const SINGULAR_PHI_TOL: f64 = 1e-10;

/// Calibrated constant for [`boundary_estimate_bound`]: the sampled maxima of
/// amplification/bound sit near 0.5 at eta ~ 1e-4, so K = 5 leaves an order
/// of magnitude of headroom while staying material-independent.
pub const DEFAULT_ESTIMATE_K: f64 = 5.0;

/// Transformed traction data at one (s, omega) point.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryData {
    /// Normal-stress datum of `u_x + gamma^2*v_y = g1`.
    pub g1_hat: C64,
    /// Shear datum of `u_y + v_x = g2`.
    pub g2_hat: C64,
    /// Laplace variable, Re(s) > 0 for the resolvent region.
    pub s: C64,
    /// y-frequency, nonzero (see [`omega_zero_asymptotics`] for omega -> 0).
    pub omega: f64,
}

/// Mode amplitudes and boundary traces produced by the solve.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryResponse {
    /// Amplitude of the S-like mode exp(-kappa1*x).
    pub u01_hat: C64,
    /// Amplitude of the P-like mode exp(-kappa2*x).
    pub u02_hat: C64,
    /// Trace u_hat(x=0) = u01_hat + u02_hat.
    pub u_at_0: C64,
    /// Trace v_hat(x=0) = -i*(kappa1/omega)*u01_hat - i*(omega/kappa2)*u02_hat.
    pub v_at_0: C64,
}

/// Failures of the boundary solve.
#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("determinant |phi| = {abs_phi:.3e} below guard; s_tilde is {dist_to_mode:.3e} from a generalized eigenvalue")]
    AtGeneralizedEigenvalue { abs_phi: f64, dist_to_mode: f64 },
    #[error("omega must be nonzero and finite (use omega_zero_asymptotics for the omega -> 0 limit)")]
    ZeroFrequency,
    #[error("boundary data must be finite")]
    NonFinite,
}

/// Solves the transformed boundary system for one data point.
///
/// # Method
/// In scaled variables (s_tilde = s/(|omega|*sqrt(mu)), a = mu/(lambda+2*mu),
/// k1 = sqrt(1+s_tilde^2), k2 = sqrt(1+a*s_tilde^2)) the system reads
///
/// ```text
/// k1*k2*u01 + (1+s_tilde^2/2)*u02 = -(lambda+2*mu)*g1*k2/(2*mu*|omega|)
/// (1+s_tilde^2/2)*u01 +       u02 = -i*g2/(2*omega)
/// ```
///
/// with determinant phi(s_tilde); Cramer's rule gives the amplitudes and the
/// traces follow. Fails when |phi| < [`SINGULAR_PHI_TOL`] (near the surface
/// eigenvalue) reporting both |phi| and the distance to ±i*xi0_tilde.
pub fn solve_boundary_system(data: &BoundaryData, material: &Material) -> Result<BoundaryResponse, BoundaryError> {
    let w = data.omega;
    if w == 0.0 || !w.is_finite() {
        return Err(BoundaryError::ZeroFrequency);
    }
    if !(data.s.is_finite() && data.g1_hat.is_finite() && data.g2_hat.is_finite()) {
        return Err(BoundaryError::NonFinite);
    }
    let mu = material.mu;
    let st = ScaledLaplaceVar::from_physical(data.s, w, mu).0;
    let st2 = st * st;
    let a = mu / material.cp_sq();
    let one = C64::new(1.0, 0.0);
    let k1 = branch_sqrt(one + st2);
    let k2 = branch_sqrt(one + st2 * a);
    let half = one + st2 * 0.5;
    let phi = k1 * k2 - half * half;
    if phi.norm() < SINGULAR_PHI_TOL {
        let xi0 = dispersion::scaled_mode(material.lam_over_mu()).xi0_tilde;
        let dist = (st - C64::new(0.0, xi0)).norm().min((st + C64::new(0.0, xi0)).norm());
        return Err(BoundaryError::AtGeneralizedEigenvalue { abs_phi: phi.norm(), dist_to_mode: dist });
    }
    let r1 = -data.g1_hat * k2 * (material.cp_sq() / (2.0 * mu * w.abs()));
    let r2 = -C64::i() * data.g2_hat / (2.0 * w);
    let u01_hat = (r1 - half * r2) / phi;
    let u02_hat = (k1 * k2 * r2 - half * r1) / phi;
    let sign = if w > 0.0 { 1.0 } else { -1.0 };
    let v_at_0 = -C64::i() * (k1 * u01_hat / sign + u02_hat / k2 * sign);
    Ok(BoundaryResponse { u01_hat, u02_hat, u_at_0: u01_hat + u02_hat, v_at_0 })
}

/// Relative residual of a response in the unscaled traction system
///
/// ```text
/// (1-gamma^2)*kappa1*kappa2*u01 + (kappa2^2 - gamma^2*omega^2)*u02 = -kappa2*g1
/// (kappa1^2 + omega^2)*u01 + 2*omega^2*u02                        = -i*omega*g2
/// ```
///
/// an independent formulation of the same constraint, so it cross-checks the
/// scaling, the solve, and the branch choices at once. Each row is normalised
/// by its largest term.
pub fn unscaled_residual(data: &BoundaryData, material: &Material, resp: &BoundaryResponse) -> f64 {
    let w = data.omega;
    let w2 = w * w;
    let k1 = dispersion::kappa(data.s, w, material.cs_sq());
    let k2 = dispersion::kappa(data.s, w, material.cp_sq());
    let g2c = material.gamma_sq();
    let t11 = k1 * k2 * resp.u01_hat * (1.0 - g2c);
    let t12 = (k2 * k2 - g2c * w2) * resp.u02_hat;
    let t13 = k2 * data.g1_hat;
    let row1 = (t11 + t12 + t13).norm() / t11.norm().max(t12.norm()).max(t13.norm()).max(f64::MIN_POSITIVE);
    let t21 = (k1 * k1 + w2) * resp.u01_hat;
    let t22 = resp.u02_hat * 2.0 * w2;
    let t23 = C64::i() * w * data.g2_hat;
    let row2 = (t21 + t22 + t23).norm() / t21.norm().max(t22.norm()).max(t23.norm()).max(f64::MIN_POSITIVE);
    row1.max(row2)
}

/// Strong boundary estimate for the traces near the surface resonance: both
/// |u_hat(0)| and |v_hat(0)| are bounded by
///
/// ```text
/// (K/eta) * ( (2*mu+lambda)/sqrt(mu) * |g1_hat| + sqrt(mu) * |g2_hat| )
/// ```
///
/// with eta = Re(s) > 0 and K independent of (mu, lambda, omega). Pass
/// [`DEFAULT_ESTIMATE_K`] unless recalibrating.
pub fn boundary_estimate_bound(data: &BoundaryData, material: &Material, eta: f64, k_const: f64) -> f64 {
    assert!(eta > 0.0, "eta = Re(s) must be positive, got {eta}");
    let root_mu = material.mu.sqrt();
    k_const / eta * (material.cp_sq() / root_mu * data.g1_hat.norm() + root_mu * data.g2_hat.norm())
}

/// Leading boundary traces as omega -> 0 at fixed s:
///
/// ```text
/// u_hat(0) = -sqrt(lambda+2*mu)*g1_hat/s + O(omega)
/// v_hat(0) = -sqrt(mu)*g2_hat/s          + O(omega)
/// ```
///
/// The v limit comes from u01_hat -> -i*mu*omega*g2_hat/s^2 in the scaled
/// system (divide the shear row by s_tilde^2/2 and keep the leading terms)
/// combined with v_hat(0) ~ -i*(kappa1/omega)*u01_hat; the direct solve
/// converges to it at first order in omega. The P-mode decay rate
/// kappa2 -> s/sqrt(lambda+2*mu) stays positive, so the response remains a
/// genuine decaying mode in the limit.
pub fn omega_zero_asymptotics(data: &BoundaryData, material: &Material) -> (C64, C64) {
    let u = -data.g1_hat * material.cp() / data.s;
    let v = -data.g2_hat * material.cs() / data.s;
    (u, v)
}

/// Boundary-truncation coefficients of a difference scheme.
///
/// A second-order scheme leaves `g1 = alpha1*h^2*u_xxx + alpha2*h^2*v_yyy`
/// and `g2 = beta1*h^2*v_xxx + beta2*h^2*u_yyy` behind in the traction
/// condition; a fourth-order scheme leaves
/// `g1 = alpha1p*h^4*d^5u/dx^5 + alpha2p*h^4*d^5v/dy^5`. The betas default to
/// zero (schemes usually center the shear row more accurately); an explicit
/// `alpha0` overrides the composite magnitude used by the resolution rule.
#[derive(Debug, Clone, Copy)]
pub struct TruncationCoeffs {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha1p: f64,
    pub alpha2p: f64,
    /// Grid spacing the truncation terms refer to.
    pub h: f64,
    /// Accuracy order of the scheme: 2 or 4.
    pub order: usize,
    /// Optional explicit |alpha0| for [`required_points_per_wavelength`].
    pub alpha0: Option<f64>,
}

impl TruncationCoeffs {
    /// Order-2 normal-stress truncation with coefficients (alpha1, alpha2).
    pub fn order2(alpha1: f64, alpha2: f64, h: f64) -> Self {
        Self { alpha1, alpha2, beta1: 0.0, beta2: 0.0, alpha1p: 0.0, alpha2p: 0.0, h, order: 2, alpha0: None }
    }

    /// Order-4 normal-stress truncation with coefficients (alpha1p, alpha2p).
    pub fn order4(alpha1p: f64, alpha2p: f64, h: f64) -> Self {
        Self { alpha1: 0.0, alpha2: 0.0, beta1: 0.0, beta2: 0.0, alpha1p, alpha2p, h, order: 4, alpha0: None }
    }

    /// Adds shear-row truncation coefficients (order 2 only).
    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    /// Overrides the composite |alpha0|.
    pub fn with_alpha0(mut self, alpha0: f64) -> Self {
        self.alpha0 = Some(alpha0);
        self
    }

    /// Composite truncation magnitude |alpha0| entering the resolution rule,
    /// from the large-ratio evaluation of theta at the surface mode.
    ///
    /// Order 2 uses the rounded mode constants 0.027 = k10^3, 0.3 = k10,
    /// 0.55 = 1 - sigma/2 of the lambda/mu -> inf limit:
    /// |alpha0| = |0.027*alpha1 + 0.3*alpha2 - 0.55*(alpha1+alpha2)| / 2.
    /// Order 4 evaluates the same limit of its bracket at full precision:
    /// |alpha0'| = |k10^5*alpha1p - k10*alpha2p - (1-sigma/2)*(alpha1p-alpha2p)| / 2.
    pub fn composite_alpha0(&self) -> f64 {
        if let Some(a0) = self.alpha0 {
            return a0.abs();
        }
        match self.order {
            2 => (0.027 * self.alpha1 + 0.3 * self.alpha2 - 0.55 * (self.alpha1 + self.alpha2)).abs() / 2.0,
            4 => {
                let m = dispersion::scaled_mode(f64::INFINITY);
                let k10 = m.kappa10_over_w;
                let half = 1.0 - m.sigma / 2.0;
                (k10.powi(5) * self.alpha1p - k10 * self.alpha2p - half * (self.alpha1p - self.alpha2p)).abs() / 2.0
            }
            o => panic!("truncation order must be 2 or 4, got {o}"),
        }
    }
}

/// Determinant perturbation theta at a general scaled Laplace point: the
/// eigenvalue condition of the scheme-perturbed problem is
/// phi(s_tilde) = theta(s_tilde).
///
/// For order 2 (kappa_j evaluated at s_tilde, half = 1 + s_tilde^2/2):
///
/// ```text
/// theta = (lambda+2*mu)*h^2/(2*mu*|w|) * (kappa2/|w|)
///         * [alpha1*kappa1^3 + alpha2*w^2*kappa1 - half*(alpha1*kappa2^3 + alpha2*w^4/kappa2)]
///       - half*h^2/(2*w) * [beta1*(kappa1^4/w - kappa2^2*w*half) + beta2*w^3*s_tilde^2/2]
/// ```
///
/// For order 4 the g1 bracket carries fifth derivatives instead:
///
/// ```text
/// theta = (lambda+2*mu)*h^4/(2*mu*|w|) * (kappa2/|w|)
///         * [alpha1p*kappa1^5 - alpha2p*w^4*kappa1 - half*(alpha1p*kappa2^5 - alpha2p*w^6/kappa2)]
/// ```
///
/// Both are real on the imaginary axis (real coefficients), which is what
/// keeps the perturbed eigenvalue on the axis: a phase error, not a growth.
pub fn theta_at(s_tilde: C64, material: &Material, omega: f64, coeffs: &TruncationCoeffs) -> C64 {
    let mu = material.mu;
    let aw = omega.abs();
    let st2 = s_tilde * s_tilde;
    let a = mu / material.cp_sq();
    let one = C64::new(1.0, 0.0);
    let k1 = branch_sqrt(one + st2) * aw;
    let k2 = branch_sqrt(one + st2 * a) * aw;
    let half = one + st2 * 0.5;
    let h = coeffs.h;
    match coeffs.order {
        2 => {
            let pre = k2 * (material.cp_sq() * h * h / (2.0 * mu * aw) / aw);
            let g1_bracket = k1 * k1 * k1 * coeffs.alpha1 + k1 * (coeffs.alpha2 * omega * omega)
                - half * (k2 * k2 * k2 * coeffs.alpha1 + coeffs.alpha2 * omega.powi(4) / k2);
            let g2_bracket = (k1 * k1 * k1 * k1 / omega - k2 * k2 * omega * half) * coeffs.beta1
                + st2 * (coeffs.beta2 * omega.powi(3) / 2.0);
            pre * g1_bracket - half * g2_bracket * (h * h / (2.0 * omega))
        }
        4 => {
            let pre = k2 * (material.cp_sq() * h.powi(4) / (2.0 * mu * aw) / aw);
            let bracket = k1.powi(5) * coeffs.alpha1p - k1 * (coeffs.alpha2p * omega.powi(4))
                - half * (k2.powi(5) * coeffs.alpha1p - coeffs.alpha2p * omega.powi(6) / k2);
            pre * bracket
        }
        o => panic!("truncation order must be 2 or 4, got {o}"),
    }
}

/// Theta evaluated at the surface eigenvalue s_tilde = i*xi0_tilde of `mode`.
pub fn theta(mode: &RayleighMode, material: &Material, omega: f64, coeffs: &TruncationCoeffs) -> C64 {
    theta_at(C64::new(0.0, mode.xi0_tilde), material, omega, coeffs)
}

/// First-order perturbed surface eigenvalue under boundary truncation.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedEigenvalue {
    /// Shift s_tilde - i*xi0_tilde = theta/phi'(i*xi0_tilde); purely
    /// imaginary for real truncation coefficients.
    pub shift: C64,
    /// Perturbed scaled eigenvalue i*xi0_tilde + shift.
    pub s_tilde: C64,
}

impl PerturbedEigenvalue {
    /// Magnitude of the scaled frequency shift: the epsilon in the
    /// resolution rule.
    pub fn eps(&self) -> f64 {
        self.shift.norm()
    }
}

/// Computes the perturbed eigenvalue for `mode` under `coeffs`.
pub fn perturbed_eigenvalue(
    mode: &RayleighMode,
    material: &Material,
    omega: f64,
    coeffs: &TruncationCoeffs,
) -> PerturbedEigenvalue {
    let s0 = C64::new(0.0, mode.xi0_tilde);
    let th = theta_at(s0, material, omega, coeffs);
    let dphi = phi_prime(s0, material.lam_over_mu());
    let shift = th / dphi;
    PerturbedEigenvalue { shift, s_tilde: s0 + shift }
}

/// Points per wavelength needed to keep the relative surface-phase error at
/// `eps`:
///
/// ```text
/// order 2:  P = 2*pi*sqrt(|alpha0| * (lambda/mu) / eps)
/// order 4:  P = 2*pi*(|alpha0'| * (lambda/mu) / eps)^(1/4)
/// ```
///
/// The mu^(-1/2) / mu^(-1/4) growth of P as mu -> 0 at fixed lambda is the
/// scaling law the solvers reproduce.
///
/// # Panics
/// Panics unless eps > 0 and the composite |alpha0| is positive.
pub fn required_points_per_wavelength(material: &Material, eps: f64, coeffs: &TruncationCoeffs) -> f64 {
    assert!(eps > 0.0 && eps.is_finite(), "eps must be positive, got {eps}");
    let a0 = coeffs.composite_alpha0();
    assert!(a0 > 0.0, "composite |alpha0| must be positive (all truncation coefficients zero?)");
    let ratio = material.lam_over_mu();
    let x = a0 * ratio / eps;
    match coeffs.order {
        2 => 2.0 * std::f64::consts::PI * x.sqrt(),
        4 => 2.0 * std::f64::consts::PI * x.powf(0.25),
        o => panic!("truncation order must be 2 or 4, got {o}"),
    }
}

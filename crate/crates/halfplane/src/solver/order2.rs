//! Second-order spatial operator on the strip.
//!
//! Interior rows use the classic five-point/cross stencils; the free-surface
//! row i = 0 uses a one-sided closure derived from the discrete elastic
//! energy, so the full stiffness operator stays symmetric and the traction
//! data enters as a boundary load. The closure drives
//!
//! ```text
//! (2mu+lambda)*u_x + lambda*v_y = (2mu+lambda)*g1
//! mu*(u_y + v_x)                = mu*g2
//! ```
//!
//! to second-order accuracy. Node masses are h^2 with the trapezoid factor
//! 1/2 on the surface row.

use super::WaveField;
use rayon::prelude::*;

pub(crate) struct Op2 {
    pub nx: usize,
    /// Distinct y-columns (the periodic seam node is not stored twice).
    pub n: usize,
    pub h: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Op2 {
    /// Elastic force F = -K w (+ traction loads when `g_row` is given) on
    /// rows i < nx-1; the Dirichlet row of `out` is zeroed. `w` supplies the
    /// Dirichlet-row values read by the last interior row.
    pub fn force(&self, w: &WaveField, g_row: Option<&[(f64, f64)]>, out: &mut WaveField) {
        let n = self.n;
        let nx = self.nx;
        let (lam, mu, h) = (self.lambda, self.mu, self.h);
        let cp2 = 2.0 * mu + lam;
        let u = &w.u;
        let v = &w.v;
        out.u
            .par_chunks_mut(n)
            .zip(out.v.par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (fu, fv))| {
                if i == nx - 1 {
                    fu.fill(0.0);
                    fv.fill(0.0);
                    return;
                }
                if i == 0 {
                    let u0 = &u[0..n];
                    let v0 = &v[0..n];
                    let u1 = &u[n..2 * n];
                    let v1 = &v[n..2 * n];
                    for j in 0..n {
                        let jp = if j + 1 == n { 0 } else { j + 1 };
                        let jm = if j == 0 { n - 1 } else { j - 1 };
                        fu[j] = cp2 * (u1[j] - u0[j])
                            + 0.5 * mu * (u0[jp] - 2.0 * u0[j] + u0[jm])
                            + 0.25 * (lam - mu) * (v0[jp] - v0[jm])
                            + 0.25 * (lam + mu) * (v1[jp] - v1[jm]);
                        fv[j] = mu * (v1[j] - v0[j])
                            + 0.5 * cp2 * (v0[jp] - 2.0 * v0[j] + v0[jm])
                            + 0.25 * (mu - lam) * (u0[jp] - u0[jm])
                            + 0.25 * (lam + mu) * (u1[jp] - u1[jm]);
                    }
                    if let Some(g) = g_row {
                        for j in 0..n {
                            fu[j] -= h * cp2 * g[j].0;
                            fv[j] -= h * mu * g[j].1;
                        }
                    }
                    return;
                }
                let uw = &u[(i - 1) * n..i * n];
                let uc = &u[i * n..(i + 1) * n];
                let ue = &u[(i + 1) * n..(i + 2) * n];
                let vw = &v[(i - 1) * n..i * n];
                let vc = &v[i * n..(i + 1) * n];
                let ve = &v[(i + 1) * n..(i + 2) * n];
                for j in 0..n {
                    let jp = if j + 1 == n { 0 } else { j + 1 };
                    let jm = if j == 0 { n - 1 } else { j - 1 };
                    fu[j] = cp2 * (ue[j] - 2.0 * uc[j] + uw[j])
                        + mu * (uc[jp] - 2.0 * uc[j] + uc[jm])
                        + 0.25 * (lam + mu) * (ve[jp] - ve[jm] - vw[jp] + vw[jm]);
                    fv[j] = mu * (ve[j] - 2.0 * vc[j] + vw[j])
                        + cp2 * (vc[jp] - 2.0 * vc[j] + vc[jm])
                        + 0.25 * (lam + mu) * (ue[jp] - ue[jm] - uw[jp] + uw[jm]);
                }
            });
    }

    /// Diagonal mass of every node in row i.
    pub fn mass(&self, i: usize) -> f64 {
        if i == 0 {
            0.5 * self.h * self.h
        } else {
            self.h * self.h
        }
    }
}

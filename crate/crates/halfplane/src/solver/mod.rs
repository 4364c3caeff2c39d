//! Time-domain finite-difference solvers for the half-plane problem on a
//! truncated strip.
//!
//! The domain is x in [0, lx], y periodic with period ly. The traction
//! condition acts at x = 0 through each scheme's boundary closure; the far
//! edge x = lx carries Dirichlet data (usually the reference solution, or
//! zero for conservation runs) and stands in for the unbounded interior, so
//! lx must be large enough that what reaches it is negligible.
//!
//! Both spatial operators ([`SchemeOrder::Two`] and [`SchemeOrder::Four`])
//! are exact gradients of discrete elastic energies, hence symmetric
//! positive semidefinite; time stepping is leapfrog, with a fourth-order
//! modified-equation correction term for the fourth-order scheme. The
//! leapfrog energy
//!
//! ```text
//! E = (1/2)*||(x1 - x0)/dt||_M^2 + (1/2)*x1' K_eff x0
//! ```
//!
//! (K_eff = K for order 2, K - dt^2/12 * K M^-1 K for order 4) is conserved
//! to roundoff on homogeneous problems, which [`Solver::discrete_energy`]
//! exposes for testing.

mod order2;
mod order4;
pub mod problems;
#[cfg(test)]
mod test_util;

use crate::material::Material;
use problems::Problem;
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

/// Refuse runs above this many point-updates (grid nodes times steps) unless
/// [`RunOptions::force_budget`] is set; keeps interactive mistakes cheap.
pub const UPDATE_BUDGET: f64 = 5e8;

/// A run aborts when the field grows past this factor times its initial
/// magnitude: with a stable step size nothing here grows at all.
const INSTABILITY_FACTOR: f64 = 1e6;

const STABILITY_CHECK_EVERY: usize = 50;

/// Accuracy order of the spatial scheme (and matching time integrator).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeOrder {
    Two,
    Four,
}

impl SchemeOrder {
    /// Safety factor of the coarse step-size rule [`cfl_dt_raw`].
    pub fn cfl_safety(self) -> f64 {
        match self {
            SchemeOrder::Two => 0.9,
            SchemeOrder::Four => 1.3,
        }
    }

    /// Stability/positivity limit on dt^2 * rho(M^-1 K): 4 from the leapfrog
    /// bound at order 2; 12 at order 4, where the correction term keeps
    /// leapfrog stable but the effective stiffness must stay semidefinite.
    fn z_max(self) -> f64 {
        match self {
            SchemeOrder::Two => 4.0,
            SchemeOrder::Four => 12.0,
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            SchemeOrder::Two => 2,
            SchemeOrder::Four => 4,
        }
    }
}

/// Coarse stable time step: `safety * h / sqrt(lambda + 3*mu)` (unit
/// density; the sharp constant for the second-order interior operator). The
/// solver takes the minimum of this and a measured spectral bound.
pub fn cfl_dt_raw(lambda: f64, mu: f64, h: f64, order: SchemeOrder) -> f64 {
    order.cfl_safety() * h / (lambda + 3.0 * mu).sqrt()
}

/// [`cfl_dt_raw`] for a validated material.
pub fn cfl_dt(material: &Material, h: f64, order: SchemeOrder) -> f64 {
    cfl_dt_raw(material.lambda, material.mu, h, order)
}

/// Uniform strip grid. `ny` counts the duplicated periodic seam node, so
/// h = ly/(ny-1) and only ny-1 columns are stored; `nx` includes the
/// Dirichlet row at x = lx.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    /// Builds the grid from the requested strip size and y-resolution; lx is
    /// snapped to the nearest multiple of h (at least 2h).
    pub fn strip(lx: f64, ly: f64, ny: usize) -> Result<Grid, SolverError> {
        if !(ly > 0.0 && ly.is_finite() && lx > 0.0 && lx.is_finite()) {
            return Err(SolverError::InvalidGrid(format!("strip sizes must be positive, got lx = {lx}, ly = {ly}")));
        }
        if ny < 3 {
            return Err(SolverError::InvalidGrid(format!("ny = {ny} is below the minimum of 3")));
        }
        let h = ly / (ny - 1) as f64;
        let nx = ((lx / h).round() as usize).max(2) + 1;
        Ok(Grid { h, nx, ny, lx: (nx - 1) as f64 * h, ly })
    }

    /// Stored (distinct) y-columns.
    pub fn n_cols(&self) -> usize {
        self.ny - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Flat index of node (i, j) in row-major x-row layout.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_cols() + j
    }
}

/// Displacement field on a grid, one flat row-major array per component.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl WaveField {
    pub fn zeros(len: usize) -> WaveField {
        WaveField { u: vec![0.0; len], v: vec![0.0; len] }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("run needs {updates:.3e} point-updates, over the {budget:.0e} budget; set force_budget to run anyway")]
    BudgetExceeded { updates: f64, budget: f64 },
    #[error("solution blew up at t = {t:.6}: max |field| = {sup:.3e}")]
    Unstable { t: f64, sup: f64 },
    #[error("invalid run options: {0}")]
    InvalidOptions(String),
}

/// Options for [`Solver::run`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Integrate to this time (> 0).
    pub t_final: f64,
    /// Number of output records after the initial one; the step size is
    /// snapped down so outputs land exactly on multiples of
    /// t_final/n_outputs.
    pub n_outputs: usize,
    /// Record the discrete leapfrog energy at outputs.
    pub record_energy: bool,
    /// Run past [`UPDATE_BUDGET`].
    pub force_budget: bool,
    /// Fixed step size instead of the automatic stable one (tests).
    pub dt_override: Option<f64>,
}

impl RunOptions {
    pub fn to(t_final: f64) -> RunOptions {
        RunOptions { t_final, n_outputs: 10, record_energy: false, force_budget: false, dt_override: None }
    }
}

/// Relative sup-norm errors against the problem's reference field: each
/// component's sup deviation over the sup magnitude of the whole reference
/// field at the same time.
#[derive(Debug, Clone, Copy)]
pub struct ErrNorms {
    pub u: f64,
    pub v: f64,
    pub combined: f64,
}

/// One output record.
#[derive(Debug, Clone, Copy)]
pub struct Record {
    pub t: f64,
    /// Present when the problem has a meaningful reference solution.
    pub err: Option<ErrNorms>,
    /// Present when energy recording was requested.
    pub energy: Option<f64>,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunResult {
    pub records: Vec<Record>,
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    pub wall_seconds: f64,
    /// Field at the final time.
    pub field: WaveField,
}

enum AnyOp {
    Two(order2::Op2),
    Four(order4::Op4),
}

impl AnyOp {
    fn force(&mut self, w: &WaveField, g_row: Option<&[(f64, f64)]>, out: &mut WaveField) {
        match self {
            AnyOp::Two(op) => op.force(w, g_row, out),
            AnyOp::Four(op) => op.force(w, g_row, out),
        }
    }

    fn mass(&self, i: usize) -> f64 {
        match self {
            AnyOp::Two(op) => op.mass(i),
            AnyOp::Four(op) => op.mass(i),
        }
    }
}

/// Leapfrog integrator bound to one grid, scheme order, and problem.
pub struct Solver<'a> {
    grid: Grid,
    order: SchemeOrder,
    problem: &'a dyn Problem,
    op: AnyOp,
    inv_mass: Vec<f64>,
    ys: Vec<f64>,
    acc: WaveField,
    w4: WaveField,
    corr: WaveField,
    g_now: Vec<(f64, f64)>,
    g_dd: Vec<(f64, f64)>,
}

impl<'a> Solver<'a> {
    pub fn new(grid: Grid, order: SchemeOrder, problem: &'a dyn Problem) -> Result<Solver<'a>, SolverError> {
        let n = grid.n_cols();
        let m = problem.material();
        let (min_nx, min_n) = match order {
            SchemeOrder::Two => (3, 3),
            SchemeOrder::Four => (12, 4),
        };
        if grid.nx < min_nx || n < min_n {
            return Err(SolverError::InvalidGrid(format!(
                "order-{} scheme needs nx >= {min_nx} and ny >= {}, got nx = {}, ny = {}",
                order.as_u32(),
                min_n + 1,
                grid.nx,
                grid.ny
            )));
        }
        let op = match order {
            SchemeOrder::Two => AnyOp::Two(order2::Op2 { nx: grid.nx, n, h: grid.h, lambda: m.lambda, mu: m.mu }),
            SchemeOrder::Four => AnyOp::Four(order4::Op4::new(grid.nx, n, grid.h, m.lambda, m.mu)),
        };
        let inv_mass = (0..grid.nx).map(|i| 1.0 / op.mass(i)).collect();
        let ys = (0..n).map(|j| grid.y(j)).collect();
        let len = grid.nx * n;
        Ok(Solver {
            grid,
            order,
            problem,
            op,
            inv_mass,
            ys,
            acc: WaveField::zeros(len),
            w4: WaveField::zeros(len),
            corr: WaveField::zeros(len),
            g_now: vec![(0.0, 0.0); n],
            g_dd: vec![(0.0, 0.0); n],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> SchemeOrder {
        self.order
    }

    /// Automatic stable step: the coarse rule capped by a measured bound
    /// 0.98*sqrt(z_max/rho) with rho estimated by power iteration on
    /// M^-1 K.
    pub fn auto_dt(&mut self) -> f64 {
        let m = self.problem.material();
        let coarse = cfl_dt(&m, self.grid.h, self.order);
        let rho = self.estimate_rho(100);
        if rho > 0.0 {
            coarse.min(0.98 * (self.order.z_max() / rho).sqrt())
        } else {
            coarse
        }
    }

    /// Dominant eigenvalue of M^-1 K by power iteration (deterministic
    /// start vector).
    fn estimate_rho(&mut self, iters: usize) -> f64 {
        let n = self.grid.n_cols();
        let nx = self.grid.nx;
        let active = (nx - 1) * n;
        let mut w = test_vector(nx, n);
        for x in &mut w.u[active..] {
            *x = 0.0;
        }
        for x in &mut w.v[active..] {
            *x = 0.0;
        }
        let mut lam = 0.0;
        for _ in 0..iters {
            self.op.force(&w, None, &mut self.acc);
            let mut norm2 = 0.0;
            for i in 0..nx - 1 {
                let im = self.inv_mass[i];
                for j in 0..n {
                    let k = i * n + j;
                    let yu = -self.acc.u[k] * im;
                    let yv = -self.acc.v[k] * im;
                    w.u[k] = yu;
                    w.v[k] = yv;
                    norm2 += yu * yu + yv * yv;
                }
            }
            lam = norm2.sqrt();
            if lam == 0.0 {
                return 0.0;
            }
            let inv = 1.0 / lam;
            for k in 0..active {
                w.u[k] *= inv;
                w.v[k] *= inv;
            }
        }
        lam
    }

    /// Fills `out` with the reference field at time t (Dirichlet row from
    /// the Dirichlet data).
    pub fn sample_exact_into(&self, t: f64, out: &mut WaveField) {
        let n = self.grid.n_cols();
        let nx = self.grid.nx;
        let grid = self.grid;
        let problem = self.problem;
        let ys = &self.ys;
        out.u
            .par_chunks_mut(n)
            .zip(out.v.par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (du, dv))| {
                let x = grid.x(i);
                for j in 0..n {
                    let (u, v) = if i == nx - 1 {
                        problem.dirichlet(x, ys[j], t)
                    } else {
                        problem.exact(x, ys[j], t)
                    };
                    du[j] = u;
                    dv[j] = v;
                }
            });
    }

    fn fill_g(&mut self, t: f64) {
        for j in 0..self.grid.n_cols() {
            self.g_now[j] = self.problem.boundary_g(self.ys[j], t);
        }
    }

    fn fill_g_dd(&mut self, t: f64, dt: f64) {
        let inv = 1.0 / (dt * dt);
        for j in 0..self.grid.n_cols() {
            let a = self.problem.boundary_g(self.ys[j], t - dt);
            let b = self.problem.boundary_g(self.ys[j], t);
            let c = self.problem.boundary_g(self.ys[j], t + dt);
            self.g_dd[j] = ((a.0 - 2.0 * b.0 + c.0) * inv, (a.1 - 2.0 * b.1 + c.1) * inv);
        }
    }

    fn scale_by_inv_mass(inv_mass: &[f64], n: usize, nx: usize, f: &mut WaveField) {
        f.u[..(nx - 1) * n]
            .par_chunks_mut(n)
            .zip(f.v[..(nx - 1) * n].par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (fu, fv))| {
                let im = inv_mass[i];
                for j in 0..n {
                    fu[j] *= im;
                    fv[j] *= im;
                }
            });
    }

    /// One leapfrog step: `next = 2*curr - prev + dt^2*accel(curr, t)`
    /// (plus the dt^4 modified-equation term at order 4), with `curr` at
    /// time t; the Dirichlet row of `next` is set from data at t + dt.
    pub fn step(&mut self, prev: &WaveField, curr: &WaveField, next: &mut WaveField, t: f64, dt: f64) {
        let n = self.grid.n_cols();
        let nx = self.grid.nx;
        self.fill_g(t);
        self.op.force(curr, Some(&self.g_now), &mut self.acc);
        Self::scale_by_inv_mass(&self.inv_mass, n, nx, &mut self.acc);
        let fourth = matches!(self.order, SchemeOrder::Four);
        if fourth {
            self.w4.u.copy_from_slice(&self.acc.u);
            self.w4.v.copy_from_slice(&self.acc.v);
            let inv = 1.0 / (dt * dt);
            let x_edge = self.grid.x(nx - 1);
            for j in 0..n {
                let a = self.problem.dirichlet(x_edge, self.ys[j], t - dt);
                let b = self.problem.dirichlet(x_edge, self.ys[j], t);
                let c = self.problem.dirichlet(x_edge, self.ys[j], t + dt);
                let k = (nx - 1) * n + j;
                self.w4.u[k] = (a.0 - 2.0 * b.0 + c.0) * inv;
                self.w4.v[k] = (a.1 - 2.0 * b.1 + c.1) * inv;
            }
            self.fill_g_dd(t, dt);
            self.op.force(&self.w4, Some(&self.g_dd), &mut self.corr);
            Self::scale_by_inv_mass(&self.inv_mass, n, nx, &mut self.corr);
        }
        let dt2 = dt * dt;
        let dt4_12 = dt2 * dt2 / 12.0;
        let (acc, corr) = (&self.acc, &self.corr);
        let grid = self.grid;
        let problem = self.problem;
        let ys = &self.ys;
        next.u
            .par_chunks_mut(n)
            .zip(next.v.par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (nu, nv))| {
                if i == nx - 1 {
                    let x = grid.x(i);
                    for j in 0..n {
                        let (du, dv) = problem.dirichlet(x, ys[j], t + dt);
                        nu[j] = du;
                        nv[j] = dv;
                    }
                    return;
                }
                let base = i * n;
                let (pu, pv) = (&prev.u[base..base + n], &prev.v[base..base + n]);
                let (cu, cv) = (&curr.u[base..base + n], &curr.v[base..base + n]);
                let (au, av) = (&acc.u[base..base + n], &acc.v[base..base + n]);
                if fourth {
                    let (ku, kv) = (&corr.u[base..base + n], &corr.v[base..base + n]);
                    for j in 0..n {
                        nu[j] = 2.0 * cu[j] - pu[j] + dt2 * au[j] + dt4_12 * ku[j];
                        nv[j] = 2.0 * cv[j] - pv[j] + dt2 * av[j] + dt4_12 * kv[j];
                    }
                } else {
                    for j in 0..n {
                        nu[j] = 2.0 * cu[j] - pu[j] + dt2 * au[j];
                        nv[j] = 2.0 * cv[j] - pv[j] + dt2 * av[j];
                    }
                }
            });
    }

    /// Relative sup-norm error of `state` against the reference field at
    /// time t.
    pub fn error_norms(&self, state: &WaveField, t: f64) -> ErrNorms {
        let n = self.grid.n_cols();
        let grid = self.grid;
        let problem = self.problem;
        let ys = &self.ys;
        let partials: Vec<(f64, f64, f64)> = state
            .u
            .par_chunks(n)
            .zip(state.v.par_chunks(n))
            .enumerate()
            .map(|(i, (su, sv))| {
                let x = grid.x(i);
                let mut du = 0.0f64;
                let mut dv = 0.0f64;
                let mut sup = 0.0f64;
                for j in 0..n {
                    let (eu, ev) = problem.exact(x, ys[j], t);
                    du = du.max((su[j] - eu).abs());
                    dv = dv.max((sv[j] - ev).abs());
                    sup = sup.max(eu.abs()).max(ev.abs());
                }
                (du, dv, sup)
            })
            .collect();
        let (mut du, mut dv, mut sup) = (0.0f64, 0.0f64, 0.0f64);
        for (a, b, c) in partials {
            du = du.max(a);
            dv = dv.max(b);
            sup = sup.max(c);
        }
        let denom = if sup > 0.0 { sup } else { 1.0 };
        ErrNorms { u: du / denom, v: dv / denom, combined: du.max(dv) / denom }
    }

    /// Discrete leapfrog energy of the state pair (a, b) one step apart;
    /// exactly conserved on homogeneous problems.
    pub fn discrete_energy(&mut self, a: &WaveField, b: &WaveField, dt: f64) -> f64 {
        let n = self.grid.n_cols();
        let nx = self.grid.nx;
        self.op.force(a, None, &mut self.acc);
        let fourth = matches!(self.order, SchemeOrder::Four);
        if fourth {
            self.op.force(b, None, &mut self.corr);
        }
        let inv_dt2 = 1.0 / (dt * dt);
        let mut kin = 0.0;
        let mut pot = 0.0;
        let mut cross = 0.0;
        for i in 0..nx - 1 {
            let m = 1.0 / self.inv_mass[i];
            let im = self.inv_mass[i];
            for j in 0..n {
                let k = i * n + j;
                let du = b.u[k] - a.u[k];
                let dv = b.v[k] - a.v[k];
                kin += m * (du * du + dv * dv);
                pot -= b.u[k] * self.acc.u[k] + b.v[k] * self.acc.v[k];
                if fourth {
                    cross += (self.acc.u[k] * self.corr.u[k] + self.acc.v[k] * self.corr.v[k]) * im;
                }
            }
        }
        0.5 * kin * inv_dt2 + 0.5 * pot - dt * dt / 24.0 * cross
    }

    fn sup_abs(state: &WaveField, len: usize) -> f64 {
        let su = state.u[..len].par_chunks(4096).map(|c| c.iter().fold(0.0f64, |m, &x| m.max(x.abs()))).collect::<Vec<_>>();
        let sv = state.v[..len].par_chunks(4096).map(|c| c.iter().fold(0.0f64, |m, &x| m.max(x.abs()))).collect::<Vec<_>>();
        let mut m = 0.0f64;
        for x in su.into_iter().chain(sv) {
            m = m.max(x);
        }
        m
    }

    fn make_record(&mut self, t: f64, state: &WaveField, pair: (&WaveField, &WaveField), dt: f64, opts: &RunOptions) -> Record {
        let err = if self.problem.has_exact() {
            Some(self.error_norms(state, t))
        } else {
            None
        };
        let energy = if opts.record_energy {
            Some(self.discrete_energy(pair.0, pair.1, dt))
        } else {
            None
        };
        Record { t, err, energy }
    }

    /// Integrates to `opts.t_final` from reference initial data, recording
    /// errors/energy at evenly spaced output times.
    pub fn run(&mut self, opts: &RunOptions) -> Result<RunResult, SolverError> {
        if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
            return Err(SolverError::InvalidOptions(format!("t_final must be positive, got {}", opts.t_final)));
        }
        if opts.n_outputs == 0 {
            return Err(SolverError::InvalidOptions("n_outputs must be at least 1".into()));
        }
        if let Some(dt) = opts.dt_override {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SolverError::InvalidOptions(format!("dt_override must be positive, got {dt}")));
            }
        }
        let n = self.grid.n_cols();
        let nx = self.grid.nx;
        let dt_raw = opts.dt_override.unwrap_or_else(|| self.auto_dt());
        let interval = opts.t_final / opts.n_outputs as f64;
        let spi = (interval / dt_raw).ceil().max(1.0) as usize;
        let dt = interval / spi as f64;
        let steps = spi * opts.n_outputs;
        let updates = (nx * n) as f64 * steps as f64;
        if updates > UPDATE_BUDGET && !opts.force_budget {
            return Err(SolverError::BudgetExceeded { updates, budget: UPDATE_BUDGET });
        }

        let start = Instant::now();
        let len = nx * n;
        let mut prev = WaveField::zeros(len);
        let mut curr = WaveField::zeros(len);
        let mut next = WaveField::zeros(len);
        self.sample_exact_into(0.0, &mut prev);
        self.sample_exact_into(dt, &mut curr);
        let active = (nx - 1) * n;
        let init_sup = Self::sup_abs(&prev, active).max(1.0);

        let mut records = Vec::with_capacity(opts.n_outputs + 1);
        records.push(self.make_record(0.0, &prev, (&prev, &curr), dt, opts));
        if spi == 1 {
            records.push(self.make_record(dt, &curr, (&prev, &curr), dt, opts));
        }

        for m in 1..steps {
            let t = m as f64 * dt;
            self.step(&prev, &curr, &mut next, t, dt);
            std::mem::swap(&mut prev, &mut curr);
            std::mem::swap(&mut curr, &mut next);
            let idx = m + 1;
            if idx % STABILITY_CHECK_EVERY == 0 || idx == steps {
                let sup = Self::sup_abs(&curr, active);
                if !sup.is_finite() || sup > INSTABILITY_FACTOR * init_sup {
                    return Err(SolverError::Unstable { t: idx as f64 * dt, sup });
                }
            }
            if idx % spi == 0 {
                records.push(self.make_record(idx as f64 * dt, &curr, (&prev, &curr), dt, opts));
            }
        }

        Ok(RunResult {
            records,
            dt,
            steps,
            t_final: steps as f64 * dt,
            wall_seconds: start.elapsed().as_secs_f64(),
            field: curr,
        })
    }
}

/// Deterministic pseudo-random start vector for the spectral estimate.
fn test_vector(nx: usize, n: usize) -> WaveField {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
    };
    let len = nx * n;
    WaveField { u: (0..len).map(|_| next()).collect(), v: (0..len).map(|_| next()).collect() }
}

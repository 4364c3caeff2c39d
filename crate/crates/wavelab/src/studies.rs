//! Experiment orchestration: surface-mode tables, single runs, convergence
//! and scaling studies, mode-conversion resolution studies, boundary-response
//! sweeps, and resolution predictions checked against measured phase errors.
//!
//! Study members are independent solver runs and execute in parallel; result
//! rows are assembled in input order afterwards, so output bytes do not
//! depend on the degree of parallelism.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use halfplane::boundary::{
    boundary_estimate_bound, required_points_per_wavelength, solve_boundary_system,
    unscaled_residual, BoundaryData, TruncationCoeffs, DEFAULT_ESTIMATE_K,
};
use halfplane::dispersion::{find_rayleigh_mode, scaled_mode};
use halfplane::exact::PlaneWaveKind;
use halfplane::material::Material;
use halfplane::solver::problems::{
    ModeConversionProblem, PlaneWaveProblem, Problem, RayleighProblem,
};
use halfplane::solver::{Grid, RunOptions, RunResult, SchemeOrder, Solver, WaveField};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Surface-wave frequency used by all Rayleigh experiments: one wavelength
/// per unit length.
pub const RAYLEIGH_OMEGA: f64 = 2.0 * PI;

/// Minimum resolution accepted for a production run; below this the run is
/// too under-resolved to mean anything.
pub const MIN_PPW: usize = 10;

/// One row of the standard time-series output.
#[derive(Debug, Clone, Copy)]
pub struct TimeRow {
    pub t: f64,
    pub err_u: f64,
    pub err_v: f64,
    pub energy: f64,
}

/// A completed run with its error history.
#[derive(Debug)]
pub struct TimeSeries {
    pub rows: Vec<TimeRow>,
    pub dt: f64,
    pub steps: usize,
    pub wall_seconds: f64,
    /// Final-time normalized sup error, max over both components.
    pub final_err: f64,
    /// Points per wavelength of the member (context for study rows).
    pub ppw: f64,
    /// Field and grid kept for trace post-processing.
    pub field: WaveField,
    pub grid: Grid,
}

fn series_from(result: RunResult, ppw: f64, grid: Grid) -> TimeSeries {
    let rows = result
        .records
        .iter()
        .map(|r| {
            let (err_u, err_v) = match r.err {
                Some(e) => (e.u, e.v),
                None => (f64::NAN, f64::NAN),
            };
            TimeRow { t: r.t, err_u, err_v, energy: r.energy.unwrap_or(f64::NAN) }
        })
        .collect();
    let final_err = result
        .records
        .last()
        .and_then(|r| r.err)
        .map(|e| e.combined)
        .unwrap_or(f64::NAN);
    TimeSeries {
        rows,
        dt: result.dt,
        steps: result.steps,
        wall_seconds: result.wall_seconds,
        final_err,
        ppw,
        field: result.field,
        grid,
    }
}

/// Surface-mode table rows: ratio, xi0^2, kappa10/|w|, kappa20/|w|, |phi'|.
pub fn dispersion_table_rows(ratios: &[f64]) -> Vec<[f64; 5]> {
    ratios
        .iter()
        .map(|&r| {
            let m = scaled_mode(r);
            [r, m.sigma, m.kappa10_over_w, m.kappa20_over_w, m.phi_prime_abs]
        })
        .collect()
}

/// Parameters of one surface-wave run.
#[derive(Debug, Clone)]
pub struct RayleighRun {
    pub lambda: f64,
    pub mu: f64,
    pub order: SchemeOrder,
    pub ppw: usize,
    /// Integration time; [`RayleighRun::for_periods`] derives it from the
    /// surface-wave period.
    pub t_final: f64,
    pub lx: f64,
    pub n_outputs: usize,
    pub record_energy: bool,
    pub force: bool,
}

impl RayleighRun {
    pub fn material(&self) -> Result<Material> {
        Material::new(self.lambda, self.mu).context("invalid material")
    }

    /// The surface-wave period at these material parameters.
    pub fn period(&self) -> Result<f64> {
        Ok(RayleighProblem::new(self.material()?, RAYLEIGH_OMEGA).period())
    }

    /// Sets t_final to a whole number of surface-wave periods.
    pub fn for_periods(mut self, n: f64) -> Result<Self> {
        self.t_final = n * self.period()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.ppw < MIN_PPW {
            bail!("ppw = {} is under-resolved; the minimum is {MIN_PPW}", self.ppw);
        }
        if !(self.t_final > 0.0) {
            bail!("t_final must be positive, got {}", self.t_final);
        }
        if !(self.lx > 0.0) {
            bail!("lx must be positive, got {}", self.lx);
        }
        Ok(())
    }
}

/// Runs one Rayleigh experiment: unit wavelength in y, grid spacing 1/ppw,
/// strip depth lx, initial data and far-edge data from the exact wave.
pub fn run_rayleigh(run: &RayleighRun) -> Result<TimeSeries> {
    run.validate()?;
    let material = run.material()?;
    let problem = RayleighProblem::new(material, RAYLEIGH_OMEGA);
    let grid = Grid::strip(run.lx, 1.0, run.ppw + 1)?;
    let mut solver = Solver::new(grid, run.order, &problem)?;
    let opts = RunOptions {
        t_final: run.t_final,
        n_outputs: run.n_outputs,
        record_energy: run.record_energy,
        force_budget: run.force,
        dt_override: None,
    };
    let result = solver.run(&opts)?;
    Ok(series_from(result, run.ppw as f64, grid))
}

/// One row of a resolution study.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub label: String,
    pub ppw: f64,
    pub err: f64,
    /// log2(err_coarse/err_fine) against the previous row; NaN on the first.
    pub observed_order: f64,
    pub wall_seconds: f64,
}

fn attach_orders(rows: &mut [StudyRow]) {
    for i in 1..rows.len() {
        rows[i].observed_order = (rows[i - 1].err / rows[i].err).log2();
    }
}

/// Runs the base configuration at ppw, 2*ppw, 4*ppw, ... and reports the
/// final-time errors with observed orders between consecutive doublings.
pub fn convergence_study(base: &RayleighRun, refinements: usize) -> Result<Vec<StudyRow>> {
    if refinements < 2 {
        bail!("a convergence study needs at least 2 refinement levels, got {refinements}");
    }
    let members: Vec<RayleighRun> = (0..refinements)
        .map(|k| RayleighRun { ppw: base.ppw << k, ..base.clone() })
        .collect();
    let series: Vec<Result<TimeSeries>> = members.par_iter().map(run_rayleigh).collect();
    let mut rows = Vec::with_capacity(refinements);
    for (member, s) in members.iter().zip(series) {
        let s = s?;
        rows.push(StudyRow {
            label: format!("ppw={}", member.ppw),
            ppw: member.ppw as f64,
            err: s.final_err,
            observed_order: f64::NAN,
            wall_seconds: s.wall_seconds,
        });
    }
    attach_orders(&mut rows);
    Ok(rows)
}

/// Scaling-law study output: per-member error curves on a shared t/T axis.
#[derive(Debug)]
pub struct ScalingStudy {
    /// (mu, ppw) of each member, in input order.
    pub pairs: Vec<(f64, usize)>,
    /// Shared scaled time axis t/T (one entry per output, t = 0 included).
    pub t_over_period: Vec<f64>,
    /// Combined normalized error curves, one per member.
    pub curves: Vec<Vec<f64>>,
    /// Max over t/T > 0 of (largest/smallest) error across members.
    pub max_ratio: f64,
    pub wall_seconds: Vec<f64>,
}

/// Checks the resolution-invariance rule and runs each (mu, ppw) pair for
/// `n_periods` of its own surface-wave period.
///
/// The rule is ppw*sqrt(mu) = const for the second-order scheme and
/// ppw*mu^(1/4) = const for the fourth-order one; pairs off by more than 5%
/// are rejected because their curves are not comparable.
pub fn scaling_study(
    order: SchemeOrder,
    lambda: f64,
    pairs: &[(f64, usize)],
    n_periods: usize,
    samples_per_period: usize,
    lx_for: impl Fn(f64) -> f64,
    force: bool,
) -> Result<ScalingStudy> {
    if pairs.is_empty() {
        bail!("scaling study needs at least one (mu, ppw) pair");
    }
    if n_periods == 0 || samples_per_period == 0 {
        bail!("n_periods and samples_per_period must be positive");
    }
    let invariant = |mu: f64, p: usize| match order {
        SchemeOrder::Two => p as f64 * mu.sqrt(),
        SchemeOrder::Four => p as f64 * mu.powf(0.25),
    };
    let inv: Vec<f64> = pairs.iter().map(|&(mu, p)| invariant(mu, p)).collect();
    let (lo, hi) = inv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > 1.05 * lo {
        bail!(
            "pairs break the resolution-invariance rule by more than 5%: \
             invariants range over [{lo:.4}, {hi:.4}]"
        );
    }

    let members: Vec<RayleighRun> = pairs
        .iter()
        .map(|&(mu, ppw)| {
            RayleighRun {
                lambda,
                mu,
                order,
                ppw,
                t_final: 0.0,
                lx: lx_for(mu),
                n_outputs: n_periods * samples_per_period,
                record_energy: false,
                force,
            }
            .for_periods(n_periods as f64)
        })
        .collect::<Result<_>>()?;
    let series: Vec<Result<TimeSeries>> = members.par_iter().map(run_rayleigh).collect();

    let t_over_period: Vec<f64> = (0..=n_periods * samples_per_period)
        .map(|k| k as f64 / samples_per_period as f64)
        .collect();
    let mut curves = Vec::with_capacity(members.len());
    let mut walls = Vec::with_capacity(members.len());
    for s in series {
        let s = s?;
        curves.push(s.rows.iter().map(|r| r.err_u.max(r.err_v)).collect::<Vec<f64>>());
        walls.push(s.wall_seconds);
    }
    let mut max_ratio = 1.0f64;
    for k in 1..t_over_period.len() {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for curve in &curves {
            lo = lo.min(curve[k]);
            hi = hi.max(curve[k]);
        }
        if lo > 0.0 {
            max_ratio = max_ratio.max(hi / lo);
        }
    }
    Ok(ScalingStudy { pairs: pairs.to_vec(), t_over_period, curves, max_ratio, wall_seconds: walls })
}

/// Parameters of one mode-conversion run: an S wave leaving the free surface
/// fed by the traction data of the full reflection solution.
#[derive(Debug, Clone)]
pub struct ModeconvRun {
    pub lambda: f64,
    pub mu: f64,
    pub order: SchemeOrder,
    /// Points per shear wavelength.
    pub ps: usize,
    /// Incidence angle in (0, pi/2).
    pub angle: f64,
    pub n_periods: f64,
    pub n_outputs: usize,
    pub force: bool,
}

/// Runs one mode-conversion experiment on the canonical two-wavelength
/// domain (ly = 4*pi/sin(angle), lx = 4*pi/cos(angle)) with grid spacing set
/// by the shear wavelength: h = l_s/ps.
pub fn run_modeconv(run: &ModeconvRun) -> Result<TimeSeries> {
    if run.ps < MIN_PPW {
        bail!("ps = {} is under-resolved; the minimum is {MIN_PPW}", run.ps);
    }
    if !(run.n_periods > 0.0) {
        bail!("n_periods must be positive, got {}", run.n_periods);
    }
    let material = Material::new(run.lambda, run.mu).context("invalid material")?;
    let problem = ModeConversionProblem::new(material, run.angle)?;
    let spec = problem.spec();
    let h_target = spec.l_s() / run.ps as f64;
    let ny = (spec.l_y() / h_target).round() as usize + 1;
    let grid = Grid::strip(spec.l_x(), spec.l_y(), ny)?;
    let mut solver = Solver::new(grid, run.order, &problem)?;
    let opts = RunOptions {
        t_final: run.n_periods * problem.period(),
        n_outputs: run.n_outputs,
        record_energy: false,
        force_budget: run.force,
        dt_override: None,
    };
    let result = solver.run(&opts)?;
    Ok(series_from(result, run.ps as f64, grid))
}

/// Resolution study for the mode-conversion problem: all (mu, ps)
/// combinations at a fixed angle, error at `n_periods` periods, observed
/// order attached within each material as ps doubles.
pub fn modeconv_study(
    lambda: f64,
    mus: &[f64],
    angle: f64,
    ps_list: &[usize],
    order: SchemeOrder,
    n_periods: f64,
    force: bool,
) -> Result<Vec<StudyRow>> {
    if mus.is_empty() || ps_list.is_empty() {
        bail!("modeconv study needs at least one material and one resolution");
    }
    let members: Vec<ModeconvRun> = mus
        .iter()
        .flat_map(|&mu| {
            ps_list.iter().map(move |&ps| ModeconvRun {
                lambda,
                mu,
                order,
                ps,
                angle,
                n_periods,
                n_outputs: 5,
                force,
            })
        })
        .collect();
    let series: Vec<Result<TimeSeries>> = members.par_iter().map(run_modeconv).collect();
    let mut rows = Vec::with_capacity(members.len());
    for (member, s) in members.iter().zip(series) {
        let s = s?;
        rows.push(StudyRow {
            label: format!("mu={},ps={}", member.mu, member.ps),
            ppw: member.ps as f64,
            err: s.final_err,
            observed_order: f64::NAN,
            wall_seconds: s.wall_seconds,
        });
    }
    // Orders within each material block (ps_list order, doubling assumed).
    for chunk in rows.chunks_mut(ps_list.len()) {
        attach_orders(chunk);
    }
    Ok(rows)
}

/// Relative phase offset between two single-harmonic traces sharing one full
/// period over their length, as a fraction of a period.
///
/// # Method
/// For sinusoidal traces the continuous cross-correlation in the shift is
/// itself sinusoidal, so its maximizer is the phase difference of the
/// fundamental Fourier bin; that bin is evaluated directly and the arg
/// difference wrapped to (-1/2, 1/2] periods.
pub fn relative_phase_offset(numeric: &[f64], exact: &[f64]) -> f64 {
    assert_eq!(numeric.len(), exact.len());
    assert!(numeric.len() >= 4, "trace too short for phase extraction");
    let n = numeric.len();
    let bin = |f: &[f64]| -> C64 {
        let mut z = C64::new(0.0, 0.0);
        for (j, &v) in f.iter().enumerate() {
            let ang = -2.0 * PI * j as f64 / n as f64;
            z += v * C64::new(ang.cos(), ang.sin());
        }
        z
    };
    let cross = bin(numeric) * bin(exact).conj();
    cross.arg() / (2.0 * PI)
}

/// Prediction report: the resolution rule's points-per-wavelength for a
/// target phase error, and the phase error actually measured at that
/// resolution after one period.
#[derive(Debug)]
pub struct PredictReport {
    pub eps_target: f64,
    pub alpha0: f64,
    /// Points per wavelength from the resolution rule, rounded up.
    pub ppw: usize,
    /// The rule's phase-error level re-evaluated at the integer ppw.
    pub eps_at_ppw: f64,
    /// Measured |phase offset| of the surface trace after one period, as a
    /// fraction of a period.
    pub measured_phase: f64,
    pub wall_seconds: f64,
}

/// Computes the resolution predicted for phase error `eps`, runs one period
/// at that resolution, and measures the surface-trace phase offset.
pub fn predict_vs_measure(
    lambda: f64,
    mu: f64,
    order: SchemeOrder,
    eps: f64,
    alpha0: f64,
    lx: f64,
    force: bool,
) -> Result<PredictReport> {
    if !(eps > 0.0 && eps < 0.5) {
        bail!("eps must lie in (0, 0.5), got {eps}");
    }
    let material = Material::new(lambda, mu).context("invalid material")?;
    let coeffs = match order {
        SchemeOrder::Two => TruncationCoeffs::order2(0.0, 0.0, 1.0).with_alpha0(alpha0),
        SchemeOrder::Four => TruncationCoeffs::order4(0.0, 0.0, 1.0).with_alpha0(alpha0),
    };
    let p_rule = required_points_per_wavelength(&material, eps, &coeffs);
    let ppw = (p_rule.ceil() as usize).max(MIN_PPW);
    let lam_tilde = lambda / mu;
    let eps_at_ppw = match order {
        SchemeOrder::Two => lam_tilde * alpha0.abs() * (RAYLEIGH_OMEGA / ppw as f64).powi(2),
        SchemeOrder::Four => lam_tilde * alpha0.abs() * (RAYLEIGH_OMEGA / ppw as f64).powi(4),
    };

    let run = RayleighRun {
        lambda,
        mu,
        order,
        ppw,
        t_final: 0.0,
        lx,
        n_outputs: 1,
        record_energy: false,
        force,
    }
    .for_periods(1.0)?;
    let series = run_rayleigh(&run)?;
    let material = Material::new(lambda, mu)?;
    let problem = RayleighProblem::new(material, RAYLEIGH_OMEGA);
    let n = series.grid.n_cols();
    let numeric: Vec<f64> = series.field.u[..n].to_vec();
    let exact: Vec<f64> = (0..n)
        .map(|j| problem.exact(0.0, series.grid.y(j), run.t_final).0)
        .collect();
    let measured_phase = relative_phase_offset(&numeric, &exact).abs();
    Ok(PredictReport {
        eps_target: eps,
        alpha0,
        ppw,
        eps_at_ppw,
        measured_phase,
        wall_seconds: series.wall_seconds,
    })
}

/// Boundary-response sweep toward the surface resonance: s = eta + i*c_r*w
/// with eta on a log grid, fixed data g1 = 1, g2 = 0.7i. Rows are
/// `eta, abs_u01, abs_u02, abs_u0, abs_v0, residual, bound` where bound is
/// the a-priori trace estimate with the default constant.
pub fn boundary_sweep_rows(lambda: f64, mu: f64, omega: f64, n_points: usize) -> Result<Vec<[f64; 7]>> {
    if n_points < 2 {
        bail!("sweep needs at least 2 points, got {n_points}");
    }
    if !(omega != 0.0 && omega.is_finite()) {
        bail!("omega must be nonzero and finite, got {omega}");
    }
    let material = Material::new(lambda, mu).context("invalid material")?;
    let mode = find_rayleigh_mode(&material);
    let g1 = C64::new(1.0, 0.0);
    let g2 = C64::new(0.0, 0.7);
    let (eta_lo, eta_hi) = (1e-4f64, 1e-1f64);
    let step = (eta_hi / eta_lo).powf(1.0 / (n_points - 1) as f64);
    let mut rows = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let eta = eta_lo * step.powi(k as i32);
        let data = BoundaryData {
            g1_hat: g1,
            g2_hat: g2,
            s: C64::new(eta, mode.c_r * omega),
            omega,
        };
        let resp = solve_boundary_system(&data, &material)?;
        let residual = unscaled_residual(&data, &material, &resp);
        let bound = boundary_estimate_bound(&data, &material, eta, DEFAULT_ESTIMATE_K);
        rows.push([
            eta,
            resp.u01_hat.norm(),
            resp.u02_hat.norm(),
            resp.u_at_0.norm(),
            resp.v_at_0.norm(),
            residual,
            bound,
        ]);
    }
    Ok(rows)
}

/// Which closed-form field `exact sample` dumps.
#[derive(Debug, Clone, Copy)]
pub enum SampleProblem {
    Rayleigh,
    Modeconv { angle: f64 },
    PlaneP,
    PlaneS,
}

/// Samples a closed-form field on the run grid at time t; rows `x,y,u,v`.
pub fn exact_sample_rows(
    problem: SampleProblem,
    lambda: f64,
    mu: f64,
    ppw: usize,
    lx: f64,
    t: f64,
) -> Result<Vec<[f64; 4]>> {
    if ppw < 3 {
        bail!("ppw = {ppw} is too coarse to sample");
    }
    let material = Material::new(lambda, mu).context("invalid material")?;
    let boxed: Box<dyn Problem> = match problem {
        SampleProblem::Rayleigh => Box::new(RayleighProblem::new(material, RAYLEIGH_OMEGA)),
        SampleProblem::Modeconv { angle } => Box::new(ModeConversionProblem::new(material, angle)?),
        SampleProblem::PlaneP => {
            Box::new(PlaneWaveProblem::new(material, PlaneWaveKind::P, 1.0, RAYLEIGH_OMEGA, 1.0))
        }
        SampleProblem::PlaneS => {
            Box::new(PlaneWaveProblem::new(material, PlaneWaveKind::S, 1.0, RAYLEIGH_OMEGA, 1.0))
        }
    };
    let (ly, lx) = match problem {
        SampleProblem::Modeconv { angle } => {
            let spec = halfplane::exact::solve_reflection(&material, angle)?;
            (spec.l_y(), spec.l_x())
        }
        _ => (1.0, lx),
    };
    let h = ly / ppw as f64;
    let ny = ppw + 1;
    let nx = (lx / h).round() as usize + 1;
    let mut rows = Vec::with_capacity(nx * (ny - 1));
    for i in 0..nx {
        let x = i as f64 * h;
        for j in 0..ny - 1 {
            let y = j as f64 * h;
            let (u, v) = boxed.exact(x, y, t);
            rows.push([x, y, u, v]);
        }
    }
    Ok(rows)
}

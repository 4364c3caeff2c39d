//! Command-line laboratory for elastic waves on a half-plane.
//!
//! Subcommands: `dispersion table`, `rayleigh run|converge|scale`,
//! `modeconv run`, `boundary sweep`, `predict`, `exact sample`. Every flag
//! can also come from a flat `key = value` config file (`--config`); the
//! flag wins. CSV goes to `--out` or stdout; human summaries go to stderr.
//! Exit codes: 0 success, 1 validation or input error, 2 numerical abort.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use halfplane::solver::{SchemeOrder, SolverError};
use wavelab::config::FileConfig;
use wavelab::output::{fmt_f64, write_table, Sink};
use wavelab::studies::{self, ModeconvRun, RayleighRun, SampleProblem};

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Elastic wave experiments on a half-plane strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Surface-mode analysis tables.
    Dispersion {
        #[command(subcommand)]
        sub: DispersionCmd,
    },
    /// Surface-wave experiments.
    Rayleigh {
        #[command(subcommand)]
        sub: RayleighCmd,
    },
    /// Mode-conversion experiments (S wave leaving a free surface).
    Modeconv {
        #[command(subcommand)]
        sub: ModeconvCmd,
    },
    /// Transformed boundary-response sweeps.
    Boundary {
        #[command(subcommand)]
        sub: BoundaryCmd,
    },
    /// Resolution prediction vs measured phase error.
    Predict(PredictArgs),
    /// Closed-form field sampling.
    Exact {
        #[command(subcommand)]
        sub: ExactCmd,
    },
}

/// Flags shared by every experiment subcommand. Each has a config-file key
/// of the same name (dashes as underscores).
#[derive(Args, Debug, Default)]
struct Common {
    /// First Lame parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// Shear modulus.
    #[arg(long)]
    mu: Option<f64>,
    /// Scheme order: 2 or 4.
    #[arg(long)]
    order: Option<u32>,
    /// Grid points per wavelength.
    #[arg(long)]
    ppw: Option<usize>,
    /// Integration time; takes precedence over --periods.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Integration time in problem periods.
    #[arg(long)]
    periods: Option<f64>,
    /// Strip depth.
    #[arg(long)]
    lx: Option<f64>,
    /// Incidence angle in radians (mode conversion).
    #[arg(long)]
    angle: Option<f64>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key = value config file; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run past the desk-scale update budget.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum DispersionCmd {
    /// Emit the surface-mode constants per stiffness ratio as CSV.
    Table {
        /// Comma-separated lambda/mu ratios; `inf` for the incompressible
        /// limit.
        #[arg(long = "lam-over-mu", value_delimiter = ',')]
        lam_over_mu: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum RayleighCmd {
    /// One surface-wave run; time series CSV `t,max_err_u,max_err_v,energy`.
    Run(Common),
    /// Refinement study at ppw, 2*ppw, ...; CSV with observed orders.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Number of refinement levels (>= 2).
        #[arg(long)]
        refinements: Option<usize>,
    },
    /// Resolution-invariance study across (mu, ppw) pairs.
    Scale {
        #[command(flatten)]
        common: Common,
        /// Pair `mu:ppw`; repeat for each member. Defaults depend on order.
        #[arg(long = "pair")]
        pairs: Vec<String>,
    },
    }

#[derive(Subcommand)]
enum ModeconvCmd {
    /// One mode-conversion run; time series CSV.
    Run(Common),
}

#[derive(Subcommand)]
enum BoundaryCmd {
    /// Response magnitudes approaching the surface resonance.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Transform frequency of the sweep.
        #[arg(long)]
        omega: Option<f64>,
        /// Number of sweep points.
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    /// Target phase error per period, in (0, 0.5).
    #[arg(long)]
    eps: Option<f64>,
    /// Composite boundary-truncation magnitude of the scheme.
    #[arg(long)]
    alpha0: Option<f64>,
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Dump a closed-form field on a grid as CSV `x,y,u,v`.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Which field: rayleigh | modeconv | plane-p | plane-s.
        #[arg(long)]
        problem: Option<String>,
        /// Sampling time.
        #[arg(long)]
        t: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs, not errors.
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_numerical_abort(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// A run that blew up mid-integration is a numerical abort (exit 2);
/// everything else (bad flags, bad config, refused budgets, I/O) is a
/// validation error (exit 1).
fn is_numerical_abort(err: &anyhow::Error) -> bool {
    err.chain()
        .any(|cause| matches!(cause.downcast_ref::<SolverError>(), Some(SolverError::Unstable { .. })))
}

fn load_config(path: Option<&PathBuf>) -> Result<FileConfig> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

fn parse_order(raw: u32) -> Result<SchemeOrder> {
    match raw {
        2 => Ok(SchemeOrder::Two),
        4 => Ok(SchemeOrder::Four),
        other => bail!("order must be 2 or 4, got {other}"),
    }
}

/// Layered experiment parameters: flag, else config key, else default.
struct Resolved {
    lambda: f64,
    mu: f64,
    order: SchemeOrder,
    ppw: usize,
    t_final: Option<f64>,
    periods: f64,
    lx: f64,
    angle: f64,
    out: Option<PathBuf>,
    force: bool,
    cfg: FileConfig,
}

impl Resolved {
    fn new(common: &Common, default_order: u32, default_ppw: usize, default_lx: f64) -> Result<Resolved> {
        let cfg = load_config(common.config.as_ref())?;
        let order_raw = cfg.resolve(common.order, "order", default_order)?;
        let out = match &common.out {
            Some(p) => Some(p.clone()),
            None => cfg.get_str("out").map(PathBuf::from),
        };
        Ok(Resolved {
            lambda: cfg.resolve(common.lambda, "lambda", 1.0)?,
            mu: cfg.resolve(common.mu, "mu", 0.1)?,
            order: parse_order(order_raw)?,
            ppw: cfg.resolve(common.ppw, "ppw", default_ppw)?,
            t_final: cfg.resolve_opt(common.t_final, "t_final")?,
            periods: cfg.resolve(common.periods, "periods", 1.0)?,
            lx: cfg.resolve(common.lx, "lx", default_lx)?,
            angle: cfg.resolve(common.angle, "angle", std::f64::consts::FRAC_PI_4)?,
            out: out,
            force: common.force || cfg.get("force")?.unwrap_or(false),
            cfg,
        })
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dispersion { sub } => match sub {
            DispersionCmd::Table { lam_over_mu, out, config } => dispersion_table(lam_over_mu, out, config),
        },
        Command::Rayleigh { sub } => match sub {
            RayleighCmd::Run(common) => rayleigh_run(&common),
            RayleighCmd::Converge { common, refinements } => rayleigh_converge(&common, refinements),
            RayleighCmd::Scale { common, pairs } => rayleigh_scale(&common, pairs),
        },
        Command::Modeconv { sub } => match sub {
            ModeconvCmd::Run(common) => modeconv_run_cmd(&common),
        },
        Command::Boundary { sub } => match sub {
            BoundaryCmd::Sweep { common, omega, points } => boundary_sweep_cmd(&common, omega, points),
        },
        Command::Predict(args) => predict_cmd(&args),
        Command::Exact { sub } => match sub {
            ExactCmd::Sample { common, problem, t } => exact_sample_cmd(&common, problem, t),
        },
    }
}

fn dispersion_table(ratios_raw: Vec<String>, out: Option<PathBuf>, config: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(config.as_ref())?;
    let raw: Vec<String> = if ratios_raw.is_empty() {
        match cfg.get_str("lam_over_mu") {
            Some(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            None => ["0", "1", "4", "8", "inf"].iter().map(|s| s.to_string()).collect(),
        }
    } else {
        ratios_raw
    };
    let ratios: Vec<f64> = raw
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| anyhow!("ratio `{s}` is not a number (use `inf` for the limit)"))
        })
        .collect::<Result<_>>()?;
    if ratios.iter().any(|&r| r < 0.0 || r.is_nan()) {
        bail!("ratios must be nonnegative");
    }
    let out = out.or_else(|| cfg.get_str("out").map(PathBuf::from));
    let rows: Vec<Vec<f64>> = studies::dispersion_table_rows(&ratios)
        .into_iter()
        .map(|r| r.to_vec())
        .collect();
    write_table(out.as_deref(), "lam_over_mu,xi0_sq,kappa10,kappa20,abs_phi_prime", &rows)
}

fn emit_timeseries(series: &wavelab::studies::TimeSeries, out: Option<&PathBuf>) -> Result<()> {
    let mut sink = Sink::open(out.map(|p| p.as_path()))?;
    sink.header("t,max_err_u,max_err_v,energy")?;
    for row in &series.rows {
        sink.row(&[fmt_f64(row.t), fmt_f64(row.err_u), fmt_f64(row.err_v), fmt_f64(row.energy)])?;
    }
    sink.finish()
}

fn rayleigh_run(common: &Common) -> Result<()> {
    let r = Resolved::new(common, 2, 50, 10.0)?;
    let mut run = RayleighRun {
        lambda: r.lambda,
        mu: r.mu,
        order: r.order,
        ppw: r.ppw,
        t_final: 0.0,
        lx: r.lx,
        n_outputs: r.cfg.resolve(None, "n_outputs", 10)?,
        record_energy: true,
        force: r.force,
    };
    run.t_final = match r.t_final {
        Some(t) => t,
        None => run.period()? * r.periods,
    };
    let series = studies::run_rayleigh(&run)?;
    eprintln!(
        "rayleigh run: ppw={} dt={} steps={} final_err={} wall={:.3}s",
        run.ppw,
        fmt_f64(series.dt),
        series.steps,
        fmt_f64(series.final_err),
        series.wall_seconds
    );
    emit_timeseries(&series, r.out.as_ref())
}

fn rayleigh_converge(common: &Common, refinements: Option<usize>) -> Result<()> {
    let r = Resolved::new(common, 2, 25, 10.0)?;
    let refinements = r.cfg.resolve(refinements, "refinements", 3)?;
    let mut base = RayleighRun {
        lambda: r.lambda,
        mu: r.mu,
        order: r.order,
        ppw: r.ppw,
        t_final: 0.0,
        lx: r.lx,
        n_outputs: 1,
        record_energy: false,
        force: r.force,
    };
    base.t_final = match r.t_final {
        Some(t) => t,
        None => base.period()? * r.periods,
    };
    let rows = studies::convergence_study(&base, refinements)?;
    for row in &rows {
        eprintln!(
            "converge: {} err={} order={} wall={:.3}s",
            row.label,
            fmt_f64(row.err),
            fmt_f64(row.observed_order),
            row.wall_seconds
        );
    }
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.ppw, r.err, r.observed_order, r.wall_seconds])
        .collect();
    write_table(r.out.as_deref(), "ppw,max_err,observed_order,wall_seconds", &table)
}

fn parse_pairs(raw: &[String]) -> Result<Vec<(f64, usize)>> {
    raw.iter()
        .map(|s| {
            let (mu, p) = s
                .split_once(':')
                .ok_or_else(|| anyhow!("pair `{s}` must look like mu:ppw, e.g. 0.1:40"))?;
            Ok((
                mu.trim().parse::<f64>().map_err(|e| anyhow!("pair `{s}`: bad mu: {e}"))?,
                p.trim().parse::<usize>().map_err(|e| anyhow!("pair `{s}`: bad ppw: {e}"))?,
            ))
        })
        .collect()
}

fn rayleigh_scale(common: &Common, pairs_raw: Vec<String>) -> Result<()> {
    let r = Resolved::new(common, 2, 40, 5.0)?;
    let pairs_raw: Vec<String> = if pairs_raw.is_empty() {
        match r.cfg.get_str("pairs") {
            Some(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            None => match r.order {
                SchemeOrder::Two => vec!["0.1:40".into(), "0.01:126".into()],
                SchemeOrder::Four => vec!["0.1:12".into(), "0.001:38".into()],
            },
        }
    } else {
        pairs_raw
    };
    let pairs = parse_pairs(&pairs_raw)?;
    let n_periods = r.periods.round().max(1.0) as usize;
    let samples = r.cfg.resolve(None, "samples_per_period", 5)?;
    // Deeper strips for softer materials unless overridden: the surface wave
    // decays like exp(-2*pi*0.2955*x) in the incompressible limit, so lx = 6
    // keeps the truncated tail below the study tolerances.
    let lx_flag = r.t_final.is_none() && common.lx.is_none() && r.cfg.get_str("lx").is_none();
    let lx = r.lx;
    let study = studies::scaling_study(
        r.order,
        r.lambda,
        &pairs,
        n_periods,
        samples,
        move |mu| if lx_flag && mu < 0.01 { 6.0 } else { lx },
        r.force,
    )?;
    eprintln!("scale: max error ratio across members = {}", fmt_f64(study.max_ratio));
    for (k, &(mu, ppw)) in study.pairs.iter().enumerate() {
        eprintln!("scale: member mu={mu} ppw={ppw} wall={:.3}s", study.wall_seconds[k]);
    }
    let mut table = Vec::new();
    for (k, &(mu, ppw)) in study.pairs.iter().enumerate() {
        for (i, &tt) in study.t_over_period.iter().enumerate() {
            table.push(vec![mu, ppw as f64, tt, study.curves[k][i]]);
        }
    }
    write_table(r.out.as_deref(), "mu,ppw,t_over_period,max_err", &table)
}

fn modeconv_run_cmd(common: &Common) -> Result<()> {
    let r = Resolved::new(common, 4, 16, 0.0)?;
    let run = ModeconvRun {
        lambda: r.lambda,
        mu: r.mu,
        order: r.order,
        ps: r.ppw,
        angle: r.angle,
        n_periods: r.periods,
        n_outputs: r.cfg.resolve(None, "n_outputs", 10)?,
        force: r.force,
    };
    let series = studies::run_modeconv(&run)?;
    eprintln!(
        "modeconv run: ps={} dt={} steps={} final_err={} wall={:.3}s",
        run.ps,
        fmt_f64(series.dt),
        series.steps,
        fmt_f64(series.final_err),
        series.wall_seconds
    );
    emit_timeseries(&series, r.out.as_ref())
}

fn boundary_sweep_cmd(common: &Common, omega: Option<f64>, points: Option<usize>) -> Result<()> {
    let r = Resolved::new(common, 2, 10, 1.0)?;
    let omega = r.cfg.resolve(omega, "omega", 1.0)?;
    let points = r.cfg.resolve(points, "points", 25)?;
    let rows: Vec<Vec<f64>> = studies::boundary_sweep_rows(r.lambda, r.mu, omega, points)?
        .into_iter()
        .map(|row| row.to_vec())
        .collect();
    write_table(r.out.as_deref(), "eta,abs_u01,abs_u02,abs_u0,abs_v0,residual,bound", &rows)
}

fn predict_cmd(args: &PredictArgs) -> Result<()> {
    let r = Resolved::new(&args.common, 2, 10, 5.0)?;
    let eps = r
        .cfg
        .resolve_opt(args.eps, "eps")?
        .ok_or_else(|| anyhow!("predict needs --eps (target phase error per period)"))?;
    let alpha0 = r.cfg.resolve(args.alpha0, "alpha0", 1.0)?;
    let report = studies::predict_vs_measure(r.lambda, r.mu, r.order, eps, alpha0, r.lx, r.force)?;
    eprintln!(
        "predict: ppw={} rule eps at ppw={} measured phase={} wall={:.3}s",
        report.ppw,
        fmt_f64(report.eps_at_ppw),
        fmt_f64(report.measured_phase),
        report.wall_seconds
    );
    write_table(
        r.out.as_deref(),
        "eps,alpha0,ppw,eps_at_ppw,measured_phase,wall_seconds",
        &[vec![
            report.eps_target,
            report.alpha0,
            report.ppw as f64,
            report.eps_at_ppw,
            report.measured_phase,
            report.wall_seconds,
        ]],
    )
}

fn exact_sample_cmd(common: &Common, problem: Option<String>, t: Option<f64>) -> Result<()> {
    let r = Resolved::new(common, 2, 20, 2.0)?;
    let name = match &problem {
        Some(p) => p.clone(),
        None => r.cfg.get_str("problem").unwrap_or("rayleigh").to_string(),
    };
    let problem = match name.as_str() {
        "rayleigh" => SampleProblem::Rayleigh,
        "modeconv" => SampleProblem::Modeconv { angle: r.angle },
        "plane-p" => SampleProblem::PlaneP,
        "plane-s" => SampleProblem::PlaneS,
        other => bail!("unknown problem `{other}` (rayleigh | modeconv | plane-p | plane-s)"),
    };
    let t = r.cfg.resolve(t, "t", 0.0)?;
    let rows: Vec<Vec<f64>> = studies::exact_sample_rows(problem, r.lambda, r.mu, r.ppw, r.lx, t)?
        .into_iter()
        .map(|row| row.to_vec())
        .collect();
    write_table(r.out.as_deref(), "x,y,u,v", &rows)
}

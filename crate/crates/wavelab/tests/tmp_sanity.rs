//! Temporary measurement harness (deleted before release).

use std::f64::consts::PI;
use std::time::Instant;

use halfplane::solver::problems::{FrozenBoundary, ModeConversionProblem, RayleighProblem};
use halfplane::solver::{Grid, RunOptions, SchemeOrder, Solver};
use halfplane::Material;
use wavelab::studies::{modeconv_study, run_rayleigh, scaling_study, RayleighRun};

fn lx_for(mu: f64) -> f64 {
    if mu < 0.01 {
        6.0
    } else {
        5.0
    }
}

fn rayleigh(mu: f64, order: SchemeOrder, ppw: usize, t_final: f64, lx: f64, force: bool) -> RayleighRun {
    RayleighRun {
        lambda: 1.0,
        mu,
        order,
        ppw,
        t_final,
        lx,
        n_outputs: 1,
        record_energy: false,
        force,
    }
}

#[test]
fn a_boundary_influence_c8() {
    let t = 3.33027650960094071;
    let e5 = run_rayleigh(&rayleigh(0.1, SchemeOrder::Two, 50, t, 5.0, false)).unwrap();
    let e7 = run_rayleigh(&rayleigh(0.1, SchemeOrder::Two, 50, t, 7.0, false)).unwrap();
    println!(
        "C8 influence: err(lx=5)={:.6e} err(lx=7)={:.6e} |diff|={:.3e}",
        e5.final_err,
        e7.final_err,
        (e5.final_err - e7.final_err).abs()
    );
}

#[test]
fn b_order4_ratio_c9() {
    let s10 = run_rayleigh(&rayleigh(0.01, SchemeOrder::Four, 10, 20.0, 5.0, false)).unwrap();
    let s20 = run_rayleigh(&rayleigh(0.01, SchemeOrder::Four, 20, 20.0, 5.0, false)).unwrap();
    println!(
        "C9: err(P=10)={:.4e} wall={:.3}s; err(P=20)={:.4e} wall={:.3}s; ratio={:.3}",
        s10.final_err, s10.wall_seconds, s20.final_err, s20.wall_seconds,
        s10.final_err / s20.final_err
    );
}

#[test]
fn c_scaling_order2_c10() {
    let t0 = Instant::now();
    let study = scaling_study(SchemeOrder::Two, 1.0, &[(0.1, 40), (0.01, 126)], 10, 5, lx_for, true).unwrap();
    println!("C10: max_ratio={:.4} walls={:?} total={:.1}s", study.max_ratio, study.wall_seconds, t0.elapsed().as_secs_f64());
    for k in 0..study.t_over_period.len() {
        if k % 5 == 0 || k == 1 || k == 2 {
            println!(
                "C10 t/T={:.1}: {:.4e} {:.4e}",
                study.t_over_period[k], study.curves[0][k], study.curves[1][k]
            );
        }
    }
    // err near t=20 for the (mu=0.01, P=126) member: T=10.4745, t/T grid step 0.2.
    let t_over: f64 = 20.0 / 10.47447745178419637;
    let k = (t_over * 5.0).round() as usize;
    println!("C10 member1 near t=20 (t/T={:.2}): err={:.4e}", study.t_over_period[k], study.curves[1][k]);
}

#[test]
fn d_scaling_order4_c11() {
    let t0 = Instant::now();
    let study = scaling_study(SchemeOrder::Four, 1.0, &[(0.1, 12), (0.001, 38)], 10, 5, lx_for, true).unwrap();
    println!("C11: max_ratio={:.4} walls={:?} total={:.1}s", study.max_ratio, study.wall_seconds, t0.elapsed().as_secs_f64());
    for k in 0..study.t_over_period.len() {
        if k % 5 == 0 || k == 1 || k == 2 {
            println!(
                "C11 t/T={:.1}: {:.4e} {:.4e}",
                study.t_over_period[k], study.curves[0][k], study.curves[1][k]
            );
        }
    }
}

#[test]
fn e_energy_c12() {
    let material = Material::new(1.0, 0.1).unwrap();
    let problem = FrozenBoundary::new(RayleighProblem::new(material, 2.0 * PI));
    let grid = Grid::strip(2.0, 1.0, 41).unwrap();
    let mut solver = Solver::new(grid, SchemeOrder::Two, &problem).unwrap();
    let opts = RunOptions {
        t_final: 5.0,
        n_outputs: 20,
        record_energy: true,
        force_budget: false,
        dt_override: Some(5e-4),
    };
    let result = solver.run(&opts).unwrap();
    let energies: Vec<f64> = result.records.iter().filter_map(|r| r.energy).collect();
    let e0 = energies[0];
    let drift = energies.iter().map(|e| (e - e0).abs() / e0).fold(0.0f64, f64::max);
    let increasing = energies.windows(2).filter(|w| w[1] > w[0]).count();
    println!(
        "C12: steps={} drift={:.3e} increasing={}/{} e0={:.6e}",
        result.steps, drift, increasing, energies.len() - 1, e0
    );
}

#[test]
fn f_modeconv_c13() {
    let t0 = Instant::now();
    let rows = modeconv_study(1.0, &[0.1, 0.01], PI / 4.0, &[16, 32], SchemeOrder::Four, 1.0, false).unwrap();
    for r in &rows {
        println!(
            "C13 {}: err={:.4e} order={:.3} wall={:.2}s",
            r.label, r.err, r.observed_order, r.wall_seconds
        );
    }
    println!("C13 total={:.1}s", t0.elapsed().as_secs_f64());
    for mu in [0.1, 0.01] {
        let p = ModeConversionProblem::new(Material::new(1.0, mu).unwrap(), PI / 4.0).unwrap();
        println!("C13 period(mu={mu}) = {:.10}", p.period());
    }
}

#[test]
fn g_efficiency_calibration_c14() {
    let s4 = run_rayleigh(&rayleigh(0.01, SchemeOrder::Four, 10, 20.0, 5.0, false)).unwrap();
    println!("C14 order4 P=10: err={:.4e} wall={:.4}s steps={}", s4.final_err, s4.wall_seconds, s4.steps);
    for p in [126usize, 200] {
        let s2 = run_rayleigh(&rayleigh(0.01, SchemeOrder::Two, p, 20.0, 5.0, true)).unwrap();
        println!("C14 order2 P={p}: err={:.4e} wall={:.3}s steps={}", s2.final_err, s2.wall_seconds, s2.steps);
    }
}

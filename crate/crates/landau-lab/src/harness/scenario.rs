//! Scenario runners: each subcommand maps to one pipeline that emits CSVs
//! plus a manifest. `full-report` chains them and cross-checks the pieces,
//! failing fast on any invariant breach.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::equilibria::gaussian_equilibrium;
use crate::error::{LandauError, Result};
use crate::generators::{
    check_embedding, check_growth_inequality, f_from_values, fit_decay, g_functional, lambda_schedule, GrowthPoint,
};
use crate::linear::{
    build_source, forward_laplace_check, kernel_inverse_laplace, reconstruct_rho, solve_volterra,
    verify_linear_gevrey, volterra_residual, EtaProfile, InitialMode, KernelSeries, SourceSeries,
};
use crate::penrose::penrose_infimum;
use crate::series::{Mode, TimeGrid};
use crate::sim::{SeedMode, SimConfig, Simulation, Species, VelocityProfile};

use super::config::{Method, RunConfig, Scenario};
use super::csvio::{fmt, Csv};
use super::manifest::RunManifest;

/// Radius bump used for the ∂_z finite difference in the growth-inequality check.
const DZ: f64 = 0.02;

/// Validate, dispatch, and seal the manifest.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunManifest> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut man = RunManifest::new(cfg);
    match cfg.scenario {
        Scenario::Penrose => run_penrose(cfg, &mut man)?,
        Scenario::Linear => run_linear(cfg, &mut man)?,
        Scenario::Kernel => run_kernel(cfg, &mut man)?,
        Scenario::Nonlinear => run_nonlinear(cfg, &mut man, false)?,
        Scenario::FullReport => {
            run_penrose(cfg, &mut man)?;
            run_kernel(cfg, &mut man)?;
            let mut both = cfg.clone();
            both.linear.method = Method::Both;
            run_linear(&both, &mut man)?;
            run_nonlinear(cfg, &mut man, true)?;
        }
    }
    man.finish(&cfg.out_dir)
}

/// Seed mode k·e₁ for a given axis wavenumber.
fn axis_mode(dim: usize, k: i64) -> Mode {
    if dim == 1 {
        Mode::one_d(k)
    } else {
        Mode::two_d(k, 0)
    }
}

/// Spectral weight of the physical seed amp·cos(k·x): ½·amp·(2π)^d.
fn seed_weight(dim: usize, amp: f64) -> f64 {
    0.5 * amp * (2.0 * PI).powi(dim as i32)
}

/// First nonzero component positive: one representative per ±k pair.
fn canonical(mode: &Mode) -> bool {
    mode.comps().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn run_penrose(cfg: &RunConfig, man: &mut RunManifest) -> Result<()> {
    let eq = gaussian_equilibrium(cfg.dim)?;
    let p = &cfg.penrose;
    let report = penrose_infimum(&eq, p.alpha, p.k_max, p.im_max, p.step, p.tol, p.kappa0)?;

    let mut csv = Csv::new("penrose.csv", &["k", "im_lambda", "abs_d"]);
    for sample in &report.samples {
        csv.row(&[sample.k.label(), fmt(sample.im_lambda), fmt(sample.abs_d)]);
    }
    man.add_file(csv.write(&cfg.out_dir)?);

    if !cfg.quiet {
        println!(
            "inf={} at k={} imlambda={}",
            report.inf_modulus,
            report.argmin_k.label(),
            report.argmin_lambda.im
        );
    }
    man.metric("penrose.inf_modulus", report.inf_modulus);
    man.metric("penrose.argmin_im_lambda", report.argmin_lambda.im);
    man.metric("penrose.tail_bound", report.tail_bound);
    man.metric("penrose.kappa0", report.kappa0);
    man.metric("penrose.alpha0", report.alpha0);
    man.note(format!(
        "penrose: kappa_half_ok={}, interior_ok={}",
        report.kappa_half_ok, report.interior_ok
    ));

    if p.alpha > 0.0 {
        // Shift of the infimum relative to the unperturbed scan.
        let base = penrose_infimum(&eq, 0.0, p.k_max, p.im_max, p.step, p.tol, p.kappa0)?;
        let shift = (report.inf_modulus - base.inf_modulus).abs();
        let bound = p.alpha * eq.c_mu / (cfg.theta0 * cfg.theta0);
        man.metric("penrose.shift", shift);
        man.metric("penrose.shift_bound", bound);
        if shift > bound {
            return Err(LandauError::Invariant(format!(
                "penrose infimum shift {shift:.6e} exceeds the perturbation bound {bound:.6e}"
            )));
        }
    }
    Ok(())
}

fn run_kernel(cfg: &RunConfig, man: &mut RunManifest) -> Result<()> {
    let eq = gaussian_equilibrium(cfg.dim)?;
    let grid = TimeGrid::new(cfg.linear.dt, cfg.linear.t_max)?;
    let opts = cfg.kernel_options();
    let mut csv = Csv::new("kernel.csv", &["t", "k", "re_k", "im_k", "abs_k"]);
    let mut worst_forward = 0.0f64;
    for k in 1..=cfg.kernel.k_max {
        let mode = axis_mode(cfg.dim, k);
        let ker = kernel_inverse_laplace(&eq, cfg.linear.epsilon, &mode, cfg.theta1, &grid, &opts)?;
        for (ti, &t) in ker.times.iter().enumerate() {
            let v = ker.k_hat[ti];
            csv.row(&[fmt(t), mode.label(), fmt(v.re), fmt(v.im), fmt(v.norm())]);
        }
        let forward = forward_laplace_check(&ker, &eq, cfg.linear.epsilon)?;
        worst_forward = worst_forward.max(forward);
        man.metric(&format!("kernel.fit_theta_k{}", mode.label()), ker.fit_theta);
        man.metric(&format!("kernel.fit_c_k{}", mode.label()), ker.fit_c);
        man.metric(&format!("kernel.tail_est_k{}", mode.label()), ker.tail_est);
        if !cfg.quiet {
            println!(
                "kernel k={}: fit_theta={:.6} (target {}), forward check {:.3e}",
                mode.label(),
                ker.fit_theta,
                cfg.theta1,
                forward
            );
        }
    }
    man.add_file(csv.write(&cfg.out_dir)?);
    man.metric("kernel.forward_check_max", worst_forward);
    Ok(())
}

/// Analytic seeds for the linearised pipeline, one per axis wavenumber.
fn linear_source(cfg: &RunConfig, grid: &TimeGrid) -> Result<SourceSeries> {
    let seeds: Vec<InitialMode> = (1..=cfg.linear.k_max)
        .map(|k| InitialMode {
            k: axis_mode(cfg.dim, k),
            amp_plus: Complex64::new(seed_weight(cfg.dim, cfg.linear.amp), 0.0),
            amp_minus: Complex64::default(),
            profile: EtaProfile::GaussianEta {
                width: cfg.linear.eta_width,
            },
        })
        .collect();
    build_source(&seeds, grid)
}

fn run_linear(cfg: &RunConfig, man: &mut RunManifest) -> Result<()> {
    let eq = gaussian_equilibrium(cfg.dim)?;
    let grid = TimeGrid::new(cfg.linear.dt, cfg.linear.t_max)?;
    let src = linear_source(cfg, &grid)?;
    let eps = cfg.linear.epsilon;

    let volterra = match cfg.linear.method {
        Method::Resolvent => None,
        _ => Some(solve_volterra(&src, &eq, eps)?),
    };
    let resolvent = match cfg.linear.method {
        Method::Volterra => None,
        _ => {
            let opts = cfg.kernel_options();
            let kernels: Vec<KernelSeries> = src
                .modes
                .iter()
                .map(|mode| kernel_inverse_laplace(&eq, eps, mode, cfg.theta1, &grid, &opts))
                .collect::<Result<_>>()?;
            Some(reconstruct_rho(&src, &kernels, eps)?)
        }
    };
    let primary = volterra.as_ref().or(resolvent.as_ref()).expect("a path ran");

    let mut header = vec!["t", "k", "re_rho", "im_rho", "abs_rho", "abs_S"];
    let both = volterra.is_some() && resolvent.is_some();
    if both {
        header.push("discrepancy");
    }
    let mut csv = Csv::new("linear.csv", &header);
    let mut max_disc = 0.0f64;
    for (mi, mode) in src.modes.iter().enumerate() {
        for ti in 0..grid.len() {
            let rho = primary.rho(ti, mi);
            let mut row = vec![
                fmt(grid.t(ti)),
                mode.label(),
                fmt(rho.re),
                fmt(rho.im),
                fmt(rho.norm()),
                fmt(src.s_total(ti, mi).norm()),
            ];
            if both {
                let disc = (volterra.as_ref().unwrap().rho(ti, mi)
                    - resolvent.as_ref().unwrap().rho(ti, mi))
                .norm();
                max_disc = max_disc.max(disc);
                row.push(fmt(disc));
            }
            csv.row(&row);
        }
    }
    man.add_file(csv.write(&cfg.out_dir)?);

    if both {
        man.metric("linear.max_discrepancy", max_disc);
        if !cfg.quiet {
            println!("linear: two-path max discrepancy {max_disc:.6e}");
        }
    }
    if let Some(sol) = &volterra {
        man.metric("linear.volterra_residual", volterra_residual(sol, &src, &eq, eps));
    }

    // Degenerate mass ratio: the ion density must reproduce its source.
    if eps == 0.0 {
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for mi in 0..src.modes.len() {
            for ti in 0..grid.len() {
                defect = defect.max((primary.rho_plus[(ti, mi)] - src.s_plus[(ti, mi)]).norm());
                scale = scale.max(src.s_plus[(ti, mi)].norm());
            }
        }
        if defect > 1e-14 * scale.max(1.0) {
            return Err(LandauError::Invariant(format!(
                "epsilon=0 identity violated: max |rho_plus - S_plus| = {defect:.3e}"
            )));
        }
        man.metric("linear.eps0_identity_defect", defect);
        man.note("rho_plus equals S_plus (epsilon=0 identity)");
        if !cfg.quiet {
            println!("linear: rho_plus equals S_plus (epsilon=0 identity), defect {defect:.3e}");
        }
    }

    // Decay-rate fit and the linear Gevrey inequality on the primary path.
    if cfg.linear.t_max >= 4.0 {
        let k1 = src
            .modes
            .iter()
            .position(|m| *m == axis_mode(cfg.dim, 1))
            .expect("k=1 seeded");
        let series: Vec<(f64, f64)> = (0..grid.len())
            .map(|ti| (grid.t(ti), primary.rho(ti, k1).norm()))
            .collect();
        let fit = fit_decay(&series, 2.0, cfg.linear.t_max)?;
        man.metric("linear.lambda_fit_k1", fit.lambda_fit);
        man.metric("linear.fit_r2_k1", fit.r2);
        if !cfg.quiet {
            println!(
                "linear: |rho(t,k=1)| decay fit lambda={:.6} (r2={:.4})",
                fit.lambda_fit, fit.r2
            );
        }
    }
    let gevrey = verify_linear_gevrey(primary, &src, &cfg.gevrey, cfg.theta1, cfg.z_eval)?;
    if !gevrey.ok {
        return Err(LandauError::Invariant(
            "linear Gevrey inequality found no finite closing constant".into(),
        ));
    }
    man.metric("linear.gevrey_c_fit", gevrey.c_fit);
    Ok(())
}

fn run_nonlinear(cfg: &RunConfig, man: &mut RunManifest, cross_check: bool) -> Result<()> {
    let eq = gaussian_equilibrium(cfg.dim)?;
    let sim_cfg: SimConfig = cfg.sim_config();
    let seeds = vec![SeedMode {
        k: axis_mode(cfg.dim, 1),
        amp: cfg.nonlinear.amp,
        species: Species::Plus,
        profile: VelocityProfile::Mu,
    }];
    let (mut sim, _) = Simulation::new(sim_cfg.clone(), eq, &seeds)?;
    let init = sim.initial_report(&cfg.gevrey)?;
    man.metric("nonlinear.init_neutrality", init.neutrality);
    man.metric("nonlinear.init_g_lambda1", init.g_lambda1);

    let mut snap_csv = Csv::new("nonlinear.csv", &["t", "k", "abs_rho_k", "abs_E_k"]);
    let mut diag_csv = Csv::new(
        "diagnostics.csv",
        &["t", "z", "F", "G", "G_pow", "c0_est", "lambda_used"],
    );

    let mut e_series: Vec<(f64, f64)> = Vec::new();
    let mut rho_k1: Vec<Complex64> = Vec::new();
    let mut growth_points: Vec<GrowthPoint> = Vec::new();
    let mut c0_max = 0.0f64;
    let mut f_tail_max = 0.0f64;
    let mut mass_drift = 0.0f64;
    let mut rho0_max = 0.0f64;
    let k1 = axis_mode(cfg.dim, 1);
    let power = 1.0 / (cfg.dim + 1) as f64;

    let observe = |sim: &Simulation,
                       snap_csv: &mut Csv,
                       diag_csv: &mut Csv,
                       growth_points: &mut Vec<GrowthPoint>,
                       c0_max: &mut f64,
                       f_tail_max: &mut f64|
     -> Result<()> {
        let t = sim.state.t;
        let rho_plus = sim.density_of(Species::Plus);
        let rho_minus = sim.density_of(Species::Minus);
        let rho_tot: Vec<Complex64> = rho_plus
            .iter()
            .zip(&rho_minus)
            .map(|(&a, &b)| a - b)
            .collect();
        for (mi, mode) in sim.modes().iter().enumerate() {
            if !canonical(mode) {
                continue;
            }
            let abs_rho = rho_tot[mi].norm();
            snap_csv.row(&[
                fmt(t),
                mode.label(),
                fmt(abs_rho),
                fmt(abs_rho / mode.norm()),
            ]);
        }

        let snap = sim.gliding_frame()?;
        let g = g_functional(&snap, cfg.z_eval, &cfg.gevrey)?;
        let g_up = g_functional(&snap, cfg.z_eval + DZ, &cfg.gevrey)?;
        let f = f_from_values(
            sim.modes(),
            &rho_tot,
            t,
            cfg.z_eval,
            &cfg.gevrey,
            cfg.nonlinear.diag_k_max,
        )?;
        let ratio = check_embedding(f.value, g.value, cfg.dim)?;
        *c0_max = c0_max.max(ratio.c0_est);
        *f_tail_max = f_tail_max.max(f.tail_max);
        diag_csv.row(&[
            fmt(t),
            fmt(cfg.z_eval),
            fmt(f.value),
            fmt(g.value),
            fmt(g.value.powf(power)),
            fmt(ratio.c0_est),
            fmt(lambda_schedule(t, &cfg.gevrey)),
        ]);
        growth_points.push(GrowthPoint {
            t,
            f: f.value,
            g: g.value,
            g_z_plus: g_up.value,
        });
        Ok(())
    };

    observe(
        &sim,
        &mut snap_csv,
        &mut diag_csv,
        &mut growth_points,
        &mut c0_max,
        &mut f_tail_max,
    )?;
    {
        let rho_plus = sim.density_of(Species::Plus);
        let rho_minus = sim.density_of(Species::Minus);
        if let Some(mi) = sim.modes().iter().position(|m| *m == k1) {
            rho_k1.push(rho_plus[mi] - rho_minus[mi]);
        }
        e_series.push((0.0, e_amplitude(sim.modes(), &rho_plus, &rho_minus)));
    }

    let n_steps = sim_cfg.n_steps();
    let ck_every = cfg.nonlinear.checkpoint_every;
    for step in 1..=n_steps {
        let diag = sim.step()?;
        rho0_max = rho0_max.max(diag.rho0_abs);
        let (mass_p, mass_m) = sim.mass();
        mass_drift = mass_drift.max(mass_p.norm()).max(mass_m.norm());

        let rho_plus = sim.density_of(Species::Plus);
        let rho_minus = sim.density_of(Species::Minus);
        e_series.push((diag.t, e_amplitude(sim.modes(), &rho_plus, &rho_minus)));
        if let Some(mi) = sim.modes().iter().position(|m| *m == k1) {
            rho_k1.push(rho_plus[mi] - rho_minus[mi]);
        }

        if step % cfg.nonlinear.snap_every == 0 || step == n_steps {
            observe(
                &sim,
                &mut snap_csv,
                &mut diag_csv,
                &mut growth_points,
                &mut c0_max,
                &mut f_tail_max,
            )?;
        }
        if ck_every > 0 && (step % ck_every == 0 || step == n_steps) {
            let name = format!("checkpoint_{step:06}.ck");
            sim.state.save_checkpoint(&cfg.out_dir.join(&name))?;
            man.add_file(name);
        }
    }

    man.add_file(snap_csv.write(&cfg.out_dir)?);
    man.add_file(diag_csv.write(&cfg.out_dir)?);
    man.metric("nonlinear.mass_drift", mass_drift);
    man.metric("nonlinear.rho0_max", rho0_max);
    man.metric("nonlinear.reality_defect", sim.state.reality_defect());
    man.metric("nonlinear.boundary_mass_final", sim.state.boundary_mass());
    man.metric("diag.c0_max", c0_max);
    man.metric("diag.f_tail_max", f_tail_max);
    man.note(format!(
        "diagnostics F truncated at |k| <= {} with weighted tail max {:.3e}",
        cfg.nonlinear.diag_k_max, f_tail_max
    ));

    let growth = check_growth_inequality(&growth_points, DZ, cfg.dim)?;
    man.metric("diag.growth_c_min", growth.c_min);
    man.note(format!("generator growth inequality ok={}", growth.ok));
    if !growth.ok {
        return Err(LandauError::Invariant(
            "generator growth inequality found no finite closing constant".into(),
        ));
    }

    if cfg.nonlinear.t_max >= 4.0 && !cfg.nonlinear.zero_field {
        let fit = fit_decay(&e_series, 2.0, cfg.nonlinear.t_max.min(20.0))?;
        man.metric("nonlinear.lambda_fit", fit.lambda_fit);
        man.metric("nonlinear.fit_r2", fit.r2);
        man.metric("nonlinear.fit_c", fit.c_fit);
        if !cfg.quiet {
            println!(
                "nonlinear: field decay fit lambda={:.6} (r2={:.4}), max c0_est={:.6e}",
                fit.lambda_fit, fit.r2, c0_max
            );
        }
    }

    if cross_check && !cfg.nonlinear.zero_field {
        // The split-step run must track the linear solution at the seeded
        // mode up to the quadratic echo and the O(dt²) marching error.
        let grid = TimeGrid::new(cfg.nonlinear.dt, cfg.nonlinear.t_max)?;
        let eq = gaussian_equilibrium(cfg.dim)?;
        let src = build_source(
            &[InitialMode {
                k: k1,
                amp_plus: Complex64::new(seed_weight(cfg.dim, cfg.nonlinear.amp), 0.0),
                amp_minus: Complex64::default(),
                profile: EtaProfile::GaussianEta { width: 1.0 },
            }],
            &grid,
        )?;
        let sol = solve_volterra(&src, &eq, cfg.nonlinear.epsilon)?;
        let mut gap = 0.0f64;
        for (ti, rho) in rho_k1.iter().enumerate() {
            gap = gap.max((rho - sol.rho(ti, 0)).norm());
        }
        let amp = cfg.nonlinear.amp;
        let bound = 10.0 * amp * amp + 2.0 * amp * cfg.nonlinear.dt * cfg.nonlinear.dt;
        man.metric("nonlinear.volterra_gap", gap);
        man.metric("nonlinear.volterra_gap_bound", bound);
        if gap > bound {
            return Err(LandauError::Invariant(format!(
                "nonlinear run departs from the linear solution: gap {gap:.3e} > {bound:.3e}"
            )));
        }
        if !cfg.quiet {
            println!("nonlinear: Volterra cross-check gap {gap:.3e} <= {bound:.3e}");
        }
    }
    Ok(())
}

/// Σ_{k≠0} |Ê(k)| from per-species density values.
fn e_amplitude(modes: &[Mode], rho_plus: &[Complex64], rho_minus: &[Complex64]) -> f64 {
    modes
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(mi, m)| (rho_plus[mi] - rho_minus[mi]).norm() / m.norm())
        .sum()
}

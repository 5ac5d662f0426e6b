//! Command-line front end: layered config (defaults ← file ← flags), one
//! subcommand per scenario, exit codes 0 = success, 1 = usage, 2 = breach.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use landau_lab::error::{LandauError, Result};
use landau_lab::harness::{load_config, run_scenario, Method, RunConfig, Scenario};

#[derive(Parser)]
#[command(name = "landau-lab", version, about = "Two-species Landau damping laboratory")]
struct Cli {
    /// Key/value config file applied over the built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for CSVs and the manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "runs")]
    out: PathBuf,

    /// Suppress progress lines (files and manifest are still written).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the dispersion boundary for the stability margin.
    Penrose(PenroseArgs),
    /// Solve the linearised density equations (Volterra and/or resolvent).
    Linear(LinearArgs),
    /// Run the nonlinear split-step solver with Gevrey diagnostics.
    Nonlinear(NonlinearArgs),
    /// Recover the resolvent kernel and audit its decay.
    Kernel,
    /// Full pipeline: penrose, kernel, linear (both paths), nonlinear, cross-checks.
    FullReport,
}

#[derive(Args)]
struct PenroseArgs {
    /// Mass-ratio perturbation size (0 = unperturbed scan).
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest |k_i| on the scanned mode lattice.
    #[arg(long)]
    k_max: Option<i64>,
    /// |Im lambda| scan limit.
    #[arg(long)]
    im_max: Option<f64>,
    /// Im lambda scan spacing.
    #[arg(long)]
    step: Option<f64>,
    /// Quadrature tolerance for each dispersion evaluation.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct LinearArgs {
    /// Mass ratio.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Target kernel decay rate (must stay below theta0).
    #[arg(long)]
    theta1: Option<f64>,
    /// Time-grid spacing.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    tmax: Option<f64>,
    /// Seed modes k = 1..k_max.
    #[arg(long)]
    k_max: Option<i64>,
    /// Solution path(s) to run.
    #[arg(long, value_enum)]
    method: Option<Method>,
}

#[derive(Args)]
struct NonlinearArgs {
    /// Mass ratio.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed amplitude of the cosine perturbation.
    #[arg(long)]
    amp: Option<f64>,
    /// Splitting step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    tmax: Option<f64>,
    /// Retained spectral radius K.
    #[arg(long)]
    nx: Option<usize>,
    /// Velocity cells per axis (even).
    #[arg(long)]
    nv: Option<usize>,
    /// Velocity box half-width.
    #[arg(long)]
    vmax: Option<f64>,
    /// Snapshot cadence in steps.
    #[arg(long)]
    snap_every: Option<usize>,
}

fn apply<T: Copy>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let file = load_config(path)?;
        cfg.apply_file(&file)?;
    }
    match &cli.command {
        Command::Penrose(a) => {
            cfg.scenario = Scenario::Penrose;
            apply(&mut cfg.penrose.alpha, a.alpha);
            apply(&mut cfg.penrose.k_max, a.k_max);
            apply(&mut cfg.penrose.im_max, a.im_max);
            apply(&mut cfg.penrose.step, a.step);
            apply(&mut cfg.penrose.tol, a.tol);
        }
        Command::Linear(a) => {
            cfg.scenario = Scenario::Linear;
            apply(&mut cfg.linear.epsilon, a.epsilon);
            apply(&mut cfg.theta1, a.theta1);
            apply(&mut cfg.linear.dt, a.dt);
            apply(&mut cfg.linear.t_max, a.tmax);
            apply(&mut cfg.linear.k_max, a.k_max);
            apply(&mut cfg.linear.method, a.method);
        }
        Command::Nonlinear(a) => {
            cfg.scenario = Scenario::Nonlinear;
            apply(&mut cfg.nonlinear.epsilon, a.epsilon);
            apply(&mut cfg.nonlinear.amp, a.amp);
            apply(&mut cfg.nonlinear.dt, a.dt);
            apply(&mut cfg.nonlinear.t_max, a.tmax);
            apply(&mut cfg.nonlinear.n_x, a.nx);
            apply(&mut cfg.nonlinear.n_v, a.nv);
            apply(&mut cfg.nonlinear.v_max, a.vmax);
            apply(&mut cfg.nonlinear.snap_every, a.snap_every);
        }
        Command::Kernel => cfg.scenario = Scenario::Kernel,
        Command::FullReport => cfg.scenario = Scenario::FullReport,
    }
    cfg.out_dir = cli.out.clone();
    cfg.quiet = cli.quiet;
    Ok(cfg)
}

/// Cap the worker pool from LANDAU_LAB_THREADS before any parallel region.
fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("LANDAU_LAB_THREADS") {
        let n: usize = raw.parse().map_err(|_| {
            LandauError::Config(format!(
                "LANDAU_LAB_THREADS must be a positive integer, got '{raw}'"
            ))
        })?;
        if n == 0 {
            return Err(LandauError::Config(
                "LANDAU_LAB_THREADS must be a positive integer, got '0'".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LandauError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let cfg = build_config(cli)?;
    let manifest = run_scenario(&cfg)?;
    if !cli.quiet {
        println!(
            "{}: wrote {} file(s) + manifest.json to {}",
            manifest.scenario,
            manifest.files.len(),
            cfg.out_dir.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Run configuration: layered defaults ← TOML file ← CLI flags, with
//! cross-field validation and a canonical hash for the run manifest.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LandauError, Result};
use crate::generators::GevreyParams;
use crate::linear::KernelOptions;
use crate::sim::SimConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Penrose,
    Linear,
    Nonlinear,
    Kernel,
    FullReport,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Penrose => "penrose",
            Scenario::Linear => "linear",
            Scenario::Nonlinear => "nonlinear",
            Scenario::Kernel => "kernel",
            Scenario::FullReport => "full-report",
        }
    }
}

impl FromStr for Scenario {
    type Err = LandauError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "penrose" => Ok(Scenario::Penrose),
            "linear" => Ok(Scenario::Linear),
            "nonlinear" => Ok(Scenario::Nonlinear),
            "kernel" => Ok(Scenario::Kernel),
            "full-report" => Ok(Scenario::FullReport),
            other => Err(LandauError::Config(format!(
                "unknown scenario '{other}', expected penrose | linear | nonlinear | kernel | \
                 full-report"
            ))),
        }
    }
}

/// Which linear solution path(s) to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[clap(rename_all = "lowercase")]
pub enum Method {
    Volterra,
    Resolvent,
    Both,
}

impl FromStr for Method {
    type Err = LandauError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "volterra" => Ok(Method::Volterra),
            "resolvent" => Ok(Method::Resolvent),
            "both" => Ok(Method::Both),
            other => Err(LandauError::Config(format!(
                "unknown method '{other}', expected volterra | resolvent | both"
            ))),
        }
    }
}

/// Stability-boundary scan parameters.
#[derive(Clone, Debug, Serialize)]
pub struct PenroseBlock {
    /// Mass-ratio perturbation size for the shifted scan (0 = unperturbed).
    pub alpha: f64,
    pub k_max: i64,
    /// |Im λ| scan limit.
    pub im_max: f64,
    pub step: f64,
    pub tol: f64,
    /// Stability margin the verdict is judged against (None: use the scan inf).
    pub kappa0: Option<f64>,
}

impl Default for PenroseBlock {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            k_max: 8,
            im_max: 60.0,
            step: 0.05,
            tol: 1e-10,
            kappa0: None,
        }
    }
}

/// Linearised two-path solve parameters.
#[derive(Clone, Debug, Serialize)]
pub struct LinearBlock {
    pub epsilon: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Seeded modes k = 1..k_max on the first axis.
    pub k_max: i64,
    pub method: Method,
    /// Physical seed amplitude; the mode weight is amp·(2π)^d/2.
    pub amp: f64,
    /// Gaussian width of the seeds' η-profile.
    pub eta_width: f64,
}

impl Default for LinearBlock {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            dt: 0.01,
            t_max: 20.0,
            k_max: 2,
            method: Method::Both,
            amp: 1e-3,
            eta_width: 1.0,
        }
    }
}

/// Resolvent-kernel recovery parameters.
#[derive(Clone, Debug, Serialize)]
pub struct KernelBlock {
    pub tol: f64,
    pub denom_floor: f64,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub k_max: i64,
    pub max_contour: usize,
    /// Contour step; 0 picks min(0.02, π/(T+30)) automatically.
    pub contour_step: f64,
}

impl Default for KernelBlock {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            denom_floor: 0.02,
            fit_lo: 1.0,
            fit_hi: 15.0,
            k_max: 4,
            max_contour: 4096,
            contour_step: 0.0,
        }
    }
}

/// Nonlinear split-step run parameters.
#[derive(Clone, Debug, Serialize)]
pub struct NonlinearBlock {
    pub epsilon: f64,
    pub amp: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Retained spectral radius K (modes |k_i| ≤ K).
    pub n_x: usize,
    pub n_v: usize,
    pub v_max: f64,
    pub snap_every: usize,
    /// Mode cutoff for the diagnostics F functional (tail reported).
    pub diag_k_max: f64,
    /// Checkpoint cadence in steps; 0 disables checkpoints.
    pub checkpoint_every: usize,
    pub zero_field: bool,
}

impl Default for NonlinearBlock {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            epsilon: sim.epsilon,
            amp: sim.amp,
            dt: sim.dt,
            t_max: sim.t_max,
            n_x: sim.n_x,
            n_v: sim.n_v,
            v_max: sim.v_max,
            snap_every: sim.snap_every,
            diag_k_max: 4.0,
            checkpoint_every: 0,
            zero_field: false,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub equilibrium: String,
    pub dim: usize,
    /// Certified equilibrium decay rate θ0.
    pub theta0: f64,
    /// Target kernel decay rate θ1 < θ0.
    pub theta1: f64,
    /// Gevrey radius at which diagnostics are evaluated.
    pub z_eval: f64,
    pub penrose: PenroseBlock,
    pub linear: LinearBlock,
    pub kernel: KernelBlock,
    pub nonlinear: NonlinearBlock,
    pub gevrey: GevreyParams,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub quiet: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::FullReport,
            equilibrium: "gaussian".into(),
            dim: 1,
            theta0: 0.5,
            theta1: 0.25,
            z_eval: 0.1,
            penrose: PenroseBlock::default(),
            linear: LinearBlock::default(),
            kernel: KernelBlock::default(),
            nonlinear: NonlinearBlock::default(),
            gevrey: GevreyParams {
                gamma: 1.0,
                sigma: 4.0,
                alpha: 0.2,
                lambda0: 0.05,
                delta: 0.5,
                lambda1: 0.4,
            },
            out_dir: PathBuf::from("runs"),
            quiet: false,
        }
    }
}

impl RunConfig {
    /// Overlay every key present in a parsed config file.
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<()> {
        if let Some(s) = &file.scenario {
            self.scenario = s.parse()?;
        }
        set(&mut self.equilibrium, &file.equilibrium);
        set(&mut self.dim, &file.dim);
        set(&mut self.theta0, &file.theta0);
        set(&mut self.theta1, &file.theta1);
        if let Some(b) = &file.penrose {
            set(&mut self.penrose.alpha, &b.alpha);
            set(&mut self.penrose.k_max, &b.k_max);
            set(&mut self.penrose.im_max, &b.im_max);
            set(&mut self.penrose.step, &b.step);
            set(&mut self.penrose.tol, &b.tol);
            if b.kappa0.is_some() {
                self.penrose.kappa0 = b.kappa0;
            }
        }
        if let Some(b) = &file.linear {
            set(&mut self.linear.epsilon, &b.epsilon);
            set(&mut self.linear.dt, &b.dt);
            set(&mut self.linear.t_max, &b.t_max);
            set(&mut self.linear.k_max, &b.k_max);
            if let Some(m) = &b.method {
                self.linear.method = m.parse()?;
            }
            set(&mut self.linear.amp, &b.amp);
            set(&mut self.linear.eta_width, &b.eta_width);
        }
        if let Some(b) = &file.kernel {
            set(&mut self.kernel.tol, &b.tol);
            set(&mut self.kernel.denom_floor, &b.denom_floor);
            set(&mut self.kernel.fit_lo, &b.fit_lo);
            set(&mut self.kernel.fit_hi, &b.fit_hi);
            set(&mut self.kernel.k_max, &b.k_max);
            set(&mut self.kernel.max_contour, &b.max_contour);
            set(&mut self.kernel.contour_step, &b.contour_step);
        }
        if let Some(b) = &file.nonlinear {
            set(&mut self.nonlinear.epsilon, &b.epsilon);
            set(&mut self.nonlinear.amp, &b.amp);
            set(&mut self.nonlinear.dt, &b.dt);
            set(&mut self.nonlinear.t_max, &b.t_max);
            set(&mut self.nonlinear.n_x, &b.n_x);
            set(&mut self.nonlinear.n_v, &b.n_v);
            set(&mut self.nonlinear.v_max, &b.v_max);
            set(&mut self.nonlinear.snap_every, &b.snap_every);
            set(&mut self.nonlinear.diag_k_max, &b.diag_k_max);
            set(&mut self.nonlinear.checkpoint_every, &b.checkpoint_every);
            set(&mut self.nonlinear.zero_field, &b.zero_field);
        }
        if let Some(b) = &file.gevrey {
            set(&mut self.gevrey.gamma, &b.gamma);
            set(&mut self.gevrey.sigma, &b.sigma);
            set(&mut self.gevrey.alpha, &b.alpha);
            set(&mut self.gevrey.lambda0, &b.lambda0);
            set(&mut self.gevrey.delta, &b.delta);
            set(&mut self.gevrey.lambda1, &b.lambda1);
            set(&mut self.z_eval, &b.z_eval);
        }
        Ok(())
    }

    /// Every violated cross-field constraint, or Ok.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !matches!(self.dim, 1 | 2) {
            errs.push(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if self.equilibrium != "gaussian" {
            errs.push(format!(
                "unknown equilibrium '{}', expected 'gaussian'",
                self.equilibrium
            ));
        }
        if !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            errs.push(format!("theta0 must be positive, got {}", self.theta0));
        }
        if !(self.theta1 > 0.0 && self.theta1 < self.theta0) {
            errs.push(format!(
                "theta1 must lie in (0, theta0) = (0, {}), got {}",
                self.theta0, self.theta1
            ));
        }
        errs.extend(self.gevrey.violations(self.dim, self.theta1));
        if !(self.z_eval > 0.0 && self.z_eval <= self.theta1 / 2.0) {
            errs.push(format!(
                "z_eval must lie in (0, theta1/2] = (0, {}], got {}",
                self.theta1 / 2.0,
                self.z_eval
            ));
        }

        let p = &self.penrose;
        if p.k_max < 1 {
            errs.push(format!("penrose.k_max must be >= 1, got {}", p.k_max));
        }
        if !(p.im_max > 0.0) {
            errs.push(format!("penrose.im_max must be positive, got {}", p.im_max));
        }
        if !(p.step > 0.0 && p.step <= p.im_max) {
            errs.push(format!(
                "penrose.step must lie in (0, im_max], got {}",
                p.step
            ));
        }
        if !(p.tol > 0.0) {
            errs.push(format!("penrose.tol must be positive, got {}", p.tol));
        }
        if !(p.alpha >= 0.0 && p.alpha.is_finite()) {
            errs.push(format!(
                "penrose.alpha must be finite and nonnegative, got {}",
                p.alpha
            ));
        }

        let l = &self.linear;
        if !(l.epsilon >= 0.0 && l.epsilon.is_finite()) {
            errs.push(format!(
                "linear.epsilon must be finite and nonnegative, got {}",
                l.epsilon
            ));
        }
        if !(l.dt > 0.0 && l.t_max >= l.dt) {
            errs.push(format!(
                "linear time grid needs 0 < dt <= t_max, got dt={}, t_max={}",
                l.dt, l.t_max
            ));
        }
        if l.k_max < 1 {
            errs.push(format!("linear.k_max must be >= 1, got {}", l.k_max));
        }
        if !(l.amp > 0.0 && l.amp.is_finite()) {
            errs.push(format!("linear.amp must be positive, got {}", l.amp));
        }
        if !(l.eta_width > 0.0) {
            errs.push(format!(
                "linear.eta_width must be positive, got {}",
                l.eta_width
            ));
        }

        let kr = &self.kernel;
        if !(kr.tol > 0.0) {
            errs.push(format!("kernel.tol must be positive, got {}", kr.tol));
        }
        if !(kr.denom_floor > 0.0) {
            errs.push(format!(
                "kernel.denom_floor must be positive, got {}",
                kr.denom_floor
            ));
        }
        if !(kr.fit_lo >= 0.0 && kr.fit_hi > kr.fit_lo) {
            errs.push(format!(
                "kernel fit window needs 0 <= fit_lo < fit_hi, got [{}, {}]",
                kr.fit_lo, kr.fit_hi
            ));
        }
        if kr.k_max < 1 {
            errs.push(format!("kernel.k_max must be >= 1, got {}", kr.k_max));
        }
        if kr.max_contour < 64 {
            errs.push(format!(
                "kernel.max_contour must be >= 64, got {}",
                kr.max_contour
            ));
        }
        if !(kr.contour_step >= 0.0) {
            errs.push(format!(
                "kernel.contour_step must be nonnegative (0 = automatic), got {}",
                kr.contour_step
            ));
        }

        if let Err(LandauError::Constraints(sim_errs)) = self.sim_config().validate() {
            errs.extend(sim_errs.into_iter().map(|e| format!("nonlinear: {e}")));
        }
        if !(self.nonlinear.diag_k_max >= 1.0) {
            errs.push(format!(
                "nonlinear.diag_k_max must be >= 1, got {}",
                self.nonlinear.diag_k_max
            ));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(LandauError::Constraints(errs))
        }
    }

    /// Simulation block as a solver config.
    pub fn sim_config(&self) -> SimConfig {
        let n = &self.nonlinear;
        SimConfig {
            dim: self.dim,
            epsilon: n.epsilon,
            n_x: n.n_x,
            n_v: n.n_v,
            v_max: n.v_max,
            dt: n.dt,
            t_max: n.t_max,
            amp: n.amp,
            zero_field: n.zero_field,
            snap_every: n.snap_every,
            ..SimConfig::default()
        }
    }

    /// Kernel block as contour-solver options.
    pub fn kernel_options(&self) -> KernelOptions {
        let k = &self.kernel;
        KernelOptions {
            tol: k.tol,
            denom_floor: k.denom_floor,
            max_contour: k.max_contour,
            contour_step: (k.contour_step > 0.0).then_some(k.contour_step),
            fit_window: (k.fit_lo, k.fit_hi),
        }
    }

    /// SHA-256 of the canonical serialized scientific parameters.
    pub fn sha256(&self) -> String {
        let canon = toml::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canon.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

/// Raw config file: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub equilibrium: Option<String>,
    pub dim: Option<usize>,
    pub theta0: Option<f64>,
    pub theta1: Option<f64>,
    pub penrose: Option<PenroseFile>,
    pub linear: Option<LinearFile>,
    pub kernel: Option<KernelFile>,
    pub nonlinear: Option<NonlinearFile>,
    pub gevrey: Option<GevreyFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenroseFile {
    pub alpha: Option<f64>,
    pub k_max: Option<i64>,
    pub im_max: Option<f64>,
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub kappa0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearFile {
    pub epsilon: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub k_max: Option<i64>,
    pub method: Option<String>,
    pub amp: Option<f64>,
    pub eta_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub tol: Option<f64>,
    pub denom_floor: Option<f64>,
    pub fit_lo: Option<f64>,
    pub fit_hi: Option<f64>,
    pub k_max: Option<i64>,
    pub max_contour: Option<usize>,
    pub contour_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearFile {
    pub epsilon: Option<f64>,
    pub amp: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub n_x: Option<usize>,
    pub n_v: Option<usize>,
    pub v_max: Option<f64>,
    pub snap_every: Option<usize>,
    pub diag_k_max: Option<f64>,
    pub checkpoint_every: Option<usize>,
    pub zero_field: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GevreyFile {
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda0: Option<f64>,
    pub delta: Option<f64>,
    pub lambda1: Option<f64>,
    pub z_eval: Option<f64>,
}

/// Parse the documented key/value config format.
pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| {
        LandauError::Config(format!("{}: {}", path.display(), e.message()))
    })
}

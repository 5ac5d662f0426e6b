//! Nonlinear two-species Vlasov–Poisson solver for the perturbation system on
//! 𝕋^d × ℝ^d: Fourier in x, collocation in v, Strang splitting with exact
//! phase-shift sub-steps, and gliding-frame spectra for diagnostics.

pub mod grid;
pub mod state;

use crate::equilibria::Equilibrium;
use crate::error::{LandauError, Result};
use crate::fourier::{fft_axis, FftCache};
use crate::generators::{g_functional, GevreyParams};
use crate::series::{field_mode, GlidingSnapshot, Mode, MAX_DIM};
use grid::Grid;
use ndarray::Array2;
use num_complex::Complex64;
use state::{neutrality_defect, SpectralState};

/// Tolerance on |ρ̂(t, 0)| before a run is declared non-neutral.
pub const NEUTRALITY_TOL: f64 = 1e-12;

/// Relative gliding-spectrum level in the outer η band that counts as
/// velocity-transform aliasing.
const ALIAS_BAND_START: f64 = 0.85;
const ALIAS_LEVEL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// The two species: ions (mass ratio ε) and electrons (unit action).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    Plus,
    Minus,
}

/// Velocity dependence of a seed perturbation.
#[derive(Clone, Copy, Debug)]
pub enum VelocityProfile {
    /// The background profile μ itself (normalized).
    Mu,
    /// Normalized Gaussian of the given width.
    Gaussian { width: f64 },
}

impl VelocityProfile {
    fn eval(&self, eq: &Equilibrium, v: &[f64]) -> Result<f64> {
        match *self {
            VelocityProfile::Mu => Ok(eq.mu(v)),
            VelocityProfile::Gaussian { width } => {
                if !(width > 0.0 && width.is_finite()) {
                    return Err(LandauError::Config(format!(
                        "seed profile width must be positive, got {width}"
                    )));
                }
                let r2: f64 = v.iter().map(|x| x * x).sum();
                let norm = (2.0 * std::f64::consts::PI * width * width)
                    .powf(-0.5 * v.len() as f64);
                Ok(norm * (-0.5 * r2 / (width * width)).exp())
            }
        }
    }
}

/// One seed term amp·cos(k·x)·profile(v) added to a species at t = 0.
#[derive(Clone, Debug)]
pub struct SeedMode {
    pub k: Mode,
    pub amp: f64,
    pub species: Species,
    pub profile: VelocityProfile,
}

/// Solver configuration. `n_x` counts retained modes per axis (|k_i| ≤ n_x);
/// the padded FFT grid is derived internally.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub dim: usize,
    /// Mass ratio ε ≥ 0 (ion acceleration strength).
    pub epsilon: f64,
    pub n_x: usize,
    pub n_v: usize,
    pub v_max: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Default seed amplitude used by the harness.
    pub amp: f64,
    /// Velocity-boundary occupancy above this aborts the run (box too small).
    pub boundary_tol: f64,
    /// Sanity cap on the per-step transport phase dt·v_max·K·d.
    pub transport_limit: f64,
    /// Sanity cap on the per-step acceleration phase dt·max|E|·(π n_v / 2v_max).
    pub accel_limit: f64,
    /// Skip the field/acceleration sub-step entirely (free-streaming runs).
    pub zero_field: bool,
    /// Snapshot cadence in steps.
    pub snap_every: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            epsilon: 0.01,
            n_x: 32,
            n_v: 256,
            v_max: 8.0,
            dt: 0.05,
            t_max: 40.0,
            amp: 1e-3,
            boundary_tol: 1e-10,
            transport_limit: 200.0,
            accel_limit: 10.0,
            zero_field: false,
            snap_every: 10,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.dim == 0 || self.dim > MAX_DIM {
            problems.push(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            problems.push(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if self.n_x < 1 {
            problems.push(format!("n_x must be at least 1, got {}", self.n_x));
        }
        if self.n_v < 4 || self.n_v % 2 != 0 {
            problems.push(format!("n_v must be even and at least 4, got {}", self.n_v));
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            problems.push(format!("v_max must be positive, got {}", self.v_max));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            problems.push(format!("t_max must be nonnegative, got {}", self.t_max));
        }
        if !self.amp.is_finite() {
            problems.push(format!("amp must be finite, got {}", self.amp));
        }
        if !(self.boundary_tol > 0.0) {
            problems.push(format!(
                "boundary_tol must be positive, got {}",
                self.boundary_tol
            ));
        }
        if !(self.transport_limit > 0.0 && self.accel_limit > 0.0) {
            problems.push(format!(
                "step sanity limits must be positive, got {} and {}",
                self.transport_limit, self.accel_limit
            ));
        }
        if self.snap_every == 0 {
            problems.push("snap_every must be at least 1".into());
        }
        if self.dim == 2 && self.n_x > 32 {
            problems.push(format!(
                "2-D runs are capped at 32 modes per axis, got {}",
                self.n_x
            ));
        }
        if self.dim == 2 && self.n_v > 64 {
            problems.push(format!(
                "2-D runs are capped at n_v = 64 per axis, got {}",
                self.n_v
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(LandauError::Constraints(problems))
        }
    }

    /// Number of steps covering [0, t_max].
    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Per-step monitor values.
#[derive(Clone, Copy, Debug)]
pub struct StepDiag {
    /// Time after the step.
    pub t: f64,
    /// max_x |E(x)| at the mid-step field solve (0 when the field is zeroed).
    pub max_e: f64,
    /// Velocity-boundary occupancy after the step.
    pub boundary_mass: f64,
    /// |ρ̂(0)| at the mid-step density.
    pub rho0_abs: f64,
}

/// Initial-state report: neutrality defect and the Gevrey functional of the
/// seed at z = λ1.
#[derive(Clone, Copy, Debug)]
pub struct InitReport {
    pub neutrality: f64,
    pub g_lambda1: f64,
}

/// Poisson solve on a mode list: Ê(k) = −i k ρ̂(k)/|k|², Ê(0) = 0.
///
/// Errors if a zero mode carries density above `tol` (neutrality broken).
pub fn field_from_density(
    modes: &[Mode],
    rho: &[Complex64],
    tol: f64,
) -> Result<Vec<[Complex64; MAX_DIM]>> {
    if modes.len() != rho.len() {
        return Err(LandauError::GridMismatch(format!(
            "{} modes vs {} density entries",
            modes.len(),
            rho.len()
        )));
    }
    let mut field = Vec::with_capacity(modes.len());
    for (mode, &r) in modes.iter().zip(rho) {
        if mode.is_zero() && r.norm() > tol {
            return Err(LandauError::Neutrality(r.norm()));
        }
        field.push(field_mode(mode, r));
    }
    Ok(field)
}

/// The solver: owns the state plus precomputed tables and scratch space.
pub struct Simulation {
    pub cfg: SimConfig,
    pub eq: Equilibrium,
    pub state: SpectralState,
    fft: FftCache,
    modes: Vec<Mode>,
    fft_pos: Vec<usize>,
    mode_axes: Vec<[usize; MAX_DIM]>,
    v_axes: Vec<[usize; MAX_DIM]>,
    eta_axis: Vec<f64>,
    mu_v: Vec<f64>,
    /// Half-step transport phases, indexed [axis offset · n_v + v index].
    transport_half: Vec<Complex64>,
    full_shape: Vec<usize>,
    v_pass_shape: Vec<usize>,
    x_shape: Vec<usize>,
    accel_buf: Vec<Complex64>,
}

impl Simulation {
    /// Build a simulation from seeds; checks neutrality of the seeded state.
    pub fn new(cfg: SimConfig, eq: Equilibrium, seeds: &[SeedMode]) -> Result<(Self, InitReport)> {
        cfg.validate()?;
        if eq.dim != cfg.dim {
            return Err(LandauError::Config(format!(
                "equilibrium dimension {} does not match configured dimension {}",
                eq.dim, cfg.dim
            )));
        }
        let grid = Grid::new(cfg.dim, cfg.n_x as i64, cfg.n_v, cfg.v_max)?;
        let mut state = SpectralState::zeros(grid);
        seed_state(&mut state, &eq, seeds)?;
        let mut sim = Self::assemble(cfg, eq, state)?;
        let report = sim.check_initial_neutrality()?;
        sim.state.t = 0.0;
        Ok((sim, report))
    }

    /// Resume from a checkpointed state; the grid must match the config.
    pub fn resume(cfg: SimConfig, eq: Equilibrium, state: SpectralState) -> Result<Self> {
        cfg.validate()?;
        let expected = Grid::new(cfg.dim, cfg.n_x as i64, cfg.n_v, cfg.v_max)?;
        if state.grid != expected {
            return Err(LandauError::GridMismatch(format!(
                "checkpoint grid {:?} does not match configured grid {:?}",
                state.grid, expected
            )));
        }
        if eq.dim != cfg.dim {
            return Err(LandauError::Config(format!(
                "equilibrium dimension {} does not match configured dimension {}",
                eq.dim, cfg.dim
            )));
        }
        Self::assemble(cfg, eq, state)
    }

    fn assemble(cfg: SimConfig, eq: Equilibrium, state: SpectralState) -> Result<Self> {
        let grid = state.grid.clone();
        let d = grid.dim;
        let n_v = grid.n_v;
        let modes = grid.lattice_modes();
        let fft_pos: Vec<usize> = modes.iter().map(|m| grid.fft_position_of(m)).collect();
        let mode_axes: Vec<[usize; MAX_DIM]> = (0..grid.modes_total())
            .map(|flat| grid.mode_axes_of_flat(flat))
            .collect();
        let v_axes: Vec<[usize; MAX_DIM]> = (0..grid.v_total())
            .map(|flat| grid.v_axes_of_flat(flat))
            .collect();
        let v_axis_vals: Vec<f64> = (0..n_v).map(|j| grid.v_axis_value(j)).collect();
        let eta = grid.eta_grid()?;
        let eta_axis: Vec<f64> = (0..n_v).map(|j| eta.axis_value(j)).collect();
        let mu_v: Vec<f64> = (0..grid.v_total())
            .map(|flat| {
                let v = grid.v_of_flat(flat);
                eq.mu(&v[..d])
            })
            .collect();
        let half = 0.5 * cfg.dt;
        let k_axis = grid.k_axis_len();
        let mut transport_half = Vec::with_capacity(k_axis * n_v);
        for a in 0..k_axis {
            let k = a as i64 - grid.k_cut;
            for &v in &v_axis_vals {
                transport_half.push(cis(-(k as f64) * v * half));
            }
        }
        let mut full_shape = vec![n_v; d];
        full_shape.extend(std::iter::repeat(grid.n_x).take(d));
        let mut v_pass_shape = vec![n_v; d];
        v_pass_shape.push(grid.x_total());
        let x_shape = vec![grid.n_x; d];
        Ok(Self {
            cfg,
            eq,
            state,
            fft: FftCache::new(),
            modes,
            fft_pos,
            mode_axes,
            v_axes,
            eta_axis,
            mu_v,
            transport_half,
            full_shape,
            v_pass_shape,
            x_shape,
            accel_buf: Vec::new(),
        })
    }

    fn check_initial_neutrality(&self) -> Result<InitReport> {
        let rho_p = self.state.density(&self.state.f_plus);
        let rho_m = self.state.density(&self.state.f_minus);
        let defect = neutrality_defect(&self.state.grid, &rho_p, &rho_m);
        if defect > NEUTRALITY_TOL {
            return Err(LandauError::Neutrality(defect));
        }
        Ok(InitReport {
            neutrality: defect,
            g_lambda1: 0.0,
        })
    }

    /// Initial-state report: neutrality plus G[f⁰] at z = λ1.
    pub fn initial_report(&self, params: &GevreyParams) -> Result<InitReport> {
        let mut report = self.check_initial_neutrality()?;
        let snap = self.gliding_frame()?;
        report.g_lambda1 = g_functional(&snap, params.lambda1, params)?.value;
        Ok(report)
    }

    pub fn grid(&self) -> &Grid {
        &self.state.grid
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Species density modes in lattice order.
    pub fn density_of(&self, species: Species) -> Vec<Complex64> {
        match species {
            Species::Plus => self.state.density(&self.state.f_plus),
            Species::Minus => self.state.density(&self.state.f_minus),
        }
    }

    /// Species densities at one mode.
    pub fn rho_at(&self, mode: &Mode) -> Result<(Complex64, Complex64)> {
        let flat = self.state.grid.flat_of_mode(mode).ok_or_else(|| {
            LandauError::GridMismatch(format!("mode {} outside the lattice", mode.label()))
        })?;
        let v_total = self.state.grid.v_total();
        let weight = self.state.grid.d_v().powi(self.state.grid.dim as i32);
        let sum = |data: &[Complex64]| -> Complex64 {
            data[flat * v_total..(flat + 1) * v_total]
                .iter()
                .sum::<Complex64>()
                * weight
        };
        Ok((sum(&self.state.f_plus), sum(&self.state.f_minus)))
    }

    /// Species mass perturbations ∫∫ f_± = ρ̂_±(0).
    pub fn mass(&self) -> (Complex64, Complex64) {
        let zero = Mode::new(&vec![0i64; self.state.grid.dim]).expect("dim validated");
        self.rho_at(&zero).expect("zero mode is on lattice")
    }

    /// Advance one Strang step of length dt.
    pub fn step(&mut self) -> Result<StepDiag> {
        let d = self.state.grid.dim;
        let transport_phase =
            self.cfg.dt * self.cfg.v_max * self.state.grid.k_cut as f64 * d as f64;
        if transport_phase > self.cfg.transport_limit {
            return Err(LandauError::StepSanity(format!(
                "transport phase {transport_phase:.3e} per step exceeds limit {:.3e}",
                self.cfg.transport_limit
            )));
        }

        self.apply_half_transport();

        let rho_p = self.state.density(&self.state.f_plus);
        let rho_m = self.state.density(&self.state.f_minus);
        let rho0 = neutrality_defect(&self.state.grid, &rho_p, &rho_m);
        let mut max_e = 0.0f64;
        if self.cfg.zero_field {
            if rho0 > NEUTRALITY_TOL {
                return Err(LandauError::Neutrality(rho0));
            }
        } else {
            let rho_tot: Vec<Complex64> = rho_p
                .iter()
                .zip(&rho_m)
                .map(|(&p, &m)| p - m)
                .collect();
            let field = field_from_density(&self.modes, &rho_tot, NEUTRALITY_TOL)?;
            let e_grid = self.field_on_grid(&field);
            for x in 0..self.state.grid.x_total() {
                let mag: f64 = e_grid.iter().map(|comp| comp[x] * comp[x]).sum::<f64>().sqrt();
                max_e = max_e.max(mag);
            }
            let accel_phase = self.cfg.dt
                * max_e
                * (std::f64::consts::PI * self.state.grid.n_v as f64
                    / (2.0 * self.state.grid.v_max));
            if accel_phase > self.cfg.accel_limit {
                return Err(LandauError::StepSanity(format!(
                    "acceleration phase {accel_phase:.3e} per step exceeds limit {:.3e}",
                    self.cfg.accel_limit
                )));
            }
            // A vanishing field makes the shift the identity; skip the
            // transform round trip so the state is preserved bitwise.
            if max_e > 0.0 {
                self.accelerate(Species::Plus, &e_grid)?;
                self.accelerate(Species::Minus, &e_grid)?;
            }
        }

        self.apply_half_transport();
        self.state.t += self.cfg.dt;

        let boundary_mass = self.state.boundary_mass();
        if boundary_mass > self.cfg.boundary_tol {
            return Err(LandauError::BoundaryMass {
                mass: boundary_mass,
                tol: self.cfg.boundary_tol,
                t: self.state.t,
            });
        }
        Ok(StepDiag {
            t: self.state.t,
            max_e,
            boundary_mass,
            rho0_abs: rho0,
        })
    }

    /// Exact half-step free transport: f̂(k, v) ← e^{−i k·v dt/2} f̂(k, v).
    fn apply_half_transport(&mut self) {
        let d = self.state.grid.dim;
        let n_v = self.state.grid.n_v;
        let v_total = self.state.grid.v_total();
        for (m, ma) in self.mode_axes.iter().enumerate() {
            let base = m * v_total;
            for (v, va) in self.v_axes.iter().enumerate() {
                let mut phase = self.transport_half[ma[0] * n_v + va[0]];
                for axis in 1..d {
                    phase *= self.transport_half[ma[axis] * n_v + va[axis]];
                }
                self.state.f_plus[base + v] *= phase;
                self.state.f_minus[base + v] *= phase;
            }
        }
    }

    /// Real-space field components on the padded x-grid.
    fn field_on_grid(&self, field: &[[Complex64; MAX_DIM]]) -> Vec<Vec<f64>> {
        let d = self.state.grid.dim;
        let x_total = self.state.grid.x_total();
        let inv_two_pi_d = (2.0 * std::f64::consts::PI).powi(-(d as i32));
        let mut comps = Vec::with_capacity(d);
        let mut spec = vec![ZERO; x_total];
        for c in 0..d {
            spec.fill(ZERO);
            for (m, &pos) in self.fft_pos.iter().enumerate() {
                spec[pos] = field[m][c] * inv_two_pi_d;
            }
            for axis in 0..d {
                fft_axis(&self.fft, &mut spec, &self.x_shape, axis, true);
            }
            comps.push(spec.iter().map(|z| z.re).collect());
        }
        comps
    }

    /// Exact acceleration sub-step: shift (μ + f_s)(x, ·) by c_s(x) = s·E(x)·dt
    /// in v via the velocity transform, with s = +ε for ions, −1 for electrons.
    fn accelerate(&mut self, species: Species, e_grid: &[Vec<f64>]) -> Result<()> {
        let d = self.state.grid.dim;
        let n_v = self.state.grid.n_v;
        let n_x = self.state.grid.n_x;
        let v_total = self.state.grid.v_total();
        let x_total = self.state.grid.x_total();
        let modes_total = self.state.grid.modes_total();
        let sign = match species {
            Species::Plus => self.cfg.epsilon,
            Species::Minus => -1.0,
        };
        let shift_scale = sign * self.cfg.dt;
        let inv_two_pi_d = (2.0 * std::f64::consts::PI).powi(-(d as i32));
        let gather_scale = (2.0 * std::f64::consts::PI / n_x as f64).powi(d as i32);
        let inv_nv_d = (n_v as f64).powi(-(d as i32));

        let needed = v_total * x_total;
        if self.accel_buf.len() != needed {
            self.accel_buf = vec![ZERO; needed];
        }
        let data = match species {
            Species::Plus => &mut self.state.f_plus,
            Species::Minus => &mut self.state.f_minus,
        };
        let buf = &mut self.accel_buf;

        // Scatter modes onto the padded grid and invert in x, one v-row each.
        for v in 0..v_total {
            let row = &mut buf[v * x_total..(v + 1) * x_total];
            row.fill(ZERO);
            for m in 0..modes_total {
                row[self.fft_pos[m]] = data[m * v_total + v] * inv_two_pi_d;
            }
        }
        for axis in 0..d {
            fft_axis(&self.fft, buf, &self.full_shape, d + axis, true);
        }

        // Work on the full distribution μ + f.
        for v in 0..v_total {
            let mu = self.mu_v[v];
            for slot in &mut buf[v * x_total..(v + 1) * x_total] {
                slot.re += mu;
            }
        }

        // To η, apply the shift phases, and back.
        for axis in 0..d {
            fft_axis(&self.fft, buf, &self.v_pass_shape, axis, false);
        }
        for v in 0..v_total {
            let va = self.v_axes[v];
            let row = &mut buf[v * x_total..(v + 1) * x_total];
            for (x, slot) in row.iter_mut().enumerate() {
                let mut theta = 0.0;
                for (axis, e_comp) in e_grid.iter().enumerate() {
                    theta -= self.eta_axis[va[axis]] * shift_scale * e_comp[x];
                }
                *slot *= cis(theta);
            }
        }
        for axis in 0..d {
            fft_axis(&self.fft, buf, &self.v_pass_shape, axis, true);
        }
        for v in 0..v_total {
            let mu = self.mu_v[v];
            for slot in &mut buf[v * x_total..(v + 1) * x_total] {
                *slot = *slot * inv_nv_d - mu;
            }
        }

        // Forward in x and gather the retained modes (2/3-rule truncation).
        for axis in 0..d {
            fft_axis(&self.fft, buf, &self.full_shape, d + axis, false);
        }
        for v in 0..v_total {
            let row = &buf[v * x_total..(v + 1) * x_total];
            for m in 0..modes_total {
                let value = row[self.fft_pos[m]] * gather_scale;
                if !value.re.is_finite() || !value.im.is_finite() {
                    return Err(LandauError::NonFinite(format!(
                        "acceleration produced a non-finite spectrum at t = {}",
                        self.state.t
                    )));
                }
                data[m * v_total + v] = value;
            }
        }
        Ok(())
    }

    /// Gliding-frame spectra ĝ_±(t, k, η) = f̂_±(t, k, η − kt) with η-gradients,
    /// on the η-grid of the velocity transform. Fails closed when spectral
    /// content reaches the outer η band (aliasing).
    pub fn gliding_frame(&self) -> Result<GlidingSnapshot> {
        let grid = &self.state.grid;
        let d = grid.dim;
        let v_total = grid.v_total();
        let modes_total = grid.modes_total();
        let eta = grid.eta_grid()?;
        let t = self.state.t;
        let weight = grid.d_v().powi(d as i32);

        // Offset phases Π_c e^{i η_c v_max} turning the DFT into the stated
        // velocity transform, per flat η cell.
        let offset: Vec<Complex64> = (0..v_total)
            .map(|flat| {
                let va = self.v_axes[flat];
                let mut theta = 0.0;
                for axis in 0..d {
                    theta += self.eta_axis[va[axis]] * grid.v_max;
                }
                cis(theta)
            })
            .collect();

        let mut g_plus = Array2::from_elem((modes_total, v_total), ZERO);
        let mut g_minus = Array2::from_elem((modes_total, v_total), ZERO);
        let mut dg_plus = vec![Array2::from_elem((modes_total, v_total), ZERO); d];
        let mut dg_minus = vec![Array2::from_elem((modes_total, v_total), ZERO); d];
        let v_shape = vec![grid.n_v; d];
        let mut modulated = vec![ZERO; v_total];
        let mut lane = vec![ZERO; v_total];

        for (data, g_out, dg_out) in [
            (&self.state.f_plus, &mut g_plus, &mut dg_plus),
            (&self.state.f_minus, &mut g_minus, &mut dg_minus),
        ] {
            for (m, mode) in self.modes.iter().enumerate() {
                for v in 0..v_total {
                    let vv = grid.v_of_flat(v);
                    let mut kv = 0.0;
                    for (axis, &c) in mode.comps().iter().enumerate() {
                        kv += c as f64 * vv[axis];
                    }
                    modulated[v] = data[m * v_total + v] * cis(kv * t);
                }
                lane.copy_from_slice(&modulated);
                for axis in 0..d {
                    fft_axis(&self.fft, &mut lane, &v_shape, axis, false);
                }
                for v in 0..v_total {
                    g_out[(m, v)] = lane[v] * offset[v] * weight;
                }
                for comp in 0..d {
                    for v in 0..v_total {
                        let vv = grid.v_of_flat(v);
                        lane[v] = modulated[v] * Complex64::new(0.0, -vv[comp]);
                    }
                    for axis in 0..d {
                        fft_axis(&self.fft, &mut lane, &v_shape, axis, false);
                    }
                    for v in 0..v_total {
                        dg_out[comp][(m, v)] = lane[v] * offset[v] * weight;
                    }
                }
            }
        }

        // Aliasing monitor: content in the outer η band means the shifted
        // spectrum no longer fits the grid.
        let band = ALIAS_BAND_START * eta.eta_max();
        let mut peak = 0.0f64;
        for arr in [&g_plus, &g_minus] {
            for value in arr.iter() {
                peak = peak.max(value.norm());
            }
        }
        if peak > 0.0 {
            for arr in [&g_plus, &g_minus] {
                for m in 0..modes_total {
                    for v in 0..v_total {
                        let in_band = (0..d).any(|axis| {
                            self.eta_axis[self.v_axes[v][axis]].abs() >= band
                        });
                        if !in_band {
                            continue;
                        }
                        let level = arr[(m, v)].norm();
                        if level > ALIAS_LEVEL * peak {
                            return Err(LandauError::Aliasing {
                                mode: self.modes[m].label(),
                                level: level / peak,
                                t,
                            });
                        }
                    }
                }
            }
        }

        Ok(GlidingSnapshot {
            t,
            modes: self.modes.clone(),
            eta,
            g_plus,
            g_minus,
            dg_plus,
            dg_minus,
        })
    }

    /// Direct evaluation of ĝ_±(t, k, η) at an arbitrary η (no grid).
    pub fn gliding_eval(&self, mode: &Mode, eta: &[f64]) -> Result<[Complex64; 2]> {
        let grid = &self.state.grid;
        if eta.len() != grid.dim {
            return Err(LandauError::UnsupportedDim(eta.len()));
        }
        let flat = grid.flat_of_mode(mode).ok_or_else(|| {
            LandauError::GridMismatch(format!("mode {} outside the lattice", mode.label()))
        })?;
        let v_total = grid.v_total();
        let weight = grid.d_v().powi(grid.dim as i32);
        let t = self.state.t;
        let mut out = [ZERO; 2];
        for (slot, data) in out.iter_mut().zip([&self.state.f_plus, &self.state.f_minus]) {
            let mut acc = ZERO;
            for v in 0..v_total {
                let vv = grid.v_of_flat(v);
                let mut theta = 0.0;
                for (axis, &c) in mode.comps().iter().enumerate() {
                    theta += (c as f64 * t - eta[axis]) * vv[axis];
                }
                acc += data[flat * v_total + v] * cis(theta);
            }
            *slot = acc * weight;
        }
        Ok(out)
    }
}

fn seed_state(state: &mut SpectralState, eq: &Equilibrium, seeds: &[SeedMode]) -> Result<()> {
    let grid = state.grid.clone();
    let d = grid.dim;
    let v_total = grid.v_total();
    let two_pi_d = (2.0 * std::f64::consts::PI).powi(d as i32);
    for seed in seeds {
        if seed.k.dim() != d {
            return Err(LandauError::Config(format!(
                "seed mode {} has dimension {}, expected {}",
                seed.k.label(),
                seed.k.dim(),
                d
            )));
        }
        if !seed.amp.is_finite() {
            return Err(LandauError::Config(format!(
                "seed amplitude must be finite, got {}",
                seed.amp
            )));
        }
        let targets: Vec<(usize, f64)> = if seed.k.is_zero() {
            let flat = grid.flat_of_mode(&seed.k).expect("zero mode is on lattice");
            vec![(flat, seed.amp * two_pi_d)]
        } else {
            let flat = grid.flat_of_mode(&seed.k).ok_or_else(|| {
                LandauError::Config(format!(
                    "seed mode {} is outside the retained lattice",
                    seed.k.label()
                ))
            })?;
            let neg = grid
                .flat_of_mode(&seed.k.negated())
                .expect("lattice is symmetric");
            let half = 0.5 * seed.amp * two_pi_d;
            vec![(flat, half), (neg, half)]
        };
        let data = match seed.species {
            Species::Plus => &mut state.f_plus,
            Species::Minus => &mut state.f_minus,
        };
        for v in 0..v_total {
            let vv = grid.v_of_flat(v);
            let profile = seed.profile.eval(eq, &vv[..d])?;
            for &(flat, factor) in &targets {
                data[flat * v_total + v] += Complex64::new(factor * profile, 0.0);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::gaussian_equilibrium;
    use crate::generators::GevreyParams;
    use crate::linear::{build_source, solve_volterra, EtaProfile, InitialMode};
    use crate::series::TimeGrid;
    use std::f64::consts::PI;

    fn params() -> GevreyParams {
        GevreyParams {
            gamma: 1.0,
            sigma: 4.0,
            alpha: 0.2,
            lambda0: 0.05,
            delta: 0.5,
            lambda1: 0.4,
        }
    }

    fn cosine_sim(cfg: &SimConfig, amp: f64) -> Simulation {
        let eq = gaussian_equilibrium(cfg.dim).unwrap();
        let mut k = [0i64; 2];
        k[..cfg.dim].iter_mut().for_each(|c| *c = 1);
        let seeds = vec![SeedMode {
            k: Mode::new(&k[..cfg.dim]).unwrap(),
            amp,
            species: Species::Plus,
            profile: VelocityProfile::Mu,
        }];
        Simulation::new(cfg.clone(), eq, &seeds).unwrap().0
    }

    #[test]
    fn seed_density_matches_the_cosine_example() {
        let amp = 1e-3;
        let cfg = SimConfig {
            n_x: 4,
            n_v: 64,
            v_max: 8.0,
            ..SimConfig::default()
        };
        let eq = gaussian_equilibrium(1).unwrap();
        let seeds = vec![SeedMode {
            k: Mode::one_d(1),
            amp,
            species: Species::Plus,
            profile: VelocityProfile::Mu,
        }];
        let (sim, report) = Simulation::new(cfg, eq, &seeds).unwrap();
        assert_eq!(report.neutrality, 0.0);
        for mode in sim.modes() {
            let (rho_p, rho_m) = sim.rho_at(mode).unwrap();
            assert_eq!(rho_m, Complex64::default());
            if mode.comps()[0].abs() == 1 {
                // amp·cos(x)·μ(v) carries amp/2 per exponential, ρ̂ = amp·π.
                assert!(
                    (rho_p.re - amp * PI).abs() <= 1e-12 * amp * PI,
                    "rel defect {}",
                    (rho_p.re - amp * PI).abs() / (amp * PI)
                );
                assert!(rho_p.im.abs() <= 1e-14 * amp);
            } else {
                assert!(rho_p.norm() <= 1e-14 * amp);
            }
        }
    }

    #[test]
    fn zero_seed_is_a_fixed_point() {
        let cfg = SimConfig {
            n_x: 4,
            n_v: 32,
            v_max: 6.0,
            t_max: 0.5,
            ..SimConfig::default()
        };
        let eq = gaussian_equilibrium(1).unwrap();
        let (mut sim, _) = Simulation::new(cfg.clone(), eq, &[]).unwrap();
        for _ in 0..cfg.n_steps() {
            let diag = sim.step().unwrap();
            assert_eq!(diag.max_e, 0.0);
        }
        assert!(sim.state.f_plus.iter().all(|c| c.norm() == 0.0));
        assert!(sim.state.f_minus.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn field_solve_matches_hand_values_and_enforces_neutrality() {
        let grid = Grid::new(1, 2, 8, 4.0).unwrap();
        let modes = grid.lattice_modes();
        let mut rho = vec![Complex64::default(); modes.len()];
        let at = |k: i64| modes.iter().position(|m| m.comps() == [k]).unwrap();
        rho[at(1)] = Complex64::new(0.0, 2.0);
        rho[at(-2)] = Complex64::new(4.0, 0.0);
        let field = field_from_density(&modes, &rho, 1e-12).unwrap();
        // Ê(k) = −i k ρ̂(k)/|k|²: k=1 → −i·(2i) = 2; k=−2 → i·4/2 = 2i.
        assert!((field[at(1)][0] - Complex64::new(2.0, 0.0)).norm() <= 1e-15);
        assert!((field[at(-2)][0] - Complex64::new(0.0, 2.0)).norm() <= 1e-15);
        assert_eq!(field[at(0)][0], Complex64::default());

        rho[at(0)] = Complex64::new(1e-3, 0.0);
        let err = field_from_density(&modes, &rho, 1e-12).unwrap_err();
        assert!(matches!(err, LandauError::Neutrality(_)));
    }

    #[test]
    fn free_streaming_matches_phase_mixing() {
        let amp = 1e-3;
        let cfg = SimConfig {
            n_x: 2,
            n_v: 128,
            v_max: 8.0,
            t_max: 5.0,
            zero_field: true,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, amp);
        for _ in 0..cfg.n_steps() {
            sim.step().unwrap();
        }
        let t = sim.state.t;
        let scale = amp * PI;
        let expected = 0.5 * amp * 2.0 * PI * (-0.5 * t * t).exp();
        let (rho_p, rho_m) = sim.rho_at(&Mode::one_d(1)).unwrap();
        assert!(
            (rho_p.re - expected).abs() <= 1e-12 * scale,
            "defect {:e} vs seed scale {:e}",
            (rho_p.re - expected).abs(),
            scale
        );
        assert!(rho_p.im.abs() <= 1e-12 * scale);
        assert_eq!(rho_m, Complex64::default());
        let (rho_p2, _) = sim.rho_at(&Mode::one_d(2)).unwrap();
        assert!(rho_p2.norm() <= 1e-16);
    }

    #[test]
    fn two_dim_free_streaming_matches_phase_mixing() {
        let amp = 1e-3;
        let cfg = SimConfig {
            dim: 2,
            n_x: 2,
            n_v: 32,
            v_max: 7.0,
            t_max: 2.0,
            zero_field: true,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, amp);
        for _ in 0..cfg.n_steps() {
            sim.step().unwrap();
        }
        let t = sim.state.t;
        // Seed mode k=(1,1): ρ̂(t) = ½·amp·(2π)²·e^{−|k|²t²/2}, |k|² = 2.
        let expected = 0.5 * amp * (2.0 * PI).powi(2) * (-t * t).exp();
        let (rho_p, _) = sim.rho_at(&Mode::new(&[1, 1]).unwrap()).unwrap();
        assert!((rho_p.re - expected).abs() <= 1e-9 * expected);
        assert!(rho_p.im.abs() <= 1e-9 * expected);
        let (off_diag, _) = sim.rho_at(&Mode::new(&[1, -1]).unwrap()).unwrap();
        assert!(off_diag.norm() <= 1e-16);
    }

    #[test]
    fn frame_identity_and_conservation_hold_on_a_coupled_run() {
        let cfg = SimConfig {
            n_x: 8,
            n_v: 128,
            v_max: 8.0,
            epsilon: 0.5,
            t_max: 2.0,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, 1e-2);
        for _ in 0..cfg.n_steps() {
            let diag = sim.step().unwrap();
            assert!(diag.rho0_abs <= 1e-13);
        }
        let (mass_p, mass_m) = sim.mass();
        assert!(mass_p.norm() <= 1e-13 && mass_m.norm() <= 1e-13);
        assert!(sim.state.reality_defect() <= 1e-12);

        let t = sim.state.t;
        let scale = sim
            .modes()
            .iter()
            .map(|m| {
                let (p, q) = sim.rho_at(m).unwrap();
                (p - q).norm()
            })
            .fold(0.0f64, f64::max);
        for mode in sim.modes() {
            let eta: Vec<f64> = mode.comps().iter().map(|&c| c as f64 * t).collect();
            let g = sim.gliding_eval(mode, &eta).unwrap();
            let (rho_p, rho_m) = sim.rho_at(mode).unwrap();
            assert!((g[0] - rho_p).norm() <= 1e-12 * scale);
            assert!((g[1] - rho_m).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gliding_gradient_matches_finite_differences() {
        let cfg = SimConfig {
            n_x: 4,
            n_v: 64,
            v_max: 7.0,
            epsilon: 0.5,
            t_max: 2.0,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, 1e-2);
        for _ in 0..cfg.n_steps() {
            sim.step().unwrap();
        }
        let snap = sim.gliding_frame().unwrap();
        let mode = Mode::one_d(1);
        let mi = sim.modes().iter().position(|m| *m == mode).unwrap();
        // Only bins with spectral content well above the roundoff floor.
        for bin in [1usize, 3, 5] {
            let eta0 = snap.eta.axis_value(bin);
            let h = 1e-5;
            let up = sim.gliding_eval(&mode, &[eta0 + h]).unwrap();
            let down = sim.gliding_eval(&mode, &[eta0 - h]).unwrap();
            let fd = (up[0] - down[0]) / (2.0 * h);
            let analytic = snap.dg_plus[0][(mi, bin)];
            assert!((fd - analytic).norm() <= 1e-6 * analytic.norm());
        }
    }

    #[test]
    fn gliding_spectrum_respects_reality_symmetry() {
        let cfg = SimConfig {
            n_x: 4,
            n_v: 64,
            v_max: 7.0,
            epsilon: 0.5,
            t_max: 1.0,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, 1e-2);
        for _ in 0..cfg.n_steps() {
            sim.step().unwrap();
        }
        for k in 1..=2i64 {
            for eta in [0.3, 0.9, 1.7] {
                let fwd = sim.gliding_eval(&Mode::one_d(k), &[eta]).unwrap();
                let bwd = sim.gliding_eval(&Mode::one_d(-k), &[-eta]).unwrap();
                for s in 0..2 {
                    let defect = (fwd[s] - bwd[s].conj()).norm();
                    assert!(defect <= 1e-12, "defect {defect:e}");
                }
            }
        }
    }

    #[test]
    fn nonlinear_correction_scales_quadratically() {
        // The leading correction beyond the linearised dynamics is quadratic in
        // the seed amplitude; it shows up at k=0 and k=±2 (the k=±1 correction
        // is cubic), so the comparison includes k=2.
        let dt = 0.005;
        let t_max = 2.0;
        let diff_at = |amp: f64| -> f64 {
            let eq = gaussian_equilibrium(1).unwrap();
            let grid = TimeGrid::new(dt, t_max).unwrap();
            let src = build_source(
                &[InitialMode {
                    k: Mode::one_d(1),
                    amp_plus: Complex64::new(amp * PI, 0.0),
                    amp_minus: Complex64::default(),
                    profile: EtaProfile::GaussianEta { width: 1.0 },
                }],
                &grid,
            )
            .unwrap();
            let sol = solve_volterra(&src, &eq, 0.5).unwrap();
            let cfg = SimConfig {
                n_x: 2,
                n_v: 64,
                v_max: 7.0,
                epsilon: 0.5,
                dt,
                t_max,
                ..SimConfig::default()
            };
            let mut sim = cosine_sim(&cfg, amp);
            let mut worst = 0.0f64;
            for n in 0..cfg.n_steps() {
                sim.step().unwrap();
                let (p1, m1) = sim.rho_at(&Mode::one_d(1)).unwrap();
                let (p2, m2) = sim.rho_at(&Mode::one_d(2)).unwrap();
                worst = worst.max(((p1 - m1) - sol.rho(n + 1, 0)).norm());
                worst = worst.max((p2 - m2).norm());
            }
            worst
        };
        let ratio = diff_at(0.05) / diff_at(0.025);
        assert!((3.0..=5.5).contains(&ratio), "amplitude ratio {ratio}");
    }

    #[test]
    fn strang_splitting_is_second_order() {
        let run = |dt: f64| -> Vec<Complex64> {
            let cfg = SimConfig {
                n_x: 2,
                n_v: 64,
                v_max: 7.0,
                epsilon: 0.5,
                dt,
                t_max: 1.0,
                ..SimConfig::default()
            };
            let mut sim = cosine_sim(&cfg, 0.05);
            for _ in 0..cfg.n_steps() {
                sim.step().unwrap();
            }
            [1i64, 2]
                .iter()
                .map(|&k| {
                    let (p, m) = sim.rho_at(&Mode::one_d(k)).unwrap();
                    p - m
                })
                .collect()
        };
        let reference = run(0.00625);
        let err = |dt: f64| -> f64 {
            run(dt)
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.05) / err(0.025);
        assert!((3.0..=5.5).contains(&ratio), "splitting ratio {ratio}");
    }

    #[test]
    fn checkpoint_resume_continues_bitwise() {
        let cfg = SimConfig {
            n_x: 4,
            n_v: 64,
            v_max: 7.0,
            epsilon: 0.5,
            t_max: 1.0,
            ..SimConfig::default()
        };
        let mut straight = cosine_sim(&cfg, 1e-2);
        for _ in 0..10 {
            straight.step().unwrap();
        }
        let path = std::env::temp_dir().join(format!("landau-ck-{}.bin", std::process::id()));
        straight.state.save_checkpoint(&path).unwrap();
        for _ in 0..10 {
            straight.step().unwrap();
        }

        let restored = SpectralState::load_checkpoint(&path).unwrap();
        let eq = gaussian_equilibrium(1).unwrap();
        let mut resumed = Simulation::resume(cfg.clone(), eq, restored).unwrap();
        for _ in 0..10 {
            resumed.step().unwrap();
        }
        assert_eq!(straight.state.t, resumed.state.t);
        assert_eq!(straight.state.f_plus, resumed.state.f_plus);
        assert_eq!(straight.state.f_minus, resumed.state.f_minus);

        let restored = SpectralState::load_checkpoint(&path).unwrap();
        std::fs::remove_file(&path).unwrap();
        let mismatched = SimConfig {
            n_v: 128,
            ..cfg
        };
        let eq = gaussian_equilibrium(1).unwrap();
        let err = match Simulation::resume(mismatched, eq, restored) {
            Err(e) => e,
            Ok(_) => panic!("grid mismatch was accepted"),
        };
        assert!(matches!(err, LandauError::GridMismatch(_)));
    }

    #[test]
    fn runtime_guards_fire_with_diagnostics() {
        // Velocity box too small: boundary occupancy trips within a step or two.
        let cfg = SimConfig {
            n_x: 2,
            n_v: 32,
            v_max: 3.0,
            t_max: 1.0,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, 1e-2);
        let mut hit = None;
        for _ in 0..cfg.n_steps() {
            if let Err(e) = sim.step() {
                hit = Some(e);
                break;
            }
        }
        assert!(matches!(hit, Some(LandauError::BoundaryMass { .. })));

        // Coarse velocity grid: the gliding spectrum reaches the edge band.
        let cfg = SimConfig {
            n_x: 2,
            n_v: 16,
            v_max: 8.0,
            ..SimConfig::default()
        };
        let sim = cosine_sim(&cfg, 1e-3);
        assert!(matches!(
            sim.gliding_frame().unwrap_err(),
            LandauError::Aliasing { .. }
        ));

        // Absurd step size: transport phase sanity cap.
        let cfg = SimConfig {
            n_x: 2,
            n_v: 32,
            v_max: 6.0,
            dt: 100.0,
            t_max: 200.0,
            ..SimConfig::default()
        };
        let mut sim = cosine_sim(&cfg, 1e-3);
        assert!(matches!(
            sim.step().unwrap_err(),
            LandauError::StepSanity(_)
        ));

        // Charged seed: neutrality is enforced at construction.
        let eq = gaussian_equilibrium(1).unwrap();
        let seeds = vec![SeedMode {
            k: Mode::one_d(0),
            amp: 1e-3,
            species: Species::Plus,
            profile: VelocityProfile::Mu,
        }];
        let err = match Simulation::new(SimConfig::default(), eq, &seeds) {
            Err(e) => e,
            Ok(_) => panic!("charged seed was accepted"),
        };
        assert!(matches!(err, LandauError::Neutrality(_)));
    }

    #[test]
    fn initial_report_evaluates_the_seed_functional() {
        let cfg = SimConfig {
            n_x: 4,
            n_v: 64,
            v_max: 7.0,
            ..SimConfig::default()
        };
        let sim = cosine_sim(&cfg, 1e-3);
        let report = sim.initial_report(&params()).unwrap();
        assert_eq!(report.neutrality, 0.0);
        assert!(report.g_lambda1.is_finite() && report.g_lambda1 > 0.0);
    }
}

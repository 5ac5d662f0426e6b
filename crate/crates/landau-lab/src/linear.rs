//! Linearized dynamics solved two independent ways — Volterra convolution
//! marching and resolvent-kernel reconstruction through a numerical inverse
//! Laplace transform — plus the kernel decay fit and the Gevrey growth check.

use crate::equilibria::Equilibrium;
use crate::error::{LandauError, Result};
use crate::generators::{f_from_values, f_functional, GevreyParams};
use crate::penrose::laplace_kernel_transform;
use crate::quad::gauss_legendre;
use crate::series::{DensitySeries, Mode, TimeGrid};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

/// Radial profile of an initial velocity transform, evaluated at |η| = |k|t.
#[derive(Clone, Debug)]
pub enum EtaProfile {
    /// e^{−r²/(2·width²)} — analytic, defined at every radius.
    GaussianEta { width: f64 },
    /// Piecewise-linear interpolation on a radial grid; fails outside it.
    RadialGrid { r: Vec<f64>, values: Vec<f64> },
}

impl EtaProfile {
    /// Validated radial-grid profile: strictly increasing nodes from 0.
    pub fn radial(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() || r.len() < 2 {
            return Err(LandauError::Config(format!(
                "radial profile needs matching node/value lists of length >= 2, \
                 got {} and {}",
                r.len(),
                values.len()
            )));
        }
        if r[0] != 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LandauError::Config(
                "radial profile nodes must increase strictly from 0".into(),
            ));
        }
        Ok(Self::RadialGrid { r, values })
    }

    pub fn eval(&self, radius: f64) -> Result<f64> {
        match self {
            Self::GaussianEta { width } => {
                let u = radius / width;
                Ok((-0.5 * u * u).exp())
            }
            Self::RadialGrid { r, values } => {
                let last = *r.last().expect("validated non-empty");
                if radius < 0.0 || radius > last {
                    return Err(LandauError::EtaOutOfRange {
                        eta: radius,
                        max: last,
                    });
                }
                let hi = r.partition_point(|&node| node < radius).max(1);
                let (r0, r1) = (r[hi - 1], r[hi]);
                let w = (radius - r0) / (r1 - r0);
                Ok(values[hi - 1] * (1.0 - w) + values[hi] * w)
            }
        }
    }
}

/// One seeded mode of linear initial data: f̂⁰_±(k,η) = amp_±·profile(|η|).
#[derive(Clone, Debug)]
pub struct InitialMode {
    pub k: Mode,
    pub amp_plus: Complex64,
    pub amp_minus: Complex64,
    pub profile: EtaProfile,
}

/// Free-streaming source Ŝ_±(t,k) = f̂⁰_±(k,kt) on a uniform time grid.
#[derive(Clone, Debug)]
pub struct SourceSeries {
    pub grid: TimeGrid,
    pub modes: Vec<Mode>,
    /// Indexed (time, mode).
    pub s_plus: Array2<Complex64>,
    pub s_minus: Array2<Complex64>,
}

impl SourceSeries {
    /// Total source Ŝ = Ŝ_+ − Ŝ_−.
    pub fn s_total(&self, ti: usize, mi: usize) -> Complex64 {
        self.s_plus[(ti, mi)] - self.s_minus[(ti, mi)]
    }
}

/// Evaluate Ŝ_±(t,k) = f̂⁰_±(k,kt); duplicate-k seeds accumulate.
pub fn build_source(seeds: &[InitialMode], grid: &TimeGrid) -> Result<SourceSeries> {
    let mut modes: Vec<Mode> = Vec::new();
    for seed in seeds {
        if seed.k.is_zero() {
            return Err(LandauError::ZeroMode);
        }
        if !modes.contains(&seed.k) {
            modes.push(seed.k);
        }
    }
    let nt = grid.len();
    let mut s_plus = Array2::zeros((nt, modes.len()));
    let mut s_minus = Array2::zeros((nt, modes.len()));
    for seed in seeds {
        let mi = modes.iter().position(|m| *m == seed.k).expect("inserted");
        let knorm = seed.k.norm();
        for ti in 0..nt {
            let p = seed.profile.eval(knorm * grid.t(ti))?;
            s_plus[(ti, mi)] += seed.amp_plus * p;
            s_minus[(ti, mi)] += seed.amp_minus * p;
        }
    }
    Ok(SourceSeries {
        grid: grid.clone(),
        modes,
        s_plus,
        s_minus,
    })
}

/// March the closed density equations by explicit trapezoidal convolution.
///
/// ρ̂_+ + ε(ρ̂_+−ρ̂_−)∗κ = Ŝ_+ and ρ̂_− − (ρ̂_+−ρ̂_−)∗κ = Ŝ_− with the memory
/// kernel κ(τ;k) = τ·μ̂(kτ); κ(0) = 0 makes every update explicit.
pub fn solve_volterra(
    src: &SourceSeries,
    eq: &Equilibrium,
    epsilon: f64,
) -> Result<DensitySeries> {
    if !(epsilon >= 0.0) {
        return Err(LandauError::Config(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    let nt = src.grid.len();
    let dt = src.grid.dt;
    let per_mode: Vec<Result<(Vec<Complex64>, Vec<Complex64>)>> = src
        .modes
        .par_iter()
        .enumerate()
        .map(|(mi, k)| {
            let kappa: Vec<f64> = (0..nt)
                .map(|n| {
                    let t = src.grid.t(n);
                    t * eq.mu_hat_ray(k, t)
                })
                .collect();
            let mut rp = vec![Complex64::default(); nt];
            let mut rm = vec![Complex64::default(); nt];
            let mut rho = vec![Complex64::default(); nt];
            rp[0] = src.s_plus[(0, mi)];
            rm[0] = src.s_minus[(0, mi)];
            rho[0] = rp[0] - rm[0];
            for n in 1..nt {
                let mut conv = 0.5 * kappa[n] * rho[0];
                for m in 1..n {
                    conv += kappa[n - m] * rho[m];
                }
                let mem = conv * dt;
                rp[n] = src.s_plus[(n, mi)] - epsilon * mem;
                rm[n] = src.s_minus[(n, mi)] + mem;
                rho[n] = rp[n] - rm[n];
                if !rho[n].is_finite() {
                    return Err(LandauError::NonFinite(format!(
                        "Volterra march at t = {}, k = {}",
                        src.grid.t(n),
                        k.label()
                    )));
                }
            }
            Ok((rp, rm))
        })
        .collect();

    let mut rho_plus = Array2::zeros((nt, src.modes.len()));
    let mut rho_minus = Array2::zeros((nt, src.modes.len()));
    for (mi, res) in per_mode.into_iter().enumerate() {
        let (rp, rm) = res?;
        for n in 0..nt {
            rho_plus[(n, mi)] = rp[n];
            rho_minus[(n, mi)] = rm[n];
        }
    }
    DensitySeries::from_species(src.grid.times(), src.modes.clone(), rho_plus, rho_minus)
}

/// Max trapezoidal residual of the marched solution in both density equations.
pub fn volterra_residual(
    series: &DensitySeries,
    src: &SourceSeries,
    eq: &Equilibrium,
    epsilon: f64,
) -> f64 {
    let nt = src.grid.len();
    let dt = src.grid.dt;
    let mut worst = 0.0f64;
    for (mi, k) in src.modes.iter().enumerate() {
        let kappa: Vec<f64> = (0..nt)
            .map(|n| {
                let t = src.grid.t(n);
                t * eq.mu_hat_ray(k, t)
            })
            .collect();
        for n in 0..nt {
            let mut conv = Complex64::default();
            for m in 0..=n {
                let w = if m == 0 || m == n { 0.5 } else { 1.0 };
                conv += w * kappa[n - m] * series.rho(m, mi);
            }
            let mem = conv * dt;
            let res_p =
                (series.rho_plus[(n, mi)] + epsilon * mem - src.s_plus[(n, mi)]).norm();
            let res_m = (series.rho_minus[(n, mi)] - mem - src.s_minus[(n, mi)]).norm();
            worst = worst.max(res_p).max(res_m);
        }
    }
    worst
}

/// Controls for the inverse-Laplace kernel evaluation.
#[derive(Clone, Debug)]
pub struct KernelOptions {
    /// Absolute tolerance budget for the contour remainder.
    pub tol: f64,
    /// Minimum allowed |1 + (1+ε)W| on the contour.
    pub denom_floor: f64,
    /// Hard cap on one-sided contour samples.
    pub max_contour: usize,
    /// Contour step override (default min(0.02, π/(T+30))).
    pub contour_step: Option<f64>,
    /// Decay-fit window in t.
    pub fit_window: (f64, f64),
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            denom_floor: 0.02,
            max_contour: 4096,
            contour_step: None,
            fit_window: (1.0, 15.0),
        }
    }
}

/// The resolvent kernel K̂(t,k) on a time grid, with its decay fit and the
/// contour-quadrature audit trail.
#[derive(Clone, Debug)]
pub struct KernelSeries {
    pub k: Mode,
    pub theta1: f64,
    pub times: Vec<f64>,
    pub dt: f64,
    pub k_hat: Vec<Complex64>,
    pub fit_c: f64,
    pub fit_theta: f64,
    /// Estimated truncation tail of the contour integral.
    pub tail_est: f64,
    /// Smallest |1 + (1+ε)W| met on the contour.
    pub denom_min: f64,
    /// One-sided contour samples used.
    pub contour_points: usize,
}

/// Memory kernel κ(t;k) = t·μ̂(kt).
fn kappa(eq: &Equilibrium, k: &Mode, t: f64) -> f64 {
    t * eq.mu_hat_ray(k, t)
}

/// (κ∗κ)(t) by Gauss–Legendre panels — the exact inverse transform of W².
fn kappa_self_convolution(eq: &Equilibrium, k: &Mode, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let width = (1.0 / k.norm()).min(1.0).min(t);
    let rule = gauss_legendre(16);
    let mut acc = 0.0;
    let mut a = 0.0;
    while a < t {
        let b = (a + width).min(t);
        acc += rule.integrate_real(a, b, |s| kappa(eq, k, s) * kappa(eq, k, t - s));
        a = b;
    }
    acc
}

/// Plan for one inverse-Laplace evaluation: sampled remainder values plus the
/// audit numbers.
struct ContourData {
    samples: Vec<Complex64>,
    h: f64,
    tail_est: f64,
    denom_min: f64,
}

/// Sample r̃(λ) = a²W³/(1+aW) along Re λ = −θ1|k|, doubling the reach until
/// the estimated |Im λ| > τ_max tail is inside tolerance.
fn sample_contour_remainder(
    eq: &Equilibrium,
    k: &Mode,
    a: f64,
    sigma: f64,
    h: f64,
    opts: &KernelOptions,
) -> Result<ContourData> {
    let w_tol = opts.tol * 1e-2;
    let mut samples: Vec<Complex64> = Vec::new();
    let mut denom_min = f64::INFINITY;
    let mut m = (32.0 * k.norm().max(1.0)) as usize;
    loop {
        while samples.len() <= m {
            let j = samples.len();
            let lambda = Complex64::new(sigma, j as f64 * h);
            let w = laplace_kernel_transform(eq, k, lambda, w_tol)?;
            let denom = Complex64::new(1.0, 0.0) + a * w;
            let denom_abs = denom.norm();
            if denom_abs < opts.denom_floor {
                return Err(LandauError::ContourDenominator {
                    min: denom_abs,
                    floor: opts.denom_floor,
                    re: sigma,
                });
            }
            denom_min = denom_min.min(denom_abs);
            samples.push(a * a * w * w * w / denom);
        }
        let tau_max = m as f64 * h;
        // |r̃| falls off like τ^{−6}, so the one-sided tail integral is about
        // |r̃(τ_max)|·τ_max/5; both tails over 2π give the factor 1/(5π).
        let tail_est = samples[m].norm() * tau_max / (5.0 * std::f64::consts::PI);
        if tail_est <= opts.tol / 2.0 {
            return Ok(ContourData {
                samples,
                h,
                tail_est,
                denom_min,
            });
        }
        if 2 * m > opts.max_contour {
            return Err(LandauError::ContourTruncation {
                est: tail_est,
                tol: opts.tol,
                at: tau_max,
            });
        }
        m *= 2;
    }
}

/// Recover K̂(t,k) = L⁻¹[W/(1+aW)] on the grid, a = 1+ε.
///
/// The two leading Neumann terms W − aW² invert in closed form (κ and κ∗κ);
/// only the sixth-order remainder a²W³/(1+aW) needs contour quadrature, which
/// keeps the truncated contour short and the quadrature error far below the
/// leading terms.
pub fn kernel_inverse_laplace(
    eq: &Equilibrium,
    epsilon: f64,
    k: &Mode,
    theta1: f64,
    grid: &TimeGrid,
    opts: &KernelOptions,
) -> Result<KernelSeries> {
    if k.is_zero() {
        return Err(LandauError::ZeroMode);
    }
    if !(epsilon >= 0.0) {
        return Err(LandauError::Config(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if !(theta1 > 0.0 && theta1 < eq.theta0) {
        return Err(LandauError::Config(format!(
            "contour offset requires 0 < theta1 < theta0 = {}, got {theta1}",
            eq.theta0
        )));
    }
    let a = 1.0 + epsilon;
    let knorm = k.norm();
    let sigma = -theta1 * knorm;
    let times = grid.times();
    let t_end = *times.last().expect("non-empty grid");

    // Step small enough that the 2π/h periodization images of the inverse
    // transform are suppressed by the kernel's decay margin.
    let h = opts
        .contour_step
        .unwrap_or_else(|| 0.02f64.min(std::f64::consts::PI / (t_end + 30.0)));
    let contour = sample_contour_remainder(eq, k, a, sigma, h, opts)?;

    let mut k_hat = Vec::with_capacity(times.len());
    for &t in &times {
        let lead = kappa(eq, k, t) - a * kappa_self_convolution(eq, k, t);
        // Conjugate symmetry r̃(λ̄) = r̃(λ)̄ folds the two contour halves into
        // twice the real part of the upper half.
        let mut osc = samples_real_sum(&contour.samples, contour.h, t);
        osc *= (sigma * t).exp() * contour.h / (2.0 * std::f64::consts::PI);
        let value = lead + osc;
        if !value.is_finite() {
            return Err(LandauError::NonFinite(format!(
                "inverse-Laplace kernel at t = {t}, k = {}",
                k.label()
            )));
        }
        k_hat.push(Complex64::new(value, 0.0));
    }

    let (fit_c, fit_theta) = fit_kernel_decay(&times, &k_hat, knorm, theta1, opts)?;
    Ok(KernelSeries {
        k: *k,
        theta1,
        times,
        dt: grid.dt,
        k_hat,
        fit_c,
        fit_theta,
        tail_est: contour.tail_est,
        denom_min: contour.denom_min,
        contour_points: contour.samples.len(),
    })
}

/// r̃(σ) + 2·Σ_{j≥1} Re(r̃(σ+ijh)·e^{ijht}).
fn samples_real_sum(samples: &[Complex64], h: f64, t: f64) -> f64 {
    let rot = Complex64::cis(h * t);
    let mut phase = rot;
    let mut acc = samples[0].re;
    for s in &samples[1..] {
        acc += 2.0 * (s * phase).re;
        phase *= rot;
    }
    acc
}

/// Envelope fit of log|K̂| against |k|t on the configured window.
fn fit_kernel_decay(
    times: &[f64],
    k_hat: &[Complex64],
    knorm: f64,
    theta1: f64,
    opts: &KernelOptions,
) -> Result<(f64, f64)> {
    let (lo, hi) = opts.fit_window;
    let in_window: Vec<usize> = (0..times.len())
        .filter(|&n| times[n] >= lo && times[n] <= hi)
        .collect();
    let peak = in_window
        .iter()
        .map(|&n| k_hat[n].norm())
        .fold(0.0f64, f64::max);
    if peak < 1e-14 {
        // Degenerate kernel (e.g. μ̂ ≡ 0): report the contour rate itself.
        return Ok((0.0, theta1));
    }
    // Prefer local maxima of the oscillatory modulus; fall back to all
    // samples within a 30-nat band of the window peak.
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for &n in &in_window {
        if n == 0 || n + 1 >= k_hat.len() {
            continue;
        }
        let v = k_hat[n].norm();
        if v > 0.0 && v >= k_hat[n - 1].norm() && v >= k_hat[n + 1].norm() {
            maxima.push((knorm * times[n], v.ln()));
        }
    }
    let points: Vec<(f64, f64)> = if maxima.len() >= 4 {
        maxima
    } else {
        let floor = peak.ln() - 30.0;
        in_window
            .iter()
            .filter_map(|&n| {
                let v = k_hat[n].norm();
                (v > 0.0 && v.ln() > floor).then(|| (knorm * times[n], v.ln()))
            })
            .collect()
    };
    if points.len() < 4 {
        return Err(LandauError::FitPoints {
            need: 4,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|(x, _)| x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(LandauError::Invariant(
            "degenerate abscissa in kernel decay fit".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((intercept.exp(), -slope))
}

/// Forward audit: composite-Simpson Laplace transform of the computed K̂
/// against the closed resolvent K̃ = W/(1+aW). Returns the worst relative
/// error over probe points λ = 1 + iτ, τ ∈ {0, 0.7, 1.4, 2.8, 5.6}.
pub fn forward_laplace_check(
    ker: &KernelSeries,
    eq: &Equilibrium,
    epsilon: f64,
) -> Result<f64> {
    let a = 1.0 + epsilon;
    let n = ker.times.len() - 1;
    if n < 2 {
        return Err(LandauError::GridMismatch(
            "forward check needs at least 3 time nodes".into(),
        ));
    }
    let mut worst = 0.0f64;
    for tau in [0.0, 0.7, 1.4, 2.8, 5.6] {
        let lambda = Complex64::new(1.0, tau);
        let f = |i: usize| ker.k_hat[i] * (-lambda * ker.times[i]).exp();
        // Composite Simpson; odd grids finish with one trapezoid panel.
        let pairs = n / 2;
        let mut acc = Complex64::default();
        for p in 0..pairs {
            let i = 2 * p;
            acc += (f(i) + 4.0 * f(i + 1) + f(i + 2)) * (ker.dt / 3.0);
        }
        if n % 2 == 1 {
            acc += (f(n - 1) + f(n)) * (0.5 * ker.dt);
        }
        let w = laplace_kernel_transform(eq, &ker.k, lambda, 1e-12)?;
        let exact = w / (Complex64::new(1.0, 0.0) + a * w);
        let scale = exact.norm();
        let err = (acc - exact).norm();
        worst = worst.max(if scale > 1e-300 { err / scale } else { err });
    }
    Ok(worst)
}

/// Reassemble the densities from the source and per-mode kernels:
/// ρ̂_+ = Ŝ_+ − ε·K̂∗Ŝ and ρ̂_− = Ŝ_− + K̂∗Ŝ with Ŝ = Ŝ_+ − Ŝ_−.
pub fn reconstruct_rho(
    src: &SourceSeries,
    kernels: &[KernelSeries],
    epsilon: f64,
) -> Result<DensitySeries> {
    let nt = src.grid.len();
    let dt = src.grid.dt;
    let mut rho_plus = Array2::zeros((nt, src.modes.len()));
    let mut rho_minus = Array2::zeros((nt, src.modes.len()));
    for (mi, mode) in src.modes.iter().enumerate() {
        let ker = kernels.iter().find(|ker| ker.k == *mode).ok_or_else(|| {
            LandauError::GridMismatch(format!("no kernel supplied for mode {}", mode.label()))
        })?;
        if ker.times.len() != nt || (ker.dt - dt).abs() > 1e-12 * dt {
            return Err(LandauError::GridMismatch(format!(
                "kernel grid ({} nodes, dt={}) does not match source ({nt} nodes, dt={dt})",
                ker.times.len(),
                ker.dt
            )));
        }
        let s_tot: Vec<Complex64> = (0..nt).map(|n| src.s_total(n, mi)).collect();
        for n in 0..nt {
            let mut conv = Complex64::default();
            for m in 0..=n {
                let w = if m == 0 || m == n { 0.5 } else { 1.0 };
                conv += w * ker.k_hat[m] * s_tot[n - m];
            }
            let mem = conv * dt;
            rho_plus[(n, mi)] = src.s_plus[(n, mi)] - epsilon * mem;
            rho_minus[(n, mi)] = src.s_minus[(n, mi)] + mem;
            if !rho_plus[(n, mi)].is_finite() || !rho_minus[(n, mi)].is_finite() {
                return Err(LandauError::NonFinite(format!(
                    "kernel reconstruction at t = {}, k = {}",
                    src.grid.t(n),
                    mode.label()
                )));
            }
        }
    }
    DensitySeries::from_species(src.grid.times(), src.modes.clone(), rho_plus, rho_minus)
}

/// Result of the growth-estimate audit.
#[derive(Clone, Copy, Debug)]
pub struct FitReport {
    /// Smallest constant closing the inequality at every node.
    pub c_fit: f64,
    pub ok: bool,
}

/// Check F[ρ](t,z) ≤ F[S](t,z) + C∫₀ᵗ e^{−θ1(t−s)/4}F[S](s,z)ds on the grid
/// and report the smallest admissible C.
pub fn verify_linear_gevrey(
    rho: &DensitySeries,
    src: &SourceSeries,
    p: &GevreyParams,
    theta1: f64,
    z: f64,
) -> Result<FitReport> {
    if !(0.0..=theta1 / 2.0).contains(&z) {
        return Err(LandauError::Config(format!(
            "gevrey radius must lie in [0, theta1/2] = [0, {}], got {z}",
            theta1 / 2.0
        )));
    }
    let nt = src.grid.len();
    if rho.times.len() != nt || rho.modes != src.modes {
        return Err(LandauError::GridMismatch(
            "density and source series disagree on grid or modes".into(),
        ));
    }
    let k_max = src.modes.iter().map(Mode::norm).fold(0.0f64, f64::max);
    let dt = src.grid.dt;
    let decay = (-theta1 * dt / 4.0).exp();
    let mut c_fit = 0.0f64;
    let mut memory = 0.0f64;
    let mut f_src_prev = 0.0f64;
    for n in 0..nt {
        let t = src.grid.t(n);
        let f_rho = f_functional(rho, n, z, p, k_max)?.value;
        let s_row: Vec<Complex64> = (0..src.modes.len()).map(|mi| src.s_total(n, mi)).collect();
        let f_src = f_from_values(&src.modes, &s_row, t, z, p, k_max)?.value;
        if n > 0 {
            memory = decay * memory + 0.5 * dt * (decay * f_src_prev + f_src);
            let excess = (f_rho - f_src).max(0.0);
            if excess > 0.0 {
                if memory > 0.0 {
                    c_fit = c_fit.max(excess / memory);
                } else {
                    c_fit = f64::INFINITY;
                }
            }
        }
        f_src_prev = f_src;
    }
    Ok(FitReport {
        c_fit,
        ok: c_fit.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::gaussian_equilibrium;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian_seed(k: i64, amp: f64) -> InitialMode {
        InitialMode {
            k: Mode::one_d(k),
            amp_plus: Complex64::new(amp, 0.0),
            amp_minus: Complex64::default(),
            profile: EtaProfile::GaussianEta { width: 1.0 },
        }
    }

    #[test]
    fn source_examples() {
        let grid = TimeGrid::new(1.0, 4.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 1.0)], &grid).unwrap();
        // t=0 → f̂⁰(k,0); t=2, k=1 → e^{−2}.
        assert!((src.s_plus[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((src.s_plus[(2, 0)].re - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(src.s_minus[(2, 0)], Complex64::default());

        // Duplicate seeds accumulate on one mode row.
        let two = build_source(&[gaussian_seed(1, 1.0), gaussian_seed(1, 0.5)], &grid).unwrap();
        assert_eq!(two.modes.len(), 1);
        assert!((two.s_plus[(0, 0)].re - 1.5).abs() < 1e-15);

        let zero = InitialMode {
            k: Mode::one_d(0),
            ..gaussian_seed(1, 1.0)
        };
        assert!(matches!(
            build_source(&[zero], &grid),
            Err(LandauError::ZeroMode)
        ));
    }

    #[test]
    fn radial_profile_interpolation() {
        let p = EtaProfile::radial(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert!((p.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.eval(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((p.eval(0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((p.eval(1.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            p.eval(2.5),
            Err(LandauError::EtaOutOfRange { .. })
        ));
        assert!(EtaProfile::radial(vec![0.5, 1.0], vec![1.0, 1.0]).is_err());
        assert!(EtaProfile::radial(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn zero_source_zero_solution() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.05, 5.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 0.0)], &grid).unwrap();
        let sol = solve_volterra(&src, &eq, 0.01).unwrap();
        for n in 0..grid.len() {
            assert_eq!(sol.rho(n, 0), Complex64::default());
        }
    }

    #[test]
    fn epsilon_zero_identity_is_exact() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.02, 8.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 1e-3)], &grid).unwrap();
        let sol = solve_volterra(&src, &eq, 0.0).unwrap();
        for n in 0..grid.len() {
            assert_eq!(sol.rho_plus[(n, 0)], src.s_plus[(n, 0)]);
        }
        // The electron density still feels the memory term.
        assert!((sol.rho_minus[(grid.len() - 1, 0)]).norm() > 0.0);
    }

    #[test]
    fn volterra_is_linear_in_the_source() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.05, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let base = build_source(&[gaussian_seed(1, 1.0)], &grid).unwrap();
        let mut scaled = base.clone();
        scaled.s_plus.mapv_inplace(|v| v * c);
        scaled.s_minus.mapv_inplace(|v| v * c);
        let sol = solve_volterra(&base, &eq, 0.01).unwrap();
        let sol_scaled = solve_volterra(&scaled, &eq, 0.01).unwrap();
        for n in 0..grid.len() {
            let d = (sol_scaled.rho(n, 0) - c * sol.rho(n, 0)).norm();
            assert!(d <= 1e-13, "node {n}: {d}");
        }
    }

    #[test]
    fn residual_at_machine_precision() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.02, 10.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 1e-3), gaussian_seed(2, 5e-4)], &grid).unwrap();
        let sol = solve_volterra(&src, &eq, 0.01).unwrap();
        let res = volterra_residual(&sol, &src, &eq, 0.01);
        let s_norm = src
            .s_plus
            .iter()
            .chain(src.s_minus.iter())
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(
            res <= 10.0 * f64::EPSILON * s_norm,
            "residual {res} vs scale {s_norm}"
        );
    }

    #[test]
    fn degenerate_kernel_reconstructs_source() {
        // μ̂ ≡ 0 → K̃ ≡ 0 → K̂ ≡ 0 → ρ̂_± = Ŝ_±.
        let eq = Equilibrium::zero(1, 0.5).unwrap();
        let grid = TimeGrid::new(0.05, 5.0).unwrap();
        let ker = kernel_inverse_laplace(
            &eq,
            0.01,
            &Mode::one_d(1),
            0.25,
            &grid,
            &KernelOptions::default(),
        )
        .unwrap();
        assert!(ker.k_hat.iter().all(|v| v.norm() < 1e-12));
        assert_eq!(ker.fit_c, 0.0);
        assert_eq!(ker.fit_theta, 0.25);
        let src = build_source(&[gaussian_seed(1, 2e-3)], &grid).unwrap();
        let rec = reconstruct_rho(&src, &[ker], 0.01).unwrap();
        for n in 0..grid.len() {
            assert!((rec.rho_plus[(n, 0)] - src.s_plus[(n, 0)]).norm() < 1e-14);
            assert!((rec.rho_minus[(n, 0)] - src.s_minus[(n, 0)]).norm() < 1e-14);
        }
    }

    #[test]
    fn kernel_decay_and_forward_transform() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.02, 16.0).unwrap();
        let ker = kernel_inverse_laplace(
            &eq,
            0.01,
            &Mode::one_d(1),
            0.25,
            &grid,
            &KernelOptions::default(),
        )
        .unwrap();
        assert!(ker.k_hat.iter().all(|v| v.is_finite()));
        assert!(ker.denom_min >= 0.02);
        assert!(ker.tail_est <= 1e-8);
        assert!(
            ker.fit_theta >= 0.25,
            "fitted decay {} below contour rate",
            ker.fit_theta
        );
        // T = 16 truncates the forward integral near e^{−16}; allow for it.
        let err = forward_laplace_check(&ker, &eq, 0.01).unwrap();
        assert!(err <= 1e-4, "forward check error {err}");
    }

    #[test]
    fn two_paths_agree_on_a_short_run() {
        let eq = gaussian_equilibrium(1).unwrap();
        let grid = TimeGrid::new(0.02, 10.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 1e-3)], &grid).unwrap();
        let volterra = solve_volterra(&src, &eq, 0.01).unwrap();
        let ker = kernel_inverse_laplace(
            &eq,
            0.01,
            &Mode::one_d(1),
            0.25,
            &grid,
            &KernelOptions::default(),
        )
        .unwrap();
        let resolvent = reconstruct_rho(&src, &[ker], 0.01).unwrap();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for n in 0..grid.len() {
            scale = scale.max(volterra.rho(n, 0).norm());
            worst = worst.max((volterra.rho(n, 0) - resolvent.rho(n, 0)).norm());
        }
        assert!(
            worst / scale <= 1e-3,
            "two-path relative gap {}",
            worst / scale
        );
    }

    #[test]
    fn gevrey_check_on_linear_solution() {
        let eq = gaussian_equilibrium(1).unwrap();
        let p = GevreyParams {
            gamma: 1.0,
            sigma: 4.0,
            alpha: 0.2,
            lambda0: 0.05,
            delta: 0.5,
            lambda1: 0.4,
        };
        let grid = TimeGrid::new(0.02, 10.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 1e-3)], &grid).unwrap();
        let sol = solve_volterra(&src, &eq, 0.01).unwrap();
        let report = verify_linear_gevrey(&sol, &src, &p, 0.25, 0.1).unwrap();
        assert!(report.ok, "c_fit = {}", report.c_fit);
        // z = 0 variant also holds.
        let flat = verify_linear_gevrey(&sol, &src, &p, 0.25, 0.0).unwrap();
        assert!(flat.ok);
        // Radius beyond θ1/2 rejected.
        assert!(verify_linear_gevrey(&sol, &src, &p, 0.25, 0.2).is_err());
    }

    #[test]
    fn gevrey_check_zero_source() {
        let eq = gaussian_equilibrium(1).unwrap();
        let p = GevreyParams {
            gamma: 1.0,
            sigma: 4.0,
            alpha: 0.2,
            lambda0: 0.05,
            delta: 0.5,
            lambda1: 0.4,
        };
        let grid = TimeGrid::new(0.1, 3.0).unwrap();
        let src = build_source(&[gaussian_seed(1, 0.0)], &grid).unwrap();
        let sol = solve_volterra(&src, &eq, 0.01).unwrap();
        let report = verify_linear_gevrey(&sol, &src, &p, 0.25, 0.1).unwrap();
        assert_eq!(report.c_fit, 0.0);
        assert!(report.ok);
    }
}

//! Plasma dispersion functional and the perturbed stability margin: boundary
//! scans of |D(λ,k;α)| with analytic tail bounds and the admissible
//! mass-ratio threshold.

use crate::equilibria::{Equilibrium, Profile};
use crate::error::{LandauError, Result};
use crate::quad::gauss_legendre;
use crate::series::Mode;
use num_complex::Complex64;
use rayon::prelude::*;

/// One dispersion evaluation request.
#[derive(Clone, Debug)]
pub struct DispersionQuery {
    pub k: Mode,
    pub lambda: Complex64,
    pub alpha: f64,
}

/// Boundary-scan verdict for the stability margin.
#[derive(Clone, Debug)]
pub struct PenroseReport {
    pub inf_modulus: f64,
    pub argmin_k: Mode,
    pub argmin_lambda: Complex64,
    /// |Im λ| scan limit M.
    pub boundary_radius: f64,
    /// Analytic bound on |D − 1| outside the scanned (k, Im λ) region.
    pub tail_bound: f64,
    pub kappa_half_ok: bool,
    /// Admissible mass-ratio threshold derived from κ0, C_μ, θ0.
    pub alpha0: f64,
    /// No coarse interior sample dipped below the boundary minimum.
    pub interior_ok: bool,
    /// κ0 the verdict was judged against (configured, or the computed inf).
    pub kappa0: f64,
    /// Flattened scan samples (k, Im λ, |D|) in deterministic order.
    pub samples: Vec<PenroseSample>,
}

#[derive(Clone, Copy, Debug)]
pub struct PenroseSample {
    pub k: Mode,
    pub im_lambda: f64,
    pub abs_d: f64,
}

/// Truncation time T with both a point bound and an integral tail bound
/// below `tol` for |e^{−λt}·t·μ̂(kt)| with r = max(0, −Re λ).
fn truncation_time(eq: &Equilibrium, k: &Mode, r: f64, tol: f64) -> Result<f64> {
    let knorm = k.norm();
    match eq.profile {
        Profile::Zero => Ok(1.0),
        Profile::Gaussian => {
            // Envelope t·e^{−|k|²t²/2 + rt}: once the exponent slope |k|²T − r
            // exceeds 1, the tail integral is below (T + 1)·point value.
            let k2 = knorm * knorm;
            let mut t = (2.0 * (r + 1.0) / k2).max(2.0 / knorm);
            for _ in 0..200 {
                let slope = k2 * t - r;
                let point = t * (-0.5 * k2 * t * t + r * t).exp();
                if slope >= 1.0 && point * (t + 1.0) <= tol / 8.0 {
                    return Ok(t);
                }
                t *= 1.25;
            }
            Err(LandauError::Invariant(format!(
                "no quadrature truncation for |k|={knorm}, r={r}, tol={tol}"
            )))
        }
    }
}

/// Laplace transform of the memory kernel: W_k(λ) = ∫₀^∞ e^{−λt} t μ̂(kt) dt.
///
/// Valid in the strip Re λ > −θ0|k|; absolute quadrature error ≤ tol.
pub fn laplace_kernel_transform(
    eq: &Equilibrium,
    k: &Mode,
    lambda: Complex64,
    tol: f64,
) -> Result<Complex64> {
    if k.is_zero() {
        return Err(LandauError::ZeroMode);
    }
    let knorm = k.norm();
    let strip = -eq.theta0 * knorm;
    if lambda.re <= strip {
        return Err(LandauError::OutsideStrip {
            re: lambda.re,
            limit: strip,
        });
    }
    if eq.profile == Profile::Zero {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = (-lambda.re).max(0.0);
    let t_end = truncation_time(eq, k, r, tol)?;
    // Panel width limited by both the oscillation |Im λ| and the Gaussian
    // scale 1/|k|; GL-16 then resolves each panel far beyond tol.
    let width = (1.0 / knorm)
        .min(8.0 / (1.0 + lambda.im.abs()))
        .min(t_end);
    let rule = gauss_legendre(16);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    while a < t_end {
        let b = (a + width).min(t_end);
        acc += rule.integrate_complex(a, b, |t| {
            let mu = eq.mu_hat_ray(k, t);
            (-lambda * t).exp() * t * mu
        });
        a = b;
    }
    Ok(acc)
}

/// Dispersion functional D(λ,k;α) = 1 + (1+α)·W_k(λ).
pub fn dispersion(eq: &Equilibrium, q: &DispersionQuery, tol: f64) -> Result<Complex64> {
    let w = laplace_kernel_transform(eq, &q.k, q.lambda, tol)?;
    Ok(Complex64::new(1.0, 0.0) + w * (1.0 + q.alpha))
}

/// Modes of the scan half-lattice: 0 < |k| ≤ k_max with the leading nonzero
/// component positive (D is even in k for even μ̂).
fn half_lattice(dim: usize, k_max: i64) -> Vec<Mode> {
    let mut modes = Vec::new();
    match dim {
        1 => {
            for k in 1..=k_max {
                modes.push(Mode::one_d(k));
            }
        }
        2 => {
            for k0 in 0..=k_max {
                for k1 in -k_max..=k_max {
                    let leading_positive = k0 > 0 || (k0 == 0 && k1 > 0);
                    let len_sq = k0 * k0 + k1 * k1;
                    if leading_positive && len_sq <= k_max * k_max {
                        modes.push(Mode::two_d(k0, k1));
                    }
                }
            }
        }
        _ => {}
    }
    modes
}

/// Analytic bound on |D − 1| outside the scan: modes with |k| > k_max and
/// boundary points with |Im λ| > M.
fn scan_tail_bound(eq: &Equilibrium, alpha: f64, k_max: i64, m: f64) -> f64 {
    let c = eq.c_mu;
    let th = eq.theta0;
    // |W| ≤ C_μ/(θ0|k|)² for Re λ ≥ 0.
    let beyond_k = (1.0 + alpha) * c / (th * th * ((k_max + 1) * (k_max + 1)) as f64);
    // Two integrations by parts: |W| ≤ (1 + 2C_μ/θ0 + C_μ/θ0²)/|λ|², |λ| ≥ M.
    let beyond_m = (1.0 + alpha) * (1.0 + 2.0 * c / th + c / (th * th)) / (m * m);
    beyond_k.max(beyond_m)
}

/// Scan |D| on the half-plane boundary Re λ = 0, |Im λ| ≤ M, 0 < |k| ≤ k_max.
pub fn penrose_infimum(
    eq: &Equilibrium,
    alpha: f64,
    k_max: i64,
    m: f64,
    step: f64,
    tol: f64,
    kappa0: Option<f64>,
) -> Result<PenroseReport> {
    if k_max < 1 || !(m > 0.0) || !(step > 0.0) {
        return Err(LandauError::Config(format!(
            "penrose scan requires k_max >= 1, M > 0, step > 0; got {k_max}, {m}, {step}"
        )));
    }
    let modes = half_lattice(eq.dim, k_max);
    let n_tau = (m / step).ceil() as usize;
    // D(conj λ) = conj D(λ), so τ ≥ 0 suffices on Re λ = 0.
    let per_mode: Vec<Result<Vec<PenroseSample>>> = modes
        .par_iter()
        .map(|k| {
            let mut rows = Vec::with_capacity(n_tau + 1);
            for j in 0..=n_tau {
                let tau = (j as f64 * step).min(m);
                let d = dispersion(
                    eq,
                    &DispersionQuery {
                        k: *k,
                        lambda: Complex64::new(0.0, tau),
                        alpha,
                    },
                    tol,
                )?;
                let abs_d = d.norm();
                if !abs_d.is_finite() {
                    return Err(LandauError::NonFinite(format!(
                        "|D| at k={}, Im lambda={tau}",
                        k.label()
                    )));
                }
                rows.push(PenroseSample {
                    k: *k,
                    im_lambda: tau,
                    abs_d,
                });
            }
            Ok(rows)
        })
        .collect();

    let mut samples = Vec::new();
    for rows in per_mode {
        samples.extend(rows?);
    }
    let mut inf_modulus = f64::INFINITY;
    let mut argmin_k = modes[0];
    let mut argmin_tau = 0.0;
    for s in &samples {
        if s.abs_d < inf_modulus {
            inf_modulus = s.abs_d;
            argmin_k = s.k;
            argmin_tau = s.im_lambda;
        }
    }

    // Coarse interior sanity scan: D is analytic and → 1 at infinity, so a
    // strictly interior sample below the boundary minimum signals a nearby
    // zero (minimum-modulus principle).
    let interior_re = [0.05, 0.2, 0.5, 1.0, 2.0];
    let mut interior_ok = true;
    'outer: for k in &modes {
        for &re in &interior_re {
            let mut tau = 0.0;
            while tau <= m {
                let d = dispersion(
                    eq,
                    &DispersionQuery {
                        k: *k,
                        lambda: Complex64::new(re, tau),
                        alpha,
                    },
                    tol,
                )?;
                if d.norm() < inf_modulus - 1e-9 {
                    interior_ok = false;
                    break 'outer;
                }
                tau += 1.0;
            }
        }
    }

    let kappa0 = kappa0.unwrap_or(inf_modulus);
    let alpha0 = if eq.c_mu > 0.0 {
        alpha_threshold(kappa0, eq.c_mu, eq.theta0)?
    } else {
        f64::INFINITY
    };
    Ok(PenroseReport {
        inf_modulus,
        argmin_k,
        argmin_lambda: Complex64::new(0.0, argmin_tau),
        boundary_radius: m,
        tail_bound: scan_tail_bound(eq, alpha, k_max, m),
        kappa_half_ok: inf_modulus >= 0.5 * kappa0,
        alpha0,
        interior_ok,
        kappa0,
        samples,
    })
}

/// Largest mass ratio compatible with the margin: α0 = κ0·θ0²/(2·C_μ).
pub fn alpha_threshold(kappa0: f64, c_mu: f64, theta0: f64) -> Result<f64> {
    if !(kappa0 > 0.0) || !(c_mu > 0.0) || !(theta0 > 0.0) {
        return Err(LandauError::Config(format!(
            "alpha threshold requires positive inputs, got kappa0={kappa0}, c_mu={c_mu}, \
             theta0={theta0}"
        )));
    }
    Ok(kappa0 * theta0 * theta0 / (2.0 * c_mu))
}

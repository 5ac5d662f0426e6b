//! Gevrey bracket weights, the generator functionals F and G, the radius
//! schedule, decay-rate fitting, and the weighted-inequality spot checks.

use crate::error::{LandauError, Result};
use crate::series::{DensitySeries, GlidingSnapshot, Mode};
use num_complex::Complex64;

/// Exponent threshold beyond which e^x is treated as an overflow.
const LOG_LIMIT: f64 = 700.0;

/// Weight/functional parameter bundle.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GevreyParams {
    /// Gevrey index γ ∈ (0,1]; 1 is analytic regularity.
    pub gamma: f64,
    /// Bracket power σ > max{d+1, 3}.
    pub sigma: f64,
    /// Mode-count exponent α ∈ (0, 1/(d+1)).
    pub alpha: f64,
    /// Asymptotic analyticity radius λ0 ∈ (0,1].
    pub lambda0: f64,
    /// Schedule decay exponent δ ∈ (0,1).
    pub delta: f64,
    /// Initial-data radius λ1 > 0.
    pub lambda1: f64,
}

impl GevreyParams {
    /// Itemize every violated constraint for dimension `dim`.
    pub fn violations(&self, dim: usize, theta1: f64) -> Vec<String> {
        let mut errs = Vec::new();
        let sigma_floor = ((dim + 1) as f64).max(3.0);
        if !(self.sigma > sigma_floor) {
            errs.push(format!(
                "sigma must exceed max{{d+1,3}}={sigma_floor}, got {}",
                self.sigma
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 / (dim + 1) as f64) {
            errs.push(format!(
                "alpha must lie in (0, 1/(d+1)) = (0, {:.4}), got {}",
                1.0 / (dim + 1) as f64,
                self.alpha
            ));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            errs.push(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            errs.push(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.lambda0 > 0.0 && self.lambda0 <= 1.0) {
            errs.push(format!("lambda0 must lie in (0, 1], got {}", self.lambda0));
        }
        if !(self.lambda1 > 0.0) {
            errs.push(format!("lambda1 must be positive, got {}", self.lambda1));
        }
        let cap = (self.lambda1 / 4.0).min(theta1 / 4.0);
        if !(self.lambda0 <= cap) {
            errs.push(format!(
                "lambda0 must not exceed min{{lambda1/4, theta1/4}} = {cap:.4}, got {}",
                self.lambda0
            ));
        }
        errs
    }
}

/// Japanese bracket ⟨k,η⟩ = √(1+|k|²+|η|²).
pub fn bracket(k: &Mode, eta: &[f64]) -> f64 {
    let eta_sq: f64 = eta.iter().map(|e| e * e).sum();
    (1.0 + k.norm_sq() + eta_sq).sqrt()
}

/// log A_{k,η} = z·⟨k,η⟩^γ + σ·ln⟨k,η⟩ for the weight A = e^{z⟨⟩^γ}⟨⟩^σ.
pub fn log_weight(z: f64, gamma: f64, sigma: f64, k: &Mode, eta: &[f64]) -> f64 {
    let b = bracket(k, eta);
    z * b.powf(gamma) + sigma * b.ln()
}

/// F evaluation with the maximizer and a truncation report.
#[derive(Clone, Debug)]
pub struct FValue {
    pub value: f64,
    /// ln(value); −∞ when the series vanishes.
    pub log_value: f64,
    pub argmax: Option<Mode>,
    /// Largest weighted entry among modes excluded by k_max (0 when none).
    pub tail_max: f64,
}

/// F over explicit per-mode values: sup over 0<|k|≤k_max of
/// e^{z⟨k,kt⟩^γ}|v_k|⟨k,kt⟩^σ|k|^{−α}.
pub fn f_from_values(
    modes: &[Mode],
    values: &[Complex64],
    t: f64,
    z: f64,
    p: &GevreyParams,
    k_max: f64,
) -> Result<FValue> {
    if modes.len() != values.len() {
        return Err(LandauError::GridMismatch(format!(
            "{} modes vs {} values",
            modes.len(),
            values.len()
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = None;
    let mut tail_max = 0.0f64;
    for (mode, value) in modes.iter().zip(values) {
        if mode.is_zero() {
            continue;
        }
        let mag = value.norm();
        let eta = mode.scaled(t);
        let log_term = log_weight(z, p.gamma, p.sigma, mode, &eta[..mode.dim()])
            - p.alpha * mode.norm().ln()
            + mag.ln();
        if mode.norm() > k_max {
            if log_term.is_finite() {
                tail_max = tail_max.max(log_term.min(LOG_LIMIT).exp());
            }
            continue;
        }
        if log_term > best {
            best = log_term;
            argmax = Some(*mode);
        }
    }
    if best > LOG_LIMIT {
        return Err(LandauError::WeightOverflow {
            mode: argmax.map(|m| m.label()).unwrap_or_default(),
            t,
            log_value: best,
        });
    }
    Ok(FValue {
        value: if best.is_finite() { best.exp() } else { 0.0 },
        log_value: best,
        argmax,
        tail_max,
    })
}

/// F[ρ](t,z) on a density series at time index `ti` (ρ = ρ_+ − ρ_−).
pub fn f_functional(
    series: &DensitySeries,
    ti: usize,
    z: f64,
    p: &GevreyParams,
    k_max: f64,
) -> Result<FValue> {
    let values: Vec<Complex64> = (0..series.modes.len())
        .map(|mi| series.rho(ti, mi))
        .collect();
    f_from_values(&series.modes, &values, series.times[ti], z, p, k_max)
}

/// G evaluation with quadrature and truncation reports.
#[derive(Clone, Debug)]
pub struct GValue {
    pub value: f64,
    /// Richardson estimate |G − G_coarse|/3 from a stride-2 η subsample.
    pub quad_error_est: f64,
    /// Fraction of the value carried by the outer η band (|η_i| ≥ 0.9·η_max).
    pub tail_fraction: f64,
    /// Entries skipped for exponent overflow: (mode, flat η index, log value).
    pub overflow: Vec<(Mode, usize, f64)>,
}

/// One species-and-derivative term of the G integrand at a grid entry.
fn g_log_entry(d: usize, z: f64, p: &GevreyParams, mode: &Mode, eta: &[f64], mag: f64) -> f64 {
    let power = (d + 1) as f64;
    power * (log_weight(z, p.gamma, p.sigma, mode, eta) + mag.ln())
}

/// G = Σ_{|j|≤1} Σ_k ∫ e^{(d+1)z⟨k,η⟩^γ}(|∂^j ĝ_+|^{d+1}+|∂^j ĝ_−|^{d+1})⟨k,η⟩^{(d+1)σ} dη.
pub fn g_functional(snap: &GlidingSnapshot, z: f64, p: &GevreyParams) -> Result<GValue> {
    let d = snap.eta.dim;
    let n_eta = snap.eta.total();
    let full_weight = snap.eta.cell_weight();
    let eta_max = snap.eta.eta_max();
    let mut total = 0.0f64;
    let mut coarse = 0.0f64;
    let mut edge = 0.0f64;
    let mut overflow = Vec::new();

    // Derivative multi-indices |j| ≤ 1: the field itself plus d first partials.
    let mut arrays: Vec<&ndarray::Array2<Complex64>> = vec![&snap.g_plus, &snap.g_minus];
    arrays.extend(snap.dg_plus.iter());
    arrays.extend(snap.dg_minus.iter());

    for (mi, mode) in snap.modes.iter().enumerate() {
        for flat in 0..n_eta {
            let bins = snap.eta.decompose(flat);
            let eta = snap.eta.eta_of_flat(flat);
            let eta_slice = &eta[..d];
            let on_coarse_grid = bins[..d].iter().all(|b| b % 2 == 0);
            let on_edge = eta_slice.iter().any(|e| e.abs() >= 0.9 * eta_max);
            for arr in &arrays {
                let mag = arr[(mi, flat)].norm();
                if mag == 0.0 {
                    continue;
                }
                let log_term = g_log_entry(d, z, p, mode, eta_slice, mag);
                if log_term > LOG_LIMIT {
                    overflow.push((*mode, flat, log_term));
                    continue;
                }
                let contrib = log_term.exp() * full_weight;
                total += contrib;
                if on_edge {
                    edge += contrib;
                }
                if on_coarse_grid {
                    // Stride-2 subsample: cell weight scales by 2^d.
                    coarse += log_term.exp() * full_weight * (1 << d) as f64;
                }
            }
        }
    }
    if !total.is_finite() {
        return Err(LandauError::NonFinite("G functional accumulation".into()));
    }
    Ok(GValue {
        value: total,
        quad_error_est: (total - coarse).abs() / 3.0,
        tail_fraction: if total > 0.0 { edge / total } else { 0.0 },
        overflow,
    })
}

/// Embedding ratio c0 = F/G^{1/(d+1)}.
#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    pub c0_est: f64,
}

pub fn check_embedding(f_val: f64, g_val: f64, d: usize) -> Result<Ratio> {
    if g_val == 0.0 {
        if f_val > 0.0 {
            return Err(LandauError::Invariant(format!(
                "embedding denominator vanished while F = {f_val:.3e} > 0"
            )));
        }
        return Ok(Ratio { c0_est: 0.0 });
    }
    Ok(Ratio {
        c0_est: f_val / g_val.powf(1.0 / (d + 1) as f64),
    })
}

/// Analyticity-radius schedule λ(t) = λ0 + λ0(1+t)^{−δ}.
pub fn lambda_schedule(t: f64, p: &GevreyParams) -> f64 {
    p.lambda0 + p.lambda0 * (1.0 + t).powf(-p.delta)
}

/// Least-squares exponential-decay fit of a scalar series against ⟨t⟩.
#[derive(Clone, Copy, Debug)]
pub struct Fit {
    pub lambda_fit: f64,
    pub c_fit: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fit log e(t) = log c − λ·⟨t⟩ with ⟨t⟩ = √(1+t²) on t ∈ [t_lo, t_hi].
///
/// Zero/non-finite samples are skipped; at least 4 usable points required.
pub fn fit_decay(series: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Result<Fit> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, e)| *t >= t_lo && *t <= t_hi && e.is_finite() && *e > 0.0)
        .map(|&(t, e)| ((1.0 + t * t).sqrt(), e.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(LandauError::FitPoints {
            need: 4,
            got: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(LandauError::Invariant(
            "degenerate abscissa in decay fit".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in &usable {
        let pred = intercept + slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > 1e-300 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-300 {
        1.0
    } else {
        0.0
    };
    Ok(Fit {
        lambda_fit: -slope,
        c_fit: intercept.exp(),
        r2,
        points: usable.len(),
    })
}

/// One snapshot's inputs for the growth-inequality check.
#[derive(Clone, Copy, Debug)]
pub struct GrowthPoint {
    pub t: f64,
    pub f: f64,
    pub g: f64,
    /// G at z + dz (same snapshot) for the one-sided ∂_z difference.
    pub g_z_plus: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// Smallest admissible constant across the run (max of pointwise ratios).
    pub c_min: f64,
    pub per_point: Vec<(f64, f64)>,
    pub ok: bool,
}

/// Check ∂_tG ≤ C·F·G^{d/(d+1)} + C(1+t)·F·∂_zG on consecutive snapshots.
///
/// ∂_t by centered difference, ∂_z by the one-sided difference carried in
/// each point; reports the smallest C making the inequality hold everywhere.
pub fn check_growth_inequality(points: &[GrowthPoint], dz: f64, d: usize) -> Result<GrowthReport> {
    if points.len() < 3 {
        return Err(LandauError::FitPoints {
            need: 3,
            got: points.len(),
        });
    }
    if !(dz > 0.0) {
        return Err(LandauError::Config(format!("dz must be positive, got {dz}")));
    }
    let mut per_point = Vec::new();
    let mut c_min = 0.0f64;
    for i in 1..points.len() - 1 {
        let span = points[i + 1].t - points[i - 1].t;
        if !(span > 0.0) {
            return Err(LandauError::GridMismatch(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        let dg_dt = (points[i + 1].g - points[i - 1].g) / span;
        let dg_dz = (points[i].g_z_plus - points[i].g) / dz;
        let p = &points[i];
        let rhs = p.f * p.g.powf(d as f64 / (d + 1) as f64) + (1.0 + p.t) * p.f * dg_dz;
        let c = if dg_dt <= 0.0 {
            0.0
        } else if rhs <= 0.0 {
            return Err(LandauError::Invariant(format!(
                "G grows at t = {} while the comparison terms vanish",
                p.t
            )));
        } else {
            dg_dt / rhs
        };
        per_point.push((p.t, c));
        c_min = c_min.max(c);
    }
    Ok(GrowthReport {
        c_min,
        per_point,
        ok: c_min.is_finite(),
    })
}

/// Ratio of the two sides of the comparison-kernel inequality
/// e^{z⟨k,kt⟩^γ}⟨k,kt⟩^σ e^{−θ1|k|(t−s)} ≤ C e^{−θ1|k|(t−s)/4} e^{z⟨k,ks⟩^γ}⟨k,ks⟩^σ.
pub fn comparison_kernel_ratio(
    k: &Mode,
    s: f64,
    t: f64,
    z: f64,
    p: &GevreyParams,
    theta1: f64,
) -> f64 {
    let eta_t = k.scaled(t);
    let eta_s = k.scaled(s);
    let log_lhs = log_weight(z, p.gamma, p.sigma, k, &eta_t[..k.dim()])
        - theta1 * k.norm() * (t - s);
    let log_rhs = log_weight(z, p.gamma, p.sigma, k, &eta_s[..k.dim()])
        - theta1 * k.norm() * (t - s) / 4.0;
    (log_lhs - log_rhs).exp()
}

/// Pre-computed sup of the comparison ratio over a dense deterministic grid.
pub fn comparison_kernel_sup(
    k_max: i64,
    t_max: f64,
    z: f64,
    p: &GevreyParams,
    theta1: f64,
) -> f64 {
    const STEP: f64 = 0.1;
    let mut sup = 0.0f64;
    let steps = (t_max / STEP) as usize;
    for k in 1..=k_max {
        let mode = Mode::one_d(k);
        for i in 0..=steps {
            let s = i as f64 * STEP;
            for j in i..=steps {
                let t = j as f64 * STEP;
                sup = sup.max(comparison_kernel_ratio(&mode, s, t, z, p, theta1));
            }
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{DensitySeries, EtaGrid};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    fn single_mode_series(value: Complex64) -> DensitySeries {
        let modes = vec![Mode::one_d(1)];
        let mut rp = Array2::zeros((1, 1));
        rp[(0, 0)] = value;
        DensitySeries::from_species(vec![0.0], modes, rp, Array2::zeros((1, 1))).unwrap()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket(&Mode::one_d(0), &[0.0]), 1.0);
        assert!((bracket(&Mode::one_d(1), &[1.0]) - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bracket_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let k: i64 = rng.gen_range(-30..30);
            let kp: i64 = rng.gen_range(-30..30);
            let eta: f64 = rng.gen_range(-40.0..40.0);
            let etap: f64 = rng.gen_range(-40.0..40.0);
            let lhs = bracket(&Mode::one_d(k), &[eta]);
            let rhs = bracket(&Mode::one_d(kp), &[etap])
                + bracket(&Mode::one_d(k - kp), &[eta - etap]);
            assert!(lhs <= rhs + 1e-12);
            let product =
                2.0 * bracket(&Mode::one_d(kp), &[etap]) * bracket(&Mode::one_d(k - kp), &[eta - etap]);
            assert!(lhs <= product + 1e-12);
        }
    }

    #[test]
    fn submultiplicative_weight_many_tuples() {
        // A_{k,η} ≤ 2^σ·A_{k',η'}·A_{k−k',η−η'}: the e-factor is subadditive
        // for γ ≤ 1 and the bracket obeys ⟨⟩ ≤ 2⟨⟩⟨⟩.
        let p = params();
        let z = 0.12;
        let cap = (2.0f64).powf(p.sigma);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let k: i64 = rng.gen_range(-20..20);
            let kp: i64 = rng.gen_range(-20..20);
            let eta: f64 = rng.gen_range(-25.0..25.0);
            let etap: f64 = rng.gen_range(-25.0..25.0);
            let log_a = log_weight(z, p.gamma, p.sigma, &Mode::one_d(k), &[eta]);
            let log_b = log_weight(z, p.gamma, p.sigma, &Mode::one_d(kp), &[etap]);
            let log_c = log_weight(z, p.gamma, p.sigma, &Mode::one_d(k - kp), &[eta - etap]);
            assert!(
                log_a <= cap.ln() + log_b + log_c + 1e-12,
                "violated at k={k}, k'={kp}, eta={eta}, eta'={etap}"
            );
        }
    }

    #[test]
    fn f_single_mode_example() {
        // t=0, z=0, γ=1, σ=3, α=1/4, ρ̂(0,1)=1 → F = ⟨1,0⟩³ = 2^{3/2}.
        let p = GevreyParams {
            sigma: 3.0,
            alpha: 0.25,
            ..params()
        };
        let series = single_mode_series(Complex64::new(1.0, 0.0));
        let f = f_functional(&series, 0, 0.0, &p, 8.0).unwrap();
        assert!((f.value - 2.0f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(f.argmax, Some(Mode::one_d(1)));
        assert_eq!(f.tail_max, 0.0);
    }

    #[test]
    fn f_zero_series_and_monotonicity() {
        let p = params();
        let series = single_mode_series(Complex64::new(0.0, 0.0));
        let f = f_functional(&series, 0, 0.1, &p, 8.0).unwrap();
        assert_eq!(f.value, 0.0);

        let series = single_mode_series(Complex64::new(0.3, -0.4));
        let f_lo = f_functional(&series, 0, 0.05, &p, 8.0).unwrap();
        let f_hi = f_functional(&series, 0, 0.15, &p, 8.0).unwrap();
        assert!(f_lo.value <= f_hi.value);
    }

    #[test]
    fn f_overflow_reported() {
        let p = params();
        let series = single_mode_series(Complex64::new(1.0, 0.0));
        // z so large that z·⟨1,0⟩ > 700.
        let err = f_functional(&series, 0, 600.0, &p, 8.0).unwrap_err();
        assert!(matches!(err, LandauError::WeightOverflow { .. }));
    }

    fn gaussian_snapshot(scale: f64, n: usize, v_max: f64) -> GlidingSnapshot {
        // Single mode k=0 with ĝ_+(η)=c·e^{−η²/2} and the exact derivative.
        let eta = EtaGrid::new(1, n, v_max).unwrap();
        let mut g_plus = Array2::zeros((1, n));
        let mut dg_plus = Array2::zeros((1, n));
        for bin in 0..n {
            let e = eta.axis_value(bin);
            g_plus[(0, bin)] = Complex64::new(scale * (-0.5 * e * e).exp(), 0.0);
            dg_plus[(0, bin)] = Complex64::new(-scale * e * (-0.5 * e * e).exp(), 0.0);
        }
        GlidingSnapshot {
            t: 0.0,
            modes: vec![Mode::one_d(0)],
            eta,
            g_plus,
            g_minus: Array2::zeros((1, n)),
            dg_plus: vec![dg_plus],
            dg_minus: vec![Array2::zeros((1, n))],
        }
    }

    #[test]
    fn g_golden_single_gaussian_mode() {
        // z=0, σ=3, d=1: G = ∫ e^{−η²}(1+η²)³(1+η²) dη = √π·21.5625.
        let p = GevreyParams {
            sigma: 3.0,
            ..params()
        };
        let snap = gaussian_snapshot(1.0, 512, 16.0);
        let g = g_functional(&snap, 0.0, &p).unwrap();
        let golden = std::f64::consts::PI.sqrt() * 21.5625;
        assert!(
            (g.value - golden).abs() < 1e-8,
            "G = {:.12}, golden = {:.12}",
            g.value,
            golden
        );
        assert!(g.quad_error_est < 1e-6);
        assert!(g.tail_fraction < 1e-12);
        assert!(g.overflow.is_empty());
    }

    #[test]
    fn g_zero_and_homogeneity() {
        let p = params();
        let zero = gaussian_snapshot(0.0, 64, 8.0);
        assert_eq!(g_functional(&zero, 0.0, &p).unwrap().value, 0.0);

        let base = gaussian_snapshot(1.0, 64, 8.0);
        let scaled = gaussian_snapshot(3.0, 64, 8.0);
        let g1 = g_functional(&base, 0.1, &p).unwrap().value;
        let g3 = g_functional(&scaled, 0.1, &p).unwrap().value;
        // Degree d+1 = 2 homogeneity.
        assert!((g3 / g1 - 9.0).abs() < 1e-10);
    }

    #[test]
    fn embedding_ratio_behaviour() {
        assert_eq!(check_embedding(0.0, 0.0, 1).unwrap().c0_est, 0.0);
        let r = check_embedding(2.0, 4.0, 1).unwrap();
        assert!((r.c0_est - 1.0).abs() < 1e-12);
        assert!(check_embedding(1.0, 0.0, 1).is_err());
        // Scale invariance: F → 3F, G → 9G leaves the ratio fixed (d=1).
        let r2 = check_embedding(6.0, 36.0, 1).unwrap();
        assert!((r2.c0_est - r.c0_est).abs() < 1e-12);
    }

    #[test]
    fn schedule_values() {
        let p = GevreyParams {
            lambda0: 0.1,
            delta: 0.5,
            ..params()
        };
        assert!((lambda_schedule(0.0, &p) - 0.2).abs() < 1e-15);
        assert!((lambda_schedule(3.0, &p) - 0.15).abs() < 1e-12);
        assert!((lambda_schedule(1e12, &p) - 0.1).abs() < 1e-6);
    }

    #[test]
    fn fit_exact_exponential() {
        let series: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let t = i as f64 * 0.2;
                (t, (-0.3 * (1.0 + t * t).sqrt()).exp())
            })
            .collect();
        let fit = fit_decay(&series, 0.0, 20.0).unwrap();
        assert!((fit.lambda_fit - 0.3).abs() < 1e-6);
        assert!((fit.c_fit - 1.0).abs() < 1e-6);
        assert!(fit.r2 > 0.999999);
    }

    #[test]
    fn fit_constant_input() {
        let series: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 2.5)).collect();
        let fit = fit_decay(&series, 0.0, 60.0).unwrap();
        assert!(fit.lambda_fit.abs() < 1e-12);
    }

    #[test]
    fn fit_needs_enough_points() {
        let series = vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.0), (3.0, -1.0)];
        assert!(matches!(
            fit_decay(&series, 0.0, 5.0),
            Err(LandauError::FitPoints { need: 4, got: 2 })
        ));
    }

    #[test]
    fn growth_static_state() {
        let points: Vec<GrowthPoint> = (0..5)
            .map(|i| GrowthPoint {
                t: i as f64,
                f: 0.0,
                g: 1.0,
                g_z_plus: 1.1,
            })
            .collect();
        let report = check_growth_inequality(&points, 0.01, 1).unwrap();
        assert_eq!(report.c_min, 0.0);
        assert!(report.ok);
    }

    #[test]
    fn growth_manufactured_constant() {
        // g(t) = 1+t (linear, so the centered difference is exact), f ≡ 1,
        // ∂_zg ≡ 1. Then C(t) = 1/(√(1+t) + (1+t)), maximal at the earliest
        // interior snapshot t = 0.5.
        let dz = 0.01;
        let points: Vec<GrowthPoint> = (0..5)
            .map(|i| {
                let t = i as f64 * 0.5;
                GrowthPoint {
                    t,
                    f: 1.0,
                    g: 1.0 + t,
                    g_z_plus: 1.0 + t + dz,
                }
            })
            .collect();
        let report = check_growth_inequality(&points, dz, 1).unwrap();
        let expected = 1.0 / (1.5f64.sqrt() + 1.5);
        assert!(
            (report.c_min - expected).abs() < 1e-12,
            "c_min = {}, expected = {}",
            report.c_min,
            expected
        );
        assert_eq!(report.per_point.len(), 3);
    }

    #[test]
    fn comparison_kernel_bounded_by_precomputed_sup() {
        let p = params();
        let theta1 = 0.25;
        let z = theta1 / 2.0;
        let sup = comparison_kernel_sup(4, 40.0, z, &p, theta1);
        assert!(sup.is_finite() && sup >= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..2000 {
            let k = rng.gen_range(1..=4i64);
            let s: f64 = rng.gen_range(0.0..40.0);
            let t: f64 = rng.gen_range(s..40.0f64.max(s + 1e-9));
            let ratio = comparison_kernel_ratio(&Mode::one_d(k), s, t, z, &p, theta1);
            // Random points fall between grid nodes; the log-ratio gradient is
            // O(1), so a 0.1 grid needs only a few percent of slack.
            assert!(
                ratio <= sup * 1.10,
                "ratio {ratio} above sup {sup} at k={k}, s={s}, t={t}"
            );
        }
    }

    #[test]
    fn violations_itemized() {
        let p = GevreyParams {
            gamma: 1.5,
            sigma: 2.0,
            alpha: 0.7,
            lambda0: 0.3,
            delta: 1.0,
            lambda1: 0.4,
        };
        let errs = p.violations(1, 0.25);
        assert!(errs.len() >= 5, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("sigma")));
        assert!(errs.iter().any(|e| e.contains("min{lambda1/4, theta1/4}")));
        assert!(params().violations(1, 0.25).is_empty());
    }
}

//! Shared lattice/grid/time-series types used across the dispersion, linear,
//! kinetic, and diagnostics modules.

use crate::error::{LandauError, Result};
use crate::fourier::signed_freq;
use ndarray::Array2;
use num_complex::Complex64;

/// Highest supported spatial dimension.
pub const MAX_DIM: usize = 2;

/// A spatial Fourier mode k ∈ ℤ^d, d ≤ MAX_DIM. Unused components are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mode {
    comps: [i64; MAX_DIM],
    dim: u8,
}

impl Mode {
    pub fn new(comps: &[i64]) -> Result<Self> {
        if comps.is_empty() || comps.len() > MAX_DIM {
            return Err(LandauError::UnsupportedDim(comps.len()));
        }
        let mut stored = [0i64; MAX_DIM];
        stored[..comps.len()].copy_from_slice(comps);
        Ok(Self {
            comps: stored,
            dim: comps.len() as u8,
        })
    }

    pub fn one_d(k: i64) -> Self {
        Self {
            comps: [k, 0],
            dim: 1,
        }
    }

    pub fn two_d(k0: i64, k1: i64) -> Self {
        Self {
            comps: [k0, k1],
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn comps(&self) -> &[i64] {
        &self.comps[..self.dim as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.comps().iter().all(|&c| c == 0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps().iter().map(|&c| (c * c) as f64).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn negated(&self) -> Self {
        let mut comps = self.comps;
        for c in comps.iter_mut() {
            *c = -*c;
        }
        Self {
            comps,
            dim: self.dim,
        }
    }

    /// The gliding-frame frequency k·t associated with this mode at time t.
    pub fn scaled(&self, t: f64) -> [f64; MAX_DIM] {
        let mut eta = [0.0; MAX_DIM];
        for (slot, &c) in eta.iter_mut().zip(self.comps.iter()) {
            *slot = c as f64 * t;
        }
        eta
    }

    /// CSV label: plain integer in 1-D, `k0|k1` in 2-D (comma-free).
    pub fn label(&self) -> String {
        if self.dim() == 1 {
            format!("{}", self.comps[0])
        } else {
            format!("{}|{}", self.comps[0], self.comps[1])
        }
    }
}

/// Uniform time grid t_i = i·dt, i = 0..n.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    /// Grid covering [0, t_max]; n is rounded so n·dt ≈ t_max.
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t_max >= 0.0) {
            return Err(LandauError::Config(format!(
                "time grid requires dt > 0 and t_max >= 0, got dt={dt}, t_max={t_max}"
            )));
        }
        let n = (t_max / dt).round() as usize;
        Ok(Self { dt, n })
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.t(i)).collect()
    }
}

/// Poisson solve in Fourier space: Ê(k) = −i k ρ̂(k)/|k|², Ê(0) = 0.
pub fn field_mode(mode: &Mode, rho: Complex64) -> [Complex64; MAX_DIM] {
    let mut e = [Complex64::new(0.0, 0.0); MAX_DIM];
    let k_sq = mode.norm_sq();
    if k_sq == 0.0 {
        return e;
    }
    // −i·k·ρ/|k|²
    for (slot, &c) in e.iter_mut().zip(mode.comps.iter()) {
        *slot = Complex64::new(0.0, -(c as f64) / k_sq) * rho;
    }
    e
}

/// Time series of density modes ρ̂_±(t,k) and the derived field Ê(t,k).
///
/// Arrays are indexed (time, mode); `e_field` holds one array per spatial
/// component.
#[derive(Clone, Debug)]
pub struct DensitySeries {
    pub times: Vec<f64>,
    pub modes: Vec<Mode>,
    pub rho_plus: Array2<Complex64>,
    pub rho_minus: Array2<Complex64>,
    pub e_field: Vec<Array2<Complex64>>,
}

impl DensitySeries {
    /// Assemble a series from species densities; the field is derived.
    pub fn from_species(
        times: Vec<f64>,
        modes: Vec<Mode>,
        rho_plus: Array2<Complex64>,
        rho_minus: Array2<Complex64>,
    ) -> Result<Self> {
        let (nt, nk) = rho_plus.dim();
        if nt != times.len() || nk != modes.len() || rho_minus.dim() != (nt, nk) {
            return Err(LandauError::GridMismatch(format!(
                "density series shape ({nt},{nk}) does not match {} times / {} modes",
                times.len(),
                modes.len()
            )));
        }
        let dim = modes.first().map_or(1, Mode::dim);
        let mut e_field = vec![Array2::zeros((nt, nk)); dim];
        for (mi, mode) in modes.iter().enumerate() {
            for ti in 0..nt {
                let rho = rho_plus[(ti, mi)] - rho_minus[(ti, mi)];
                let e = field_mode(mode, rho);
                for (c, comp) in e_field.iter_mut().enumerate() {
                    comp[(ti, mi)] = e[c];
                }
            }
        }
        Ok(Self {
            times,
            modes,
            rho_plus,
            rho_minus,
            e_field,
        })
    }

    pub fn dim(&self) -> usize {
        self.modes.first().map_or(1, Mode::dim)
    }

    /// Total density mode ρ̂ = ρ̂_+ − ρ̂_−.
    pub fn rho(&self, ti: usize, mi: usize) -> Complex64 {
        self.rho_plus[(ti, mi)] - self.rho_minus[(ti, mi)]
    }

    /// Euclidean magnitude of Ê(t,k) over spatial components.
    pub fn abs_e(&self, ti: usize, mi: usize) -> f64 {
        self.e_field
            .iter()
            .map(|comp| comp[(ti, mi)].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Σ_k |Ê(t,k)| — the scalar field-amplitude series used by decay fits.
    pub fn e_amplitude(&self, ti: usize) -> f64 {
        (0..self.modes.len()).map(|mi| self.abs_e(ti, mi)).sum()
    }

    pub fn mode_index(&self, mode: &Mode) -> Option<usize> {
        self.modes.iter().position(|m| m == mode)
    }
}

/// Uniform frequency grid for the velocity transform, in DFT bin order.
///
/// Bin m holds η = signed(m)·Δη with Δη = π/v_max; the covered band is
/// [−η_max, η_max) with η_max = (n/2)·Δη.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaGrid {
    pub dim: usize,
    pub n: usize,
    pub d_eta: f64,
}

impl EtaGrid {
    pub fn new(dim: usize, n: usize, v_max: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LandauError::UnsupportedDim(dim));
        }
        if n < 2 || n % 2 != 0 || !(v_max > 0.0) {
            return Err(LandauError::Config(format!(
                "eta grid requires even n >= 2 and v_max > 0, got n={n}, v_max={v_max}"
            )));
        }
        Ok(Self {
            dim,
            n,
            d_eta: std::f64::consts::PI / v_max,
        })
    }

    pub fn eta_max(&self) -> f64 {
        (self.n / 2) as f64 * self.d_eta
    }

    /// Total number of grid points (n^dim).
    pub fn total(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// η value of a single-axis DFT bin.
    pub fn axis_value(&self, bin: usize) -> f64 {
        signed_freq(bin, self.n) as f64 * self.d_eta
    }

    /// Per-axis DFT bins of a flat row-major index.
    pub fn decompose(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut bins = [0usize; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            bins[axis] = rest % self.n;
            rest /= self.n;
        }
        bins
    }

    /// η vector at a flat index.
    pub fn eta_of_flat(&self, flat: usize) -> [f64; MAX_DIM] {
        let bins = self.decompose(flat);
        let mut eta = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            eta[axis] = self.axis_value(bins[axis]);
        }
        eta
    }

    /// Quadrature weight of one grid cell (uniform; integrands vanish at the
    /// band edge for admissible states).
    pub fn cell_weight(&self) -> f64 {
        self.d_eta.powi(self.dim as i32)
    }
}

/// Gliding-frame spectra ĝ_±(t,k,η) and their η-gradients on an η-grid.
///
/// Value arrays are indexed (mode, flat η index); `dg_*` holds one array per
/// η component.
#[derive(Clone, Debug)]
pub struct GlidingSnapshot {
    pub t: f64,
    pub modes: Vec<Mode>,
    pub eta: EtaGrid,
    pub g_plus: Array2<Complex64>,
    pub g_minus: Array2<Complex64>,
    pub dg_plus: Vec<Array2<Complex64>>,
    pub dg_minus: Vec<Array2<Complex64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_basics() {
        let k = Mode::one_d(-3);
        assert_eq!(k.dim(), 1);
        assert_eq!(k.norm_sq(), 9.0);
        assert_eq!(k.negated(), Mode::one_d(3));
        assert_eq!(k.label(), "-3");
        let k2 = Mode::two_d(1, -2);
        assert_eq!(k2.norm_sq(), 5.0);
        assert_eq!(k2.label(), "1|-2");
        assert_eq!(k2.scaled(2.0), [2.0, -4.0]);
        assert!(Mode::new(&[0, 0, 0]).is_err());
    }

    #[test]
    fn time_grid_rounding() {
        let g = TimeGrid::new(0.01, 20.0).unwrap();
        assert_eq!(g.len(), 2001);
        assert!((g.t(2000) - 20.0).abs() < 1e-12);
        assert!(TimeGrid::new(0.0, 1.0).is_err());
    }

    #[test]
    fn field_matches_poisson_examples() {
        // 1-D: ρ̂(1)=1 → Ê(1) = −i.
        let e = field_mode(&Mode::one_d(1), Complex64::new(1.0, 0.0));
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        // 2-D: k=(1,1), ρ̂=2 → Ê = −i(1,1).
        let e = field_mode(&Mode::two_d(1, 1), Complex64::new(2.0, 0.0));
        for c in 0..2 {
            assert!((e[c] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        }
        // Zero mode stays zero.
        let e = field_mode(&Mode::one_d(0), Complex64::new(5.0, 0.0));
        assert_eq!(e[0], Complex64::new(0.0, 0.0));
        // Divergence identity ik·Ê = ρ̂ on a sample.
        let mode = Mode::two_d(2, -1);
        let rho = Complex64::new(0.3, -0.8);
        let e = field_mode(&mode, rho);
        let div = Complex64::i() * (2.0 * e[0] - 1.0 * e[1]);
        assert!((div - rho).norm() < 1e-14);
    }

    #[test]
    fn eta_grid_layout() {
        let grid = EtaGrid::new(1, 8, 4.0).unwrap();
        let d_eta = std::f64::consts::PI / 4.0;
        assert!((grid.axis_value(0) - 0.0).abs() < 1e-15);
        assert!((grid.axis_value(1) - d_eta).abs() < 1e-15);
        assert!((grid.axis_value(7) + d_eta).abs() < 1e-15);
        assert!((grid.eta_max() - 4.0 * d_eta).abs() < 1e-15);
        let grid2 = EtaGrid::new(2, 4, 4.0).unwrap();
        assert_eq!(grid2.total(), 16);
        let bins = grid2.decompose(7);
        assert_eq!(&bins[..2], &[1, 3]);
        let eta = grid2.eta_of_flat(7);
        assert!((eta[0] - d_eta).abs() < 1e-15);
        assert!((eta[1] + d_eta).abs() < 1e-15);
    }

    #[test]
    fn density_series_field_assembly() {
        let times = vec![0.0, 1.0];
        let modes = vec![Mode::one_d(1), Mode::one_d(2)];
        let mut rp = Array2::zeros((2, 2));
        rp[(0, 0)] = Complex64::new(1.0, 0.0);
        let rm = Array2::zeros((2, 2));
        let s = DensitySeries::from_species(times, modes, rp, rm).unwrap();
        assert!((s.e_field[0][(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((s.abs_e(0, 0) - 1.0).abs() < 1e-15);
        assert!((s.e_amplitude(0) - 1.0).abs() < 1e-15);
        assert_eq!(s.mode_index(&Mode::one_d(2)), Some(1));
    }
}

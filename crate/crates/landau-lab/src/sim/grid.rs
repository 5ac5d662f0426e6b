//! Phase-space discretization for the kinetic solver: a compact Fourier
//! lattice |k_i| ≤ k_cut in x (with a padded FFT grid for products) and a
//! uniform collocation grid on [−v_max, v_max]^d in v.

use crate::error::{LandauError, Result};
use crate::fourier::freq_position;
use crate::series::{EtaGrid, Mode, MAX_DIM};

/// Grid parameters shared by the solver state and its transforms.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    /// Retained spatial modes satisfy |k_i| ≤ k_cut.
    pub k_cut: i64,
    /// FFT points per spatial axis; ≥ 3·k_cut and even (2/3-rule padding).
    pub n_x: usize,
    /// Velocity collocation points per axis (even).
    pub n_v: usize,
    /// Velocity box half-width.
    pub v_max: f64,
}

impl Grid {
    pub fn new(dim: usize, k_cut: i64, n_v: usize, v_max: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LandauError::UnsupportedDim(dim));
        }
        let mut problems = Vec::new();
        if k_cut < 1 {
            problems.push(format!("k_cut must be at least 1, got {k_cut}"));
        }
        if n_v < 4 || n_v % 2 != 0 {
            problems.push(format!("n_v must be even and at least 4, got {n_v}"));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            problems.push(format!("v_max must be positive and finite, got {v_max}"));
        }
        if dim == 2 && k_cut > 32 {
            problems.push(format!(
                "2-D runs are capped at 32 modes per axis, got {k_cut}"
            ));
        }
        if dim == 2 && n_v > 64 {
            problems.push(format!(
                "2-D runs are capped at n_v = 64 per axis, got {n_v}"
            ));
        }
        if !problems.is_empty() {
            return Err(LandauError::Constraints(problems));
        }
        let padded = 3 * k_cut as usize;
        let n_x = (padded + padded % 2).max(8);
        Ok(Self {
            dim,
            k_cut,
            n_x,
            n_v,
            v_max,
        })
    }

    /// Modes per axis: 2·k_cut + 1.
    pub fn k_axis_len(&self) -> usize {
        2 * self.k_cut as usize + 1
    }

    /// Total retained modes, (2·k_cut+1)^d.
    pub fn modes_total(&self) -> usize {
        self.k_axis_len().pow(self.dim as u32)
    }

    /// Total velocity cells, n_v^d.
    pub fn v_total(&self) -> usize {
        self.n_v.pow(self.dim as u32)
    }

    /// Total padded spatial points, n_x^d.
    pub fn x_total(&self) -> usize {
        self.n_x.pow(self.dim as u32)
    }

    /// Velocity spacing Δv = 2·v_max/n_v.
    pub fn d_v(&self) -> f64 {
        2.0 * self.v_max / self.n_v as f64
    }

    /// Velocity collocation point v_j = −v_max + j·Δv on one axis.
    pub fn v_axis_value(&self, j: usize) -> f64 {
        -self.v_max + j as f64 * self.d_v()
    }

    /// Per-axis indices of a flat (row-major) velocity cell.
    pub fn v_axes_of_flat(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut axes = [0usize; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            axes[axis] = rest % self.n_v;
            rest /= self.n_v;
        }
        axes
    }

    /// Velocity vector at a flat cell index.
    pub fn v_of_flat(&self, flat: usize) -> [f64; MAX_DIM] {
        let axes = self.v_axes_of_flat(flat);
        let mut v = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            v[axis] = self.v_axis_value(axes[axis]);
        }
        v
    }

    /// Per-axis lattice offsets (k_i + k_cut) of a flat mode index.
    pub fn mode_axes_of_flat(&self, flat: usize) -> [usize; MAX_DIM] {
        let len = self.k_axis_len();
        let mut axes = [0usize; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            axes[axis] = rest % len;
            rest /= len;
        }
        axes
    }

    /// Mode at a flat lattice index.
    pub fn mode_of_flat(&self, flat: usize) -> Mode {
        let axes = self.mode_axes_of_flat(flat);
        let comps: Vec<i64> = (0..self.dim)
            .map(|axis| axes[axis] as i64 - self.k_cut)
            .collect();
        Mode::new(&comps).expect("lattice dimension is validated")
    }

    /// Flat lattice index of a mode, or None when outside the lattice.
    pub fn flat_of_mode(&self, mode: &Mode) -> Option<usize> {
        if mode.dim() != self.dim {
            return None;
        }
        let len = self.k_axis_len();
        let mut flat = 0usize;
        for &c in mode.comps() {
            if c.abs() > self.k_cut {
                return None;
            }
            flat = flat * len + (c + self.k_cut) as usize;
        }
        Some(flat)
    }

    /// All lattice modes in flat order.
    pub fn lattice_modes(&self) -> Vec<Mode> {
        (0..self.modes_total())
            .map(|flat| self.mode_of_flat(flat))
            .collect()
    }

    /// Row-major position of a lattice mode on the padded FFT grid.
    pub fn fft_position_of(&self, mode: &Mode) -> usize {
        let mut pos = 0usize;
        for &c in mode.comps() {
            pos = pos * self.n_x + freq_position(c, self.n_x);
        }
        pos
    }

    /// Frequency grid of the velocity transform.
    pub fn eta_grid(&self) -> Result<EtaGrid> {
        EtaGrid::new(self.dim, self.n_v, self.v_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_and_counts() {
        let g = Grid::new(1, 32, 256, 8.0).unwrap();
        assert_eq!(g.n_x, 96);
        assert_eq!(g.k_axis_len(), 65);
        assert_eq!(g.modes_total(), 65);
        assert_eq!(g.v_total(), 256);
        let g = Grid::new(1, 1, 8, 4.0).unwrap();
        assert_eq!(g.n_x, 8);
        let g = Grid::new(2, 3, 8, 4.0).unwrap();
        assert_eq!(g.n_x, 10);
        assert_eq!(g.modes_total(), 49);
        assert_eq!(g.v_total(), 64);
        assert_eq!(g.x_total(), 100);
    }

    #[test]
    fn lattice_round_trip() {
        for g in [
            Grid::new(1, 4, 8, 4.0).unwrap(),
            Grid::new(2, 2, 8, 4.0).unwrap(),
        ] {
            for flat in 0..g.modes_total() {
                let mode = g.mode_of_flat(flat);
                assert_eq!(g.flat_of_mode(&mode), Some(flat));
                for &c in mode.comps() {
                    assert!(c.abs() <= g.k_cut);
                }
            }
        }
        let g = Grid::new(1, 4, 8, 4.0).unwrap();
        assert_eq!(g.flat_of_mode(&Mode::one_d(5)), None);
        assert_eq!(g.flat_of_mode(&Mode::two_d(1, 1)), None);
    }

    #[test]
    fn velocity_grid_layout() {
        let g = Grid::new(1, 2, 8, 4.0).unwrap();
        assert!((g.d_v() - 1.0).abs() < 1e-15);
        assert!((g.v_axis_value(0) + 4.0).abs() < 1e-15);
        assert!((g.v_axis_value(7) - 3.0).abs() < 1e-15);
        let g2 = Grid::new(2, 2, 4, 4.0).unwrap();
        let v = g2.v_of_flat(6);
        assert!((v[0] - (-4.0 + 2.0)).abs() < 1e-15);
        assert!((v[1] - (-4.0 + 2.0 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn constraint_violations_are_itemized() {
        let err = Grid::new(2, 40, 65, -1.0).unwrap_err();
        match err {
            LandauError::Constraints(items) => {
                assert!(items.len() >= 3, "got {items:?}");
            }
            other => panic!("expected constraint list, got {other}"),
        }
    }

    #[test]
    fn fft_positions_match_signed_frequencies() {
        let g = Grid::new(1, 2, 8, 4.0).unwrap();
        assert_eq!(g.fft_position_of(&Mode::one_d(1)), 1);
        assert_eq!(g.fft_position_of(&Mode::one_d(-1)), g.n_x - 1);
        let g2 = Grid::new(2, 2, 8, 4.0).unwrap();
        assert_eq!(
            g2.fft_position_of(&Mode::two_d(-1, 2)),
            (g2.n_x - 1) * g2.n_x + 2
        );
    }
}

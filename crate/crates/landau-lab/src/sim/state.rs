//! Solver state — Fourier-in-x, collocation-in-v spectra of both species —
//! plus flat binary checkpoints.
//!
//! Checkpoint layout (little-endian): magic `LANDAUCK`, u32 version (= 1),
//! u32 dim, i64 k_cut, u64 n_v, f64 v_max, f64 t, then the plus-species and
//! minus-species arrays as (re, im) f64 pairs in state order.

use crate::error::{LandauError, Result};
use crate::series::Mode;
use crate::sim::grid::Grid;
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const CHECKPOINT_MAGIC: &[u8; 8] = b"LANDAUCK";
const CHECKPOINT_VERSION: u32 = 1;

/// Perturbation spectra f̂_±(k, v_j) indexed mode-major: the entry for
/// lattice mode `m` and velocity cell `v` sits at `m·v_total + v`.
#[derive(Clone, Debug)]
pub struct SpectralState {
    pub grid: Grid,
    pub t: f64,
    pub f_plus: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.modes_total() * grid.v_total();
        Self {
            grid,
            t: 0.0,
            f_plus: vec![Complex64::new(0.0, 0.0); len],
            f_minus: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Flat index of (mode, velocity cell).
    pub fn index(&self, mode_flat: usize, v_flat: usize) -> usize {
        mode_flat * self.grid.v_total() + v_flat
    }

    /// Species density modes ρ̂_s(k) = Δv^d Σ_j f̂_s(k, v_j), in lattice order.
    pub fn density(&self, data: &[Complex64]) -> Vec<Complex64> {
        let v_total = self.grid.v_total();
        let weight = self.grid.d_v().powi(self.grid.dim as i32);
        (0..self.grid.modes_total())
            .map(|m| {
                let row = &data[m * v_total..(m + 1) * v_total];
                row.iter().sum::<Complex64>() * weight
            })
            .collect()
    }

    /// Largest violation of f̂(−k,v) = conj f̂(k,v) across both species.
    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for data in [&self.f_plus, &self.f_minus] {
            for flat in 0..self.grid.modes_total() {
                let mode = self.grid.mode_of_flat(flat);
                let neg = self
                    .grid
                    .flat_of_mode(&mode.negated())
                    .expect("lattice is symmetric");
                for v in 0..self.grid.v_total() {
                    let defect = (data[self.index(neg, v)] - data[self.index(flat, v)].conj())
                        .norm();
                    worst = worst.max(defect);
                }
            }
        }
        worst
    }

    /// Velocity-boundary occupancy: per species, the sup-norm bound
    /// (2π)^{−d} Σ_k |f̂(k, v_edge)| maximized over edge cells (any axis at
    /// −v_max); returns the worse species.
    pub fn boundary_mass(&self) -> f64 {
        let v_total = self.grid.v_total();
        let norm = (2.0 * std::f64::consts::PI).powi(-(self.grid.dim as i32));
        let mut worst = 0.0f64;
        for v in 0..v_total {
            let axes = self.grid.v_axes_of_flat(v);
            if !axes[..self.grid.dim].contains(&0) {
                continue;
            }
            for data in [&self.f_plus, &self.f_minus] {
                let total: f64 = (0..self.grid.modes_total())
                    .map(|m| data[m * v_total + v].norm())
                    .sum();
                worst = worst.max(total * norm);
            }
        }
        worst
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(CHECKPOINT_MAGIC)?;
        out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        out.write_all(&(self.grid.dim as u32).to_le_bytes())?;
        out.write_all(&self.grid.k_cut.to_le_bytes())?;
        out.write_all(&(self.grid.n_v as u64).to_le_bytes())?;
        out.write_all(&self.grid.v_max.to_le_bytes())?;
        out.write_all(&self.t.to_le_bytes())?;
        for data in [&self.f_plus, &self.f_minus] {
            for value in data {
                out.write_all(&value.re.to_le_bytes())?;
                out.write_all(&value.im.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn load_checkpoint(path: &Path) -> Result<Self> {
        let mut input = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        read_exact(&mut input, &mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(LandauError::Checkpoint(format!(
                "bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}"
            )));
        }
        let version = read_u32(&mut input)?;
        if version != CHECKPOINT_VERSION {
            return Err(LandauError::Checkpoint(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let dim = read_u32(&mut input)? as usize;
        let k_cut = read_i64(&mut input)?;
        let n_v = read_u64(&mut input)? as usize;
        let v_max = read_f64(&mut input)?;
        let t = read_f64(&mut input)?;
        if !t.is_finite() {
            return Err(LandauError::Checkpoint(format!(
                "non-finite checkpoint time {t}"
            )));
        }
        let grid = Grid::new(dim, k_cut, n_v, v_max)
            .map_err(|e| LandauError::Checkpoint(format!("invalid grid header: {e}")))?;
        let len = grid.modes_total() * grid.v_total();
        let mut species = Vec::with_capacity(2);
        for _ in 0..2 {
            let mut data = Vec::with_capacity(len);
            for _ in 0..len {
                let re = read_f64(&mut input)?;
                let im = read_f64(&mut input)?;
                data.push(Complex64::new(re, im));
            }
            species.push(data);
        }
        let mut trailer = [0u8; 1];
        if input.read(&mut trailer)? != 0 {
            return Err(LandauError::Checkpoint(
                "trailing bytes after state arrays".into(),
            ));
        }
        let f_minus = species.pop().expect("two species were read");
        let f_plus = species.pop().expect("two species were read");
        Ok(Self {
            grid,
            t,
            f_plus,
            f_minus,
        })
    }
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            LandauError::Checkpoint("file truncated".into())
        } else {
            LandauError::Io(e)
        }
    })
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(input, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(input, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_i64<R: Read>(input: &mut R) -> Result<i64> {
    let mut buf = [0u8; 8];
    read_exact(input, &mut buf)?;
    Ok(i64::from_le_bytes(buf))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    read_exact(input, &mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

/// Total-density zero mode |ρ̂(0)| from species densities in lattice order.
pub fn neutrality_defect(grid: &Grid, rho_plus: &[Complex64], rho_minus: &[Complex64]) -> f64 {
    let zero = Mode::new(&vec![0i64; grid.dim]).expect("dim validated");
    let flat = grid.flat_of_mode(&zero).expect("zero mode is on lattice");
    (rho_plus[flat] - rho_minus[flat]).norm()
}

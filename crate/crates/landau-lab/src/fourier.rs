//! FFT plan caching and axis-wise transforms over flat row-major arrays.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Shared FFT plans keyed by (size, direction).
pub struct FftCache {
    planner: Mutex<FftPlanner<f64>>,
    plans: Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>,
}

impl Default for FftCache {
    fn default() -> Self {
        Self::new()
    }
}

impl FftCache {
    pub fn new() -> Self {
        Self {
            planner: Mutex::new(FftPlanner::new()),
            plans: Mutex::new(HashMap::new()),
        }
    }

    pub fn plan(&self, len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
        let mut plans = self.plans.lock().unwrap();
        plans
            .entry((len, inverse))
            .or_insert_with(|| {
                let mut planner = self.planner.lock().unwrap();
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    }
}

/// Signed frequency for DFT bin `i` of a length-`n` transform: 0, 1, ..., n/2-1, -n/2, ..., -1.
pub fn signed_freq(i: usize, n: usize) -> i64 {
    let i = i as i64;
    let n = n as i64;
    if i <= (n - 1) / 2 {
        i
    } else {
        i - n
    }
}

/// DFT bin holding signed frequency `k` in a length-`n` transform.
pub fn freq_position(k: i64, n: usize) -> usize {
    let n = n as i64;
    debug_assert!(k >= -(n / 2) && k < n - n / 2 + if n % 2 == 0 { 0 } else { 1 });
    (k.rem_euclid(n)) as usize
}

/// In-place FFT along one axis of a flat row-major array of the given shape.
///
/// `inverse = true` applies the unnormalized inverse transform; callers divide
/// by the axis length where the convention requires it.
pub fn fft_axis(
    cache: &FftCache,
    data: &mut [Complex64],
    shape: &[usize],
    axis: usize,
    inverse: bool,
) {
    let len = shape[axis];
    if len <= 1 {
        return;
    }
    let total: usize = shape.iter().product();
    debug_assert_eq!(total, data.len());
    let stride: usize = shape[axis + 1..].iter().product();
    let plan = cache.plan(len, inverse);
    if stride == 1 {
        // Contiguous lanes: transform in place, chunk by chunk.
        for chunk in data.chunks_exact_mut(len) {
            plan.process(chunk);
        }
    } else {
        let outer: usize = shape[..axis].iter().product();
        let mut lane = vec![Complex64::new(0.0, 0.0); len];
        for o in 0..outer {
            let base_o = o * len * stride;
            for s in 0..stride {
                let base = base_o + s;
                for (j, slot) in lane.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                plan.process(&mut lane);
                for (j, value) in lane.iter().enumerate() {
                    data[base + j * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_freq_layout() {
        assert_eq!(
            (0..8).map(|i| signed_freq(i, 8)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
        assert_eq!(
            (0..5).map(|i| signed_freq(i, 5)).collect::<Vec<_>>(),
            vec![0, 1, 2, -2, -1]
        );
        for i in 0..8 {
            assert_eq!(freq_position(signed_freq(i, 8), 8), i);
        }
    }

    #[test]
    fn round_trip_all_axes() {
        let cache = FftCache::new();
        let shape = [4usize, 6, 5];
        let n: usize = shape.iter().product();
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        for axis in 0..3 {
            let mut data = orig.clone();
            fft_axis(&cache, &mut data, &shape, axis, false);
            fft_axis(&cache, &mut data, &shape, axis, true);
            let scale = 1.0 / shape[axis] as f64;
            for (a, b) in data.iter().zip(&orig) {
                assert!((a * scale - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_plain_dft_on_middle_axis() {
        let cache = FftCache::new();
        let shape = [2usize, 4, 3];
        let n: usize = shape.iter().product();
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(0.3 * i as f64, (i * i) as f64 * 0.01))
            .collect();
        let mut fast = orig.clone();
        fft_axis(&cache, &mut fast, &shape, 1, false);
        for o in 0..2 {
            for s in 0..3 {
                for m in 0..4 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..4 {
                        let phase = -2.0 * std::f64::consts::PI * (m * j) as f64 / 4.0;
                        acc += orig[o * 12 + j * 3 + s] * Complex64::from_polar(1.0, phase);
                    }
                    assert!((fast[o * 12 + m * 3 + s] - acc).norm() < 1e-12);
                }
            }
        }
    }
}

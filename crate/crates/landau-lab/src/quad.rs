//! Gauss-Legendre panel quadrature shared by the dispersion and kernel paths.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an n-point Gauss-Legendre rule on (-1, 1).
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_rule(n: usize) -> GaussRule {
    assert!(n >= 2, "rule order must be at least 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

/// Cached rule lookup; rules are immutable once built.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n).or_insert_with(|| Arc::new(build_rule(n))).clone()
}

impl GaussRule {
    pub fn integrate_complex<F>(&self, a: f64, b: f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    pub fn integrate_real<F>(&self, a: f64, b: f64, mut f: F) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_match_known_low_order() {
        let rule = gauss_legendre(2);
        let x = 1.0 / 3.0_f64.sqrt();
        assert!((rule.nodes[0] + x).abs() < 1e-15);
        assert!((rule.nodes[1] - x).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        // GL-16 is exact through degree 31.
        let rule = gauss_legendre(16);
        let val = rule.integrate_real(0.0, 2.0, |x| x.powi(7) - 3.0 * x.powi(3) + 1.0);
        let exact = 2.0_f64.powi(8) / 8.0 - 3.0 * 2.0_f64.powi(4) / 4.0 + 2.0;
        assert!((val - exact).abs() < 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn integrates_oscillatory_gaussian() {
        // Panel-splitting consistency on an oscillatory decaying integrand:
        // two different panel widths that both resolve the oscillation must
        // agree to near machine precision.
        let rule = gauss_legendre(16);
        let f = |t: f64| Complex64::new(t * (-0.5 * t * t).exp() * (7.0 * t).cos(), 0.0);
        let mut sums = Vec::new();
        for width in [0.75, 0.4] {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut a = 0.0f64;
            while a < 12.0 {
                let b = (a + width).min(12.0);
                acc += rule.integrate_complex(a, b, f);
                a = b;
            }
            sums.push(acc);
        }
        assert!((sums[0] - sums[1]).norm() < 1e-12);
    }
}

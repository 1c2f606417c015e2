//! Piecewise Chebyshev interpolant of p_N and p_N′ on [0, R].
//!
//! Panels grow geometrically away from u = 0 because for α < 1 the density
//! is smooth but not analytic there; elsewhere the nearest singularity sits
//! at the origin, so a panel of relative width ≤ 1 keeps a fixed Bernstein
//! ellipse and a degree-24 interpolant reaches round-off.

use super::fourier::fourier_deriv;
use super::QuadratureConfig;
use crate::error::Result;

const DEGREE: usize = 24;
const INNER_EDGE: f64 = 1e-6;
const MAX_WIDTH: f64 = 0.5;

#[derive(Debug, Clone)]
struct ChebPanel {
    lo: f64,
    hi: f64,
    coef: [f64; DEGREE + 1],
}

impl ChebPanel {
    #[inline]
    fn eval(&self, u: f64) -> f64 {
        let x = (2.0 * u - self.lo - self.hi) / (self.hi - self.lo);
        let x2 = 2.0 * x;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coef[1..].iter().rev() {
            let b0 = x2 * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coef[0]
    }
}

/// Interpolation table for derivative orders 0 and 1.
#[derive(Debug, Clone)]
pub struct DensityTable {
    radius: f64,
    edges: Vec<f64>,
    orders: [Vec<ChebPanel>; 2],
}

impl DensityTable {
    pub fn build(alpha: f64, radius: f64, cfg: &QuadratureConfig) -> Result<Self> {
        let mut edges = vec![0.0, INNER_EDGE];
        let mut u = INNER_EDGE;
        while u < radius {
            let next = (2.0 * u).min(u + MAX_WIDTH).min(radius);
            edges.push(next);
            u = next;
        }
        let nodes: Vec<f64> = (0..=DEGREE)
            .map(|j| ((j as f64 + 0.5) * std::f64::consts::PI / (DEGREE as f64 + 1.0)).cos())
            .collect();
        let mut orders: [Vec<ChebPanel>; 2] = [Vec::new(), Vec::new()];
        for (n, panels) in orders.iter_mut().enumerate() {
            for w in edges.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let mut vals = [0.0; DEGREE + 1];
                for (v, x) in vals.iter_mut().zip(&nodes) {
                    let uu = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                    *v = fourier_deriv(alpha, n as u32, uu, cfg)?.value;
                }
                panels.push(ChebPanel {
                    lo,
                    hi,
                    coef: cheb_coefficients(&vals),
                });
            }
        }
        Ok(Self { radius, edges, orders })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Interpolated d^n p/du^n at 0 ≤ u ≤ radius, n ∈ {0, 1}.
    #[inline]
    pub fn eval(&self, n: u32, u: f64) -> f64 {
        debug_assert!(n <= 1 && u >= 0.0 && u <= self.radius);
        let i = match self.edges.binary_search_by(|e| e.total_cmp(&u)) {
            Ok(i) => i.min(self.edges.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.edges.len() - 2),
        };
        self.orders[n as usize][i].eval(u)
    }
}

fn cheb_coefficients(vals: &[f64; DEGREE + 1]) -> [f64; DEGREE + 1] {
    let m = DEGREE + 1;
    let mut coef = [0.0; DEGREE + 1];
    for (k, c) in coef.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in vals.iter().enumerate() {
            s += v * ((k as f64) * (j as f64 + 0.5) * std::f64::consts::PI / m as f64).cos();
        }
        *c = 2.0 * s / m as f64;
    }
    coef[0] *= 0.5;
    coef
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_smooth_function() {
        let vals: [f64; DEGREE + 1] = std::array::from_fn(|j| {
            let x = ((j as f64 + 0.5) * std::f64::consts::PI / (DEGREE as f64 + 1.0)).cos();
            (1.0 + x).exp()
        });
        let p = ChebPanel {
            lo: -1.0,
            hi: 1.0,
            coef: cheb_coefficients(&vals),
        };
        for i in 0..50 {
            let x = -1.0 + 2.0 * i as f64 / 49.0;
            assert!((p.eval(x) - (1.0 + x).exp()).abs() < 1e-14);
        }
    }
}

//! Standard symmetric α-stable law N with characteristic function
//! e^{-|ω|^α}, its derivatives, and the dispersion-scaled family
//! p_η(t) = η^{-1/α} p_N(t η^{-1/α}).
//!
//! Evaluation strategy for d^n p_N/du^n at u:
//! - α = 1: closed-form Cauchy derivatives;
//! - |u| beyond the tail radius: large-|u| series;
//! - otherwise: Fourier inversion by panel quadrature, or the Chebyshev
//!   table when the law was built with [`StableLaw::tabulated`].

pub mod fourier;
pub mod series;
pub mod table;
mod tail;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, AdaptiveTol};
use crate::specfun::{self, MAX_DERIV_ORDER};

pub use tail::{tail_asymptote, TailReport};

use fourier::fourier_deriv;
use series::{series_deriv, series_is_sharp, series_tail_mass};
use table::DensityTable;

/// Stability exponent and dispersion of a member of the scaled family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableModel {
    alpha: f64,
    eta: f64,
}

impl StableModel {
    pub fn new(alpha: f64, eta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::Domain(format!("dispersion must be positive, got {eta}")));
        }
        Ok(Self { alpha, eta })
    }

    /// The η = 1 member, i.e. N itself.
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// η^{1/α}, the scale factor multiplying N.
    pub fn scale(&self) -> f64 {
        self.eta.powf(1.0 / self.alpha)
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.alpha, eta)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 2), got {alpha}")))
    }
}

/// Tolerances and limits shared by the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Truncate the frequency integral where ω^n e^{-ω^α} drops below this.
    pub freq_cutoff_eps: f64,
    /// |u| beyond which the series replaces quadrature; `None` picks the
    /// smallest radius where the series is accurate to round-off.
    pub tail_switch_radius: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_panels: 100_000,
            freq_cutoff_eps: 1e-16,
            tail_switch_radius: None,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.abs_tol, self.rel_tol, self.freq_cutoff_eps];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Parameter("quadrature tolerances must be positive".into()));
        }
        if self.max_panels < 16 {
            return Err(Error::Parameter(format!(
                "max_panels must be at least 16, got {}",
                self.max_panels
            )));
        }
        if let Some(r) = self.tail_switch_radius {
            if !(r > 0.0) {
                return Err(Error::Parameter("tail_switch_radius must be positive".into()));
            }
        }
        Ok(())
    }
}

/// How a density value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Fourier,
    Series,
    Table,
}

#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    /// A negative quadrature result was clamped to zero.
    pub clamped: bool,
}

/// Evaluator for the standard law N at a fixed α.
#[derive(Debug, Clone)]
pub struct StableLaw {
    alpha: f64,
    config: QuadratureConfig,
    tail_radius: f64,
    table: Option<Arc<DensityTable>>,
}

const RADIUS_LADDER: [f64; 24] = [
    0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0,
    70.0, 100.0, 150.0,
];

impl StableLaw {
    /// Direct evaluator (quadrature / series / closed form).
    pub fn new(alpha: f64, config: QuadratureConfig) -> Result<Self> {
        check_alpha(alpha)?;
        config.validate()?;
        let tail_radius = match config.tail_switch_radius {
            Some(r) => r,
            None => auto_tail_radius(alpha),
        };
        Ok(Self {
            alpha,
            config,
            tail_radius,
            table: None,
        })
    }

    /// Like [`StableLaw::new`] but p_N and p_N′ inside the tail radius come
    /// from a precomputed Chebyshev table. Orders ≥ 2 still use quadrature.
    pub fn tabulated(alpha: f64, config: QuadratureConfig) -> Result<Self> {
        let mut law = Self::new(alpha, config)?;
        if !is_cauchy(alpha) {
            law.table = Some(Arc::new(DensityTable::build(alpha, law.tail_radius, &config)?));
        }
        Ok(law)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    pub fn tail_radius(&self) -> f64 {
        self.tail_radius
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// d^n p_N/du^n at u with provenance.
    pub fn evaluate(&self, n: u32, u: f64) -> Result<Evaluation> {
        if n > MAX_DERIV_ORDER {
            return Err(Error::Domain(format!(
                "derivative order {n} exceeds supported maximum {MAX_DERIV_ORDER}"
            )));
        }
        if !u.is_finite() {
            return Err(Error::Domain(format!("argument must be finite, got {u}")));
        }
        let x = u.abs();
        let parity = if n % 2 == 1 && u < 0.0 { -1.0 } else { 1.0 };
        let (value, error, method) = if is_cauchy(self.alpha) {
            (cauchy_deriv(n, x), 0.0, Method::ClosedForm)
        } else if x > self.tail_radius {
            let r = series_deriv(self.alpha, n, x);
            (r.value, r.error, Method::Series)
        } else if let (Some(t), true) = (&self.table, n <= 1) {
            (t.eval(n, x), 0.0, Method::Table)
        } else {
            let r = fourier_deriv(self.alpha, n, x, &self.config)?;
            if r.error > self.config.abs_tol.max(self.config.rel_tol * r.value.abs()) {
                return Err(Error::Convergence {
                    panels: r.panels,
                    estimate: r.error,
                });
            }
            (r.value, r.error, Method::Fourier)
        };
        let mut value = parity * value;
        let mut clamped = false;
        if n == 0 && value < 0.0 {
            value = 0.0;
            clamped = true;
        }
        Ok(Evaluation {
            value,
            error,
            method,
            clamped,
        })
    }

    /// p_N(u).
    #[inline]
    pub fn pdf(&self, u: f64) -> Result<f64> {
        Ok(self.evaluate(0, u)?.value)
    }

    /// d^n p_N/du^n (u), 0 ≤ n ≤ 4.
    #[inline]
    pub fn pdf_deriv(&self, n: u32, u: f64) -> Result<f64> {
        Ok(self.evaluate(n, u)?.value)
    }

    /// max_u p_N(u) = p_N(0) for the symmetric unimodal law.
    pub fn mode_height(&self) -> Result<f64> {
        self.pdf(0.0)
    }

    /// p_η(t) = η^{-1/α} p_N(t η^{-1/α}).
    pub fn scaled_pdf(&self, eta: f64, t: f64) -> Result<f64> {
        let s = eta.powf(1.0 / self.alpha);
        Ok(self.pdf(t / s)? / s)
    }

    /// ∂p_η(t)/∂η = −(1/α) η^{-1-1/α} p_N(u) − (1/α) t η^{-1-2/α} p_N′(u),
    /// u = t η^{-1/α}.
    pub fn dispersion_deriv(&self, eta: f64, t: f64) -> Result<f64> {
        let s = eta.powf(1.0 / self.alpha);
        let u = t / s;
        let p = self.pdf(u)?;
        let dp = self.pdf_deriv(1, u)?;
        Ok(-(p + u * dp) / (self.alpha * eta * s))
    }

    /// ∫_{t0}^∞ p_N(t) dt for t0 ≥ 0.
    pub fn tail_mass(&self, t0: f64) -> Result<f64> {
        let t0 = t0.abs();
        if is_cauchy(self.alpha) {
            return Ok(if t0 > 1.0 {
                (1.0 / t0).atan() / PI
            } else {
                0.5 - t0.atan() / PI
            });
        }
        let r = self.tail_radius;
        if t0 >= r {
            return Ok(series_tail_mass(self.alpha, t0).value);
        }
        let tol = AdaptiveTol {
            abs: 1e-14,
            rel: 1e-13,
            max_panels: self.config.max_panels,
        };
        let breaks = graded_breakpoints(t0, r);
        let part = quad::adaptive(&breaks, tol, |u| self.pdf(u).unwrap_or(f64::NAN))?;
        if !part.value.is_finite() {
            return Err(Error::Convergence {
                panels: part.edges.len(),
                estimate: f64::NAN,
            });
        }
        Ok(part.value + series_tail_mass(self.alpha, r).value)
    }

    /// Total mass of p_N: twice the integral over [0, ∞).
    pub fn total_mass(&self) -> Result<f64> {
        Ok(2.0 * self.tail_mass(0.0)?)
    }
}

fn is_cauchy(alpha: f64) -> bool {
    alpha == 1.0
}

/// Breakpoints on [a, b] refined geometrically toward 0 when a = 0.
fn graded_breakpoints(a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a];
    if a == 0.0 {
        let mut x = 1e-8f64.min(b);
        while x < b {
            pts.push(x);
            x *= 4.0;
        }
    }
    pts.push(b);
    pts.dedup();
    pts
}

/// Smallest ladder radius where the series is at round-off for all orders.
fn auto_tail_radius(alpha: f64) -> f64 {
    if is_cauchy(alpha) {
        return 1.0;
    }
    RADIUS_LADDER
        .iter()
        .copied()
        .find(|&r| {
            // check the radius and a few points beyond it
            [1.0, 1.5, 3.0, 10.0]
                .iter()
                .all(|m| series_is_sharp(alpha, r * m, MAX_DERIV_ORDER))
        })
        .unwrap_or(RADIUS_LADDER[RADIUS_LADDER.len() - 1])
}

/// d^n/du^n of 1/(π(1+u²)) = (−1)^n n! Im[(u − i)^{-(n+1)}]/π.
pub fn cauchy_deriv(n: u32, u: f64) -> f64 {
    let z = Complex64::new(u, -1.0).powu(n + 1).inv();
    let fact: f64 = (1..=n).map(f64::from).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * fact * z.im / PI
}

/// Γ((n+1)/α)/(πα) for this law; re-exported for convenience.
pub fn deriv_bound(alpha: f64, n: u32) -> Result<f64> {
    specfun::global_deriv_bound(alpha, n)
}

#[cfg(test)]
mod tests;

//! Large-|u| expansion of symmetric stable densities in powers of u^{-α}:
//!
//! p(x) = (1/π) Σ_{k≥1} (−1)^{k+1} Γ(αk + 1)/k! · sin(kπα/2) · x^{−αk−1},  x > 0.
//!
//! Convergent for α < 1, asymptotic for α > 1. Term-wise differentiation
//! and integration give the derivative and tail-mass variants. Summation
//! stops at the smallest term (optimal truncation) or once terms drop below
//! machine precision relative to the partial sum.

use std::f64::consts::PI;

use crate::specfun::ln_gamma;

const MAX_TERMS: usize = 400;

#[derive(Debug, Clone, Copy)]
pub struct SeriesResult {
    pub value: f64,
    /// Magnitude of the first omitted term.
    pub error: f64,
    /// Σ|terms|, a measure of cancellation.
    pub abs_sum: f64,
    pub terms: usize,
}

/// d^n p/dx^n at x > 0 from the expansion.
pub fn series_deriv(alpha: f64, n: u32, x: f64) -> SeriesResult {
    debug_assert!(x > 0.0);
    let nf = n as f64;
    let sign_n = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // (−1)^n Γ(αk + n + 1)/k! x^{−αk−1−n}
    sum_terms(alpha, |k| {
        let kf = k as f64;
        let ln_mag = ln_gamma(alpha * kf + nf + 1.0) - ln_gamma(kf + 1.0) - (alpha * kf + 1.0 + nf) * x.ln();
        (ln_mag, sign_n)
    })
}

/// ∫_x^∞ p(t) dt from the term-wise integrated expansion.
pub fn series_tail_mass(alpha: f64, x: f64) -> SeriesResult {
    debug_assert!(x > 0.0);
    // Γ(αk + 1)/(k! αk) x^{−αk} = Γ(αk)/k! x^{−αk}
    sum_terms(alpha, |k| {
        let kf = k as f64;
        let ln_mag = ln_gamma(alpha * kf) - ln_gamma(kf + 1.0) - alpha * kf * x.ln();
        (ln_mag, 1.0)
    })
}

fn sum_terms<F: Fn(usize) -> (f64, f64)>(alpha: f64, term: F) -> SeriesResult {
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    let mut error = 0.0;
    let mut used = 0;
    for k in 1..=MAX_TERMS {
        let (ln_mag, sign) = term(k);
        let mag = ln_mag.exp();
        // Asymptotic regime: stop at the smallest term.
        if mag > prev_mag && alpha > 1.0 {
            error = prev_mag;
            break;
        }
        let s = (k as f64 * PI * alpha / 2.0).sin();
        let alt = if k % 2 == 1 { 1.0 } else { -1.0 };
        let t = alt * sign * s * mag / PI;
        // Neumaier step
        let nv = value + t;
        if value.abs() >= t.abs() {
            comp += (value - nv) + t;
        } else {
            comp += (t - nv) + value;
        }
        value = nv;
        abs_sum += t.abs();
        used = k;
        prev_mag = mag;
        error = mag / PI;
        if mag / PI < 1e-18 * (value + comp).abs() {
            break;
        }
    }
    SeriesResult {
        value: value + comp,
        error,
        abs_sum,
        terms: used,
    }
}

/// Whether the expansion at x is accurate enough to replace quadrature for
/// derivative orders 0..=max_order.
pub fn series_is_sharp(alpha: f64, x: f64, max_order: u32) -> bool {
    (0..=max_order).all(|n| {
        let r = series_deriv(alpha, n, x);
        let scale = r.value.abs();
        scale > 0.0 && r.error <= 1e-15 * scale && r.abs_sum <= 1e2 * scale
    })
}

use serde::Serialize;

use super::StableLaw;
use crate::error::{Error, Result};

/// Least-squares fit of ln|d^n p_N/du^n| against ln u on a log-spaced window.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub alpha: f64,
    pub order: u32,
    pub u_lo: f64,
    pub u_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    /// −(n + α + 1), the rate the fit should reproduce.
    pub expected_slope: f64,
}

const FIT_POINTS: usize = 64;

pub fn tail_asymptote(law: &StableLaw, n: u32, u_lo: f64, u_hi: f64) -> Result<TailReport> {
    if n > 2 {
        return Err(Error::Domain(format!("tail fit supports orders 0..=2, got {n}")));
    }
    if !(u_lo > 0.0 && u_hi > u_lo) {
        return Err(Error::Parameter(format!("invalid fit window [{u_lo}, {u_hi}]")));
    }
    let (l0, l1) = (u_lo.ln(), u_hi.ln());
    let mut xs = Vec::with_capacity(FIT_POINTS);
    let mut ys = Vec::with_capacity(FIT_POINTS);
    for i in 0..FIT_POINTS {
        let lu = l0 + (l1 - l0) * i as f64 / (FIT_POINTS - 1) as f64;
        let v = law.pdf_deriv(n, lu.exp())?.abs();
        if !(v > f64::MIN_POSITIVE) || !v.is_finite() {
            return Err(Error::Fit(format!(
                "derivative of order {n} underflows at u = {:.3e}; move the window",
                lu.exp()
            )));
        }
        xs.push(lu);
        ys.push(v.ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(TailReport {
        alpha: law.alpha(),
        order: n,
        u_lo,
        u_hi,
        slope,
        intercept: my - slope * mx,
        expected_slope: -(n as f64 + law.alpha() + 1.0),
    })
}

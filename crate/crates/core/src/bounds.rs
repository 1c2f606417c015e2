//! Concrete constants for the tail and envelope bounds, plus grid
//! certificates that each dominating function really dominates.
//!
//! Every statement here is certified on an explicit finite grid. Fitted
//! upper constants are inflated by 5% and lower ones deflated by 5%.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::{r_b_for_source, MixtureModel};
use crate::quad::{self, AdaptiveTol, CompensatedSum};
use crate::source::SourceDistribution;
use crate::specfun::{gamma_checked, global_deriv_bound};
use crate::stable::StableLaw;

pub const UPPER_INFLATION: f64 = 1.05;
pub const LOWER_DEFLATION: f64 = 0.95;
/// Relative slack allowed when comparing a value against its bound.
pub const CERT_RTOL: f64 = 1e-9;
const FIT_POINTS: usize = 400;
/// Smallest crossover (in units of the standard law) accepted as a tail.
const MIN_TAIL_THRESHOLD: f64 = 1.0;

/// The dispersion window (b, 2b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionWindow {
    b: f64,
}

impl DispersionWindow {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Parameter(format!("window endpoint must be positive, got {b}")));
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn contains(&self, eta: f64) -> bool {
        eta > self.b && eta < 2.0 * self.b
    }

    /// `n` equally spaced interior points b(1 + i/(n+1)).
    pub fn eta_grid(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|i| self.b * (1.0 + i as f64 / (n + 1) as f64)).collect()
    }
}

/// Fitted tail constants for p_N.
#[derive(Debug, Clone, Serialize)]
pub struct TailConstants {
    pub alpha: f64,
    /// p_N(u) ≤ k u^{-1-α} for u ≥ threshold.
    pub k: f64,
    /// |p_N′(u)| ≤ κ₁ u^{-2-α} for u ≥ threshold.
    pub kappa_1: f64,
    /// p_N(u) ≥ K u^{-1-α} for u ≥ threshold.
    #[serde(rename = "K")]
    pub big_k: f64,
    pub threshold: f64,
    pub u_hi: f64,
    /// Grid extremes before inflation/deflation.
    pub k_grid: f64,
    pub kappa_1_grid: f64,
    #[serde(rename = "K_grid")]
    pub big_k_grid: f64,
}

/// Limit of u^{1+α} p_N(u) as u → ∞.
pub fn tail_limit(alpha: f64) -> Result<f64> {
    Ok(gamma_checked(1.0 + alpha)? * (PI * alpha / 2.0).sin() / PI)
}

/// Fits k, κ₁ and K on a logarithmic grid over [u_lo, u_hi]. The limits
/// at infinity are folded in so the constants also hold past u_hi.
pub fn fit_tail_constants(law: &StableLaw, u_lo: f64, u_hi: f64) -> Result<TailConstants> {
    if !(u_lo > 0.0 && u_hi > u_lo && u_hi.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < u_lo < u_hi, got [{u_lo}, {u_hi}]")));
    }
    let alpha = law.alpha();
    let ratio = (u_hi / u_lo).ln();
    let mut k_max: f64 = 0.0;
    let mut k_min = f64::INFINITY;
    let mut kappa: f64 = 0.0;
    for i in 0..FIT_POINTS {
        let u = u_lo * (ratio * i as f64 / (FIT_POINTS - 1) as f64).exp();
        let p = law.pdf(u)?;
        let dp = law.pdf_deriv(1, u)?;
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::Fit(format!("density underflows at u = {u}; lower the window")));
        }
        let prod = p * u.powf(1.0 + alpha);
        k_max = k_max.max(prod);
        k_min = k_min.min(prod);
        kappa = kappa.max(dp.abs() * u.powf(2.0 + alpha));
    }
    let c_inf = tail_limit(alpha)?;
    let k = UPPER_INFLATION * k_max.max(c_inf);
    let kappa_1 = UPPER_INFLATION * kappa.max((1.0 + alpha) * c_inf);
    let big_k = LOWER_DEFLATION * k_min.min(c_inf);
    Ok(TailConstants {
        alpha,
        k,
        kappa_1,
        big_k,
        threshold: u_lo,
        u_hi,
        k_grid: k_max,
        kappa_1_grid: kappa,
        big_k_grid: k_min,
    })
}

/// s_b(t) = A + B|t| for |t| ≤ t0, C p_N(t) beyond.
#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct EnvelopeSpec {
    pub alpha: f64,
    pub A: f64,
    pub B: f64,
    pub C: f64,
    pub t0: f64,
    pub window: DispersionWindow,
    pub tails: TailConstants,
    /// max_u p_N(u) = p_N(0).
    pub mode_height: f64,
}

impl EnvelopeSpec {
    pub fn eval(&self, law: &StableLaw, t: f64) -> Result<f64> {
        let at = t.abs();
        if at <= self.t0 {
            Ok(self.A + self.B * at)
        } else {
            Ok(self.C * law.pdf(at)?)
        }
    }

    fn constants(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("A".to_string(), self.A),
            ("B".to_string(), self.B),
            ("C".to_string(), self.C),
            ("t0".to_string(), self.t0),
            ("b".to_string(), self.window.b()),
            ("k".to_string(), self.tails.k),
            ("kappa_1".to_string(), self.tails.kappa_1),
            ("K".to_string(), self.tails.big_k),
            ("T".to_string(), self.tails.threshold),
        ])
    }
}

/// Builds s_b for the window. The tail constants are fitted from
/// T = t0/(2b)^{1/α} (or t0 when that is smaller), which covers every
/// u = t/η^{1/α} reached with |t| ≥ t0 and η in the window.
pub fn build_envelope(law: &StableLaw, window: DispersionWindow, t0: f64) -> Result<EnvelopeSpec> {
    let alpha = law.alpha();
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Parameter(format!("crossover must be positive, got {t0}")));
    }
    let b = window.b();
    let threshold = (t0 / (2.0 * b).powf(1.0 / alpha)).min(t0);
    if threshold < MIN_TAIL_THRESHOLD {
        return Err(Error::Parameter(format!(
            "crossover {t0} reaches into the core (tail threshold {threshold:.3} < {MIN_TAIL_THRESHOLD}); raise t0"
        )));
    }
    let u_hi = (1e3 * threshold).max(1e7);
    let tails = fit_tail_constants(law, threshold, u_hi)?;
    let mode_height = law.mode_height()?;
    let a = mode_height / (alpha * b.powf(1.0 + 1.0 / alpha));
    let bb = gamma_checked(2.0 / alpha)? / (PI * alpha * alpha * b.powf(1.0 + 2.0 / alpha));
    let c = (tails.k + tails.kappa_1) / (alpha * tails.big_k);
    Ok(EnvelopeSpec {
        alpha,
        A: a,
        B: bb,
        C: c,
        t0,
        window,
        tails,
        mode_height,
    })
}

/// Location of the tightest point on a certificate grid.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GridPoint {
    pub eta: f64,
    pub x: f64,
}

/// Outcome of a grid certificate. `slack_min` = 1 − max(value/bound).
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub bound_id: String,
    pub grid_spec: String,
    pub slack_min: f64,
    pub argmax_point: GridPoint,
    pub constants_used: BTreeMap<String, f64>,
    pub points_checked: usize,
    pub pass: bool,
}

impl CertificateReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Running maximum of value/bound ratios; first maximum wins on ties so
/// the reduction order is fixed.
#[derive(Debug)]
struct RatioMax {
    ratio: f64,
    at: GridPoint,
    count: usize,
}

impl RatioMax {
    fn new() -> Self {
        Self {
            ratio: f64::NEG_INFINITY,
            at: GridPoint {
                eta: f64::NAN,
                x: f64::NAN,
            },
            count: 0,
        }
    }

    fn push(&mut self, ratio: f64, eta: f64, x: f64) {
        self.count += 1;
        if ratio > self.ratio || ratio.is_nan() {
            self.ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
            self.at = GridPoint { eta, x };
        }
    }

    fn report(self, bound_id: &str, grid_spec: String, constants: BTreeMap<String, f64>) -> CertificateReport {
        CertificateReport {
            bound_id: bound_id.to_string(),
            grid_spec,
            slack_min: 1.0 - self.ratio,
            argmax_point: self.at,
            constants_used: constants,
            points_checked: self.count,
            pass: self.ratio <= 1.0 + CERT_RTOL,
        }
    }
}

/// Default t-grid: step 0.1 on [−200, 200] plus 40 log-spaced points per
/// side out to 10^4.
pub fn default_t_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (-2000..=2000).map(|i| i as f64 * 0.1).collect();
    for i in 1..=40 {
        let t = 200.0 * (50f64.ln() * i as f64 / 40.0).exp();
        g.push(t);
        g.push(-t);
    }
    g.sort_by(f64::total_cmp);
    g
}

fn describe_grid(name: &str, g: &[f64]) -> String {
    match (g.first(), g.last()) {
        (Some(a), Some(b)) => format!("{name}: {} points on [{a}, {b}]", g.len()),
        _ => format!("{name}: empty"),
    }
}

/// |d^n p_N/du^n| ≤ Γ((n+1)/α)/(πα) on a u-grid.
pub fn certify_global_deriv_bound(law: &StableLaw, n: u32, u_grid: &[f64]) -> Result<CertificateReport> {
    let bound = global_deriv_bound(law.alpha(), n)?;
    let mut acc = RatioMax::new();
    for &u in u_grid {
        acc.push(law.pdf_deriv(n, u)?.abs() / bound, 1.0, u);
    }
    let constants = BTreeMap::from([
        ("alpha".to_string(), law.alpha()),
        ("n".to_string(), n as f64),
        ("bound".to_string(), bound),
    ]);
    Ok(acc.report("global_deriv_bound", describe_grid("u", u_grid), constants))
}

/// |∂p_η(t)/∂η| ≤ s_b(t) for every (η, t) in the grid product.
pub fn certify_domination(
    law: &StableLaw,
    spec: &EnvelopeSpec,
    eta_grid: &[f64],
    t_grid: &[f64],
) -> Result<CertificateReport> {
    if let Some(&eta) = eta_grid.iter().find(|&&e| !spec.window.contains(e)) {
        return Err(Error::Parameter(format!(
            "dispersion {eta} is outside the window ({}, {})",
            spec.window.b(),
            2.0 * spec.window.b()
        )));
    }
    let envelope: Vec<f64> = t_grid.iter().map(|&t| spec.eval(law, t)).collect::<Result<_>>()?;
    let mut acc = RatioMax::new();
    for &eta in eta_grid {
        for (&t, &s) in t_grid.iter().zip(&envelope) {
            acc.push(law.dispersion_deriv(eta, t)?.abs() / s, eta, t);
        }
    }
    let grid = format!("{}; {}", describe_grid("eta", eta_grid), describe_grid("t", t_grid));
    Ok(acc.report("envelope_domination", grid, spec.constants()))
}

/// S_b = ∫ s_b and L_b = ∫ ln(1+|t|) s_b, split into core and tail parts.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeIntegrals {
    pub s_b: f64,
    pub l_b: f64,
    pub s_core: f64,
    pub s_tail: f64,
    pub l_core: f64,
    pub l_tail: f64,
}

pub fn envelope_integrals(law: &StableLaw, spec: &EnvelopeSpec) -> Result<EnvelopeIntegrals> {
    let (a, b, t0) = (spec.A, spec.B, spec.t0);
    let s_core = 2.0 * (a * t0 + b * t0 * t0 / 2.0);
    let s_tail = 2.0 * spec.C * law.tail_mass(t0)?;
    // ∫_0^t0 ln(1+t) dt and ∫_0^t0 t ln(1+t) dt in closed form
    let l1 = t0.ln_1p();
    let i0 = (1.0 + t0) * l1 - t0;
    let i1 = 0.5 * (t0 * t0 - 1.0) * l1 - 0.25 * t0 * t0 + 0.5 * t0;
    let l_core = 2.0 * (a * i0 + b * i1);
    let l_tail = 2.0 * spec.C * log_weighted_tail(law, t0)?;
    Ok(EnvelopeIntegrals {
        s_b: s_core + s_tail,
        l_b: l_core + l_tail,
        s_core,
        s_tail,
        l_core,
        l_tail,
    })
}

/// ∫_{t0}^∞ ln(1+t) p_N(t) dt, with t = t0 e^v and the remainder past the
/// window bounded by the fitted upper tail constant.
fn log_weighted_tail(law: &StableLaw, t0: f64) -> Result<f64> {
    let alpha = law.alpha();
    let c = UPPER_INFLATION * tail_limit(alpha)?.max(law.pdf(t0)? * t0.powf(1.0 + alpha));
    let tol = AdaptiveTol {
        abs: 1e-14,
        rel: 1e-12,
        max_panels: law.config().max_panels,
    };
    let mut v = 10.0;
    loop {
        let y = t0 * f64::exp(v);
        // ∫_y^∞ c t^{-1-α} ln(1+t) dt ≤ c y^{-α}(ln(2y)/α + 1/α²)
        let rem = c * y.powf(-alpha) * ((2.0 * y).ln() / alpha + 1.0 / (alpha * alpha));
        if rem < 1e-13 || v > 700.0 {
            break;
        }
        v += 10.0;
    }
    let breaks: Vec<f64> = (0..=(v as usize / 5)).map(|i| (5 * i) as f64).chain([v]).collect();
    let mut breaks = breaks;
    breaks.dedup();
    let part = quad::adaptive(&breaks, tol, |s| {
        let t = t0 * s.exp();
        t.ln_1p() * law.pdf(t).unwrap_or(f64::NAN) * t
    })?;
    Ok(part.value)
}

/// q_η(y) ≥ b K̃ |y|^{-1-α} on the grid, with
/// K̃ = K / (2·2^{1/α}·(1 + ỹ/y_min)^{1+α}) and y_min = 10 ỹ.
pub fn q_lower_bound_check(
    law: &StableLaw,
    window: DispersionWindow,
    source: &SourceDistribution,
    eta_grid: &[f64],
    y_grid: &[f64],
) -> Result<CertificateReport> {
    let alpha = law.alpha();
    let b = window.b();
    let y_med = source.median_radius();
    let y_min = 10.0 * y_med;
    let y_lo = y_grid.iter().fold(f64::INFINITY, |m, y| m.min(y.abs()));
    if y_grid.is_empty() || y_lo < y_min || y_lo <= 0.0 {
        return Err(Error::Parameter(format!(
            "y-grid must stay beyond 10·ỹ = {y_min} (smallest |y| is {y_lo})"
        )));
    }
    if let Some(&eta) = eta_grid.iter().find(|&&e| !window.contains(e)) {
        return Err(Error::Parameter(format!("dispersion {eta} is outside the window")));
    }
    let y_hi = y_grid.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    // u = (|y| + ỹ)/b^{1/α} spans the arguments used by the chain
    let u_lo = (y_lo + y_med) / b.powf(1.0 / alpha);
    let u_hi = ((y_hi + y_med) / b.powf(1.0 / alpha)).max(2.0 * u_lo);
    let tails = fit_tail_constants(law, u_lo, u_hi)?;
    let ratio_bound = (1.0 + y_med / y_min).powf(1.0 + alpha);
    let k_tilde = tails.big_k / (2.0 * 2f64.powf(1.0 / alpha) * ratio_bound);
    let median_mass = source.prob_abs_le(y_med);

    let mut acc = RatioMax::new();
    for &eta in eta_grid {
        let model = MixtureModel::with_law(law.clone(), eta, source.clone())?;
        for &y in y_grid {
            for y in [y, -y] {
                let q = model.pdf(y)?;
                let bound = b * k_tilde / y.abs().powf(1.0 + alpha);
                acc.push(bound / q, eta, y);
            }
        }
    }
    let mut constants = BTreeMap::from([
        ("b".to_string(), b),
        ("K".to_string(), tails.big_k),
        ("K_tilde".to_string(), k_tilde),
        ("y_median".to_string(), y_med),
        ("y_min".to_string(), y_min),
        ("median_mass".to_string(), median_mass),
    ]);
    constants.insert("u_lo".to_string(), u_lo);
    let grid = format!(
        "{}; {} (both signs)",
        describe_grid("eta", eta_grid),
        describe_grid("y", y_grid)
    );
    let mut report = acc.report("q_lower_bound", grid, constants);
    report.pass &= median_mass >= 0.5 - 1e-9;
    Ok(report)
}

/// ∫ ln(1+|y|) r_b(y) dy ≤ S_b·E[ln(1+|X|)] + L_b.
///
/// Parametric sources are replaced by their quadrature discretization,
/// which is itself a law in the log-moment class, so both sides still
/// refer to the same source.
pub fn log_integrability_check(
    law: &StableLaw,
    spec: &EnvelopeSpec,
    source: &SourceDistribution,
) -> Result<CertificateReport> {
    let atoms = match source.discrete_points() {
        Some(a) => a,
        None => source.nodes(None),
    };
    let discrete = SourceDistribution::atoms(atoms.clone())?;
    let lhs = weighted_r_b_integral(law, spec, &discrete, &atoms)?;
    let ints = envelope_integrals(law, spec)?;
    let log_moment = discrete.log_moment()?;
    let rhs = ints.s_b * log_moment + ints.l_b;
    let mut constants = spec.constants();
    constants.insert("S_b".to_string(), ints.s_b);
    constants.insert("L_b".to_string(), ints.l_b);
    constants.insert("log_moment".to_string(), log_moment);
    constants.insert("lhs".to_string(), lhs);
    constants.insert("rhs".to_string(), rhs);
    let mut acc = RatioMax::new();
    acc.push(lhs / rhs, f64::NAN, f64::NAN);
    let grid = format!("adaptive quadrature over y, {} source atoms", atoms.len());
    Ok(acc.report("log_integrability", grid, constants))
}

/// ∫ ln(1+|y|) r_b(y) dy with breakpoints at the kinks and jumps of the
/// integrand, and log-mapped tails.
fn weighted_r_b_integral(
    law: &StableLaw,
    spec: &EnvelopeSpec,
    source: &SourceDistribution,
    atoms: &[(f64, f64)],
) -> Result<f64> {
    let t0 = spec.t0;
    let reach = atoms.iter().fold(0.0f64, |m, (x, _)| m.max(x.abs())) + t0 + 1.0;
    let mut breaks = vec![-reach, 0.0, reach];
    for &(x, _) in atoms {
        breaks.extend([x - t0, x, x + t0]);
    }
    breaks.retain(|b| b.abs() <= reach);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let tol = AdaptiveTol {
        abs: 1e-10,
        rel: 1e-10,
        max_panels: law.config().max_panels,
    };
    let f = |y: f64| y.abs().ln_1p() * r_b_for_source(law, spec, source, y).unwrap_or(f64::NAN);
    let mut total = CompensatedSum::new();
    total.add(quad::adaptive(&breaks, tol, f)?.value);

    // past y = reach·e^v, |y − x| ≥ y/2 so r_b(y) ≤ C k 2^{1+α} y^{-1-α}
    let alpha = law.alpha();
    let mut v = 10.0;
    let mut rem;
    loop {
        let y = reach * f64::exp(v);
        rem = spec.C
            * spec.tails.k
            * 2f64.powf(1.0 + alpha)
            * y.powf(-alpha)
            * ((2.0 * y).ln() / alpha + 1.0 / (alpha * alpha));
        if rem < 1e-12 || v >= 700.0 {
            break;
        }
        v += 10.0;
    }
    total.add(2.0 * rem);
    let vb: Vec<f64> = (0..=(v as usize / 5)).map(|i| (5 * i) as f64).collect();
    for sign in [-1.0, 1.0] {
        let part = quad::adaptive(&vb, tol, |s| {
            let y = sign * reach * s.exp();
            f(y) * reach * s.exp()
        })?;
        total.add(part.value);
    }
    Ok(total.value())
}

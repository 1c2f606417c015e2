//! Y = X + η^{1/α} N: the mixture density q_η(y) = E[p_η(y − X)], its
//! dispersion derivative, the differential entropy h(Y), and two routes to
//! dh/dη (the integral −∫ ∂_η q · ln q and a finite difference of h).

use serde::Serialize;

use crate::bounds::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::quad::{self, AdaptiveTol, CompensatedSum, Partition};
use crate::source::{Hint, SourceDistribution};
use crate::stable::{QuadratureConfig, StableLaw, StableModel};

/// q below this is treated as zero inside −q ln q.
const Q_FLOOR: f64 = 1e-300;
/// Step of the tail-window search in log-radius.
const TAIL_STEP: f64 = 8.0;
const TAIL_MAX_LOG: f64 = 600.0;

/// Law of Y for a fixed dispersion.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    law: StableLaw,
    eta: f64,
    source: SourceDistribution,
}

/// h(Y) with its error budget.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub alpha: f64,
    pub eta: f64,
    /// Nats.
    pub h: f64,
    pub err_est: f64,
    /// Integration window [lo, hi]; beyond it only the tail bound counts.
    pub domain_used: (f64, f64),
    /// Bound on ∫ |q ln q| outside the window.
    pub tail_mass_bound: f64,
    /// ∫ q over the window, should be 1 up to the tail mass.
    pub mass: f64,
    pub log_moment: f64,
}

/// −∫ ∂_η q · ln q together with the mass-derivative integral ∫ ∂_η q.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub value: f64,
    pub err_est: f64,
    pub mass_derivative: f64,
    pub domain_used: (f64, f64),
    pub tail_bound: f64,
}

/// The two routes to J = dh/dη side by side.
#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct DeBruijnReport {
    pub alpha: f64,
    pub eta: f64,
    pub J_identity: f64,
    pub J_fd: f64,
    pub abs_diff: f64,
    pub fd_step: f64,
    pub mass_derivative: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Reusable integration mesh for h, so that nearby dispersions are
/// integrated on identical nodes.
#[derive(Debug, Clone)]
pub struct EntropyPlan {
    core: Partition,
    left: Partition,
    right: Partition,
    edge: f64,
    tail_bound: f64,
    domain: (f64, f64),
}

impl MixtureModel {
    /// Builds a tabulated stable law for α and wraps it.
    pub fn new(stable: StableModel, source: SourceDistribution, config: QuadratureConfig) -> Result<Self> {
        let law = StableLaw::tabulated(stable.alpha(), config)?;
        Self::with_law(law, stable.eta(), source)
    }

    /// Shares an existing law (and its table) across dispersions.
    pub fn with_law(law: StableLaw, eta: f64, source: SourceDistribution) -> Result<Self> {
        StableModel::new(law.alpha(), eta)?;
        Ok(Self { law, eta, source })
    }

    pub fn at_eta(&self, eta: f64) -> Result<Self> {
        Self::with_law(self.law.clone(), eta, self.source.clone())
    }

    pub fn law(&self) -> &StableLaw {
        &self.law
    }

    pub fn alpha(&self) -> f64 {
        self.law.alpha()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn source(&self) -> &SourceDistribution {
        &self.source
    }

    pub fn stable_model(&self) -> StableModel {
        StableModel::new(self.alpha(), self.eta).expect("validated at construction")
    }

    fn scale(&self) -> f64 {
        self.eta.powf(1.0 / self.alpha())
    }

    fn nodes_for(&self, y: f64) -> Vec<(f64, f64)> {
        self.source.nodes(Some(Hint {
            center: y,
            scale: self.scale(),
        }))
    }

    /// q_η(y) = E[p_η(y − X)].
    pub fn pdf(&self, y: f64) -> Result<f64> {
        Ok(self.pdf_and_deriv(y)?.0)
    }

    /// ∂q_η(y)/∂η = E[∂p_η(y − X)/∂η].
    pub fn pdf_dispersion_deriv(&self, y: f64) -> Result<f64> {
        Ok(self.pdf_and_deriv(y)?.1)
    }

    /// (q_η(y), ∂_η q_η(y)) in one pass over the source.
    pub fn pdf_and_deriv(&self, y: f64) -> Result<(f64, f64)> {
        let alpha = self.alpha();
        let s = self.scale();
        let inv = 1.0 / s;
        let dscale = -1.0 / (alpha * self.eta * s);
        let mut q = CompensatedSum::new();
        let mut dq = CompensatedSum::new();
        let mut add = |x: f64, w: f64| -> Result<()> {
            let u = (y - x) * inv;
            let p = self.law.pdf(u)?;
            let dp = self.law.pdf_deriv(1, u)?;
            q.add(w * p * inv);
            dq.add(w * (p + u * dp) * dscale);
            Ok(())
        };
        match &self.source {
            SourceDistribution::Atoms(a) => {
                for &(x, w) in a {
                    add(x, w)?;
                }
            }
            SourceDistribution::Sample(v) => {
                let w = 1.0 / v.len() as f64;
                for &x in v {
                    add(x, w)?;
                }
            }
            SourceDistribution::Parametric(_) => {
                for (x, w) in self.nodes_for(y) {
                    add(x, w)?;
                }
            }
        }
        Ok((q.value(), dq.value()))
    }

    /// r_b(y) = E[s_b(y − X)] for an envelope built on a window containing η.
    pub fn r_b(&self, spec: &EnvelopeSpec, y: f64) -> Result<f64> {
        if !spec.window.contains(self.eta) {
            return Err(Error::Parameter(format!(
                "dispersion {} lies outside the envelope window ({}, {})",
                self.eta,
                spec.window.b(),
                2.0 * spec.window.b()
            )));
        }
        r_b_for_source(&self.law, spec, &self.source, y)
    }

    fn core_breakpoints(&self) -> (f64, Vec<f64>) {
        let edge = self.source.support_radius() + 20.0 * self.scale().max(1.0);
        let mut pts = vec![-edge, edge];
        for p in self.source.feature_points() {
            if p.abs() < edge {
                pts.push(p);
            }
        }
        pts.push(0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        (edge, pts)
    }

    fn entropy_integrand(&self, y: f64) -> f64 {
        match self.pdf(y) {
            Ok(q) if q > Q_FLOOR => -q * q.ln(),
            Ok(_) => 0.0,
            Err(_) => f64::NAN,
        }
    }

    fn adaptive_tol(&self) -> AdaptiveTol {
        let cfg = self.law.config();
        AdaptiveTol {
            abs: 0.01 * cfg.abs_tol,
            rel: 1e-13,
            max_panels: cfg.max_panels,
        }
    }

    fn check_log_class(&self) -> Result<f64> {
        let lm = self.source.log_moment()?;
        if !lm.is_finite() {
            return Err(Error::NotInLogClass(lm));
        }
        Ok(lm)
    }

    /// Builds the window and mesh for h(Y).
    pub fn entropy_plan(&self) -> Result<EntropyPlan> {
        self.check_log_class()?;
        let tol = self.adaptive_tol();
        let (edge, breaks) = self.core_breakpoints();
        let core = quad::adaptive(&breaks, tol, |y| self.entropy_integrand(y))?;
        ensure_finite(&core)?;

        let tail_tol = 0.1 * self.law.config().abs_tol;
        let mut sides = Vec::with_capacity(2);
        let mut tail_bound = 0.0;
        for sign in [-1.0, 1.0] {
            let (vmax, bound) = self.tail_window(sign, edge, tail_tol, TailKind::Entropy)?;
            let part = quad::adaptive(&log_breaks(vmax), tol, |v| {
                let y = sign * edge * v.exp();
                self.entropy_integrand(y) * edge * v.exp()
            })?;
            ensure_finite(&part)?;
            tail_bound += bound;
            sides.push((part, vmax));
        }
        let (right, vr) = sides.pop().expect("two sides");
        let (left, vl) = sides.pop().expect("two sides");
        Ok(EntropyPlan {
            core,
            left,
            right,
            edge,
            tail_bound,
            domain: (-edge * vl.exp(), edge * vr.exp()),
        })
    }

    /// h(Y) = −∫ q ln q.
    pub fn entropy(&self) -> Result<EntropyReport> {
        let plan = self.entropy_plan()?;
        let mut report = self.entropy_on_plan(&plan)?;
        // renormalizing after clipping the source perturbs q by about
        // clipped_mass·q, hence h by about clipped_mass·(|h| + 1)
        let clip = self.source.clipped_mass() * (report.h.abs() + 1.0);
        report.err_est = plan.core.error + plan.left.error + plan.right.error + plan.tail_bound + clip;
        Ok(report)
    }

    /// h(Y) integrated on a mesh built for a (possibly different) dispersion.
    pub fn entropy_on_plan(&self, plan: &EntropyPlan) -> Result<EntropyReport> {
        let log_moment = self.check_log_class()?;
        let edge = plan.edge;
        let mut h = CompensatedSum::new();
        let mut mass = CompensatedSum::new();
        let mut pieces = |part: &Partition, map: &dyn Fn(f64) -> (f64, f64)| {
            for (x, w) in part.nodes() {
                let (y, jac) = map(x);
                let q = self.pdf(y).unwrap_or(f64::NAN);
                if q > Q_FLOOR {
                    h.add(-w * jac * q * q.ln());
                }
                mass.add(w * jac * q);
            }
        };
        pieces(&plan.core, &|y| (y, 1.0));
        pieces(&plan.left, &|v| (-edge * v.exp(), edge * v.exp()));
        pieces(&plan.right, &|v| (edge * v.exp(), edge * v.exp()));
        let h = h.value();
        if !h.is_finite() {
            return Err(Error::Convergence {
                panels: plan.core.edges.len(),
                estimate: f64::NAN,
            });
        }
        Ok(EntropyReport {
            alpha: self.alpha(),
            eta: self.eta,
            h,
            err_est: plan.tail_bound,
            domain_used: plan.domain,
            tail_mass_bound: plan.tail_bound,
            mass: mass.value(),
            log_moment,
        })
    }

    /// −∫ ∂_η q(y) ln q(y) dy, plus ∫ ∂_η q(y) dy which must vanish.
    pub fn entropy_dispersion_deriv_identity(&self) -> Result<IdentityReport> {
        self.check_log_class()?;
        let tol = self.adaptive_tol();
        let integrand = |y: f64| -> f64 {
            match self.pdf_and_deriv(y) {
                Ok((q, dq)) if q > Q_FLOOR => -dq * q.ln(),
                Ok(_) => 0.0,
                Err(_) => f64::NAN,
            }
        };
        let (edge, breaks) = self.core_breakpoints();
        let core = quad::adaptive(&breaks, tol, integrand)?;
        ensure_finite(&core)?;
        let mut value = CompensatedSum::new();
        value.add(core.value);
        let mut err = core.error;
        let mut mass_d = CompensatedSum::new();
        mass_d.add(core.integrate(|y| self.pdf_dispersion_deriv(y).unwrap_or(f64::NAN)));
        let tail_tol = 0.1 * self.law.config().abs_tol;
        let mut tail_bound = 0.0;
        let mut domain = (0.0, 0.0);
        for sign in [-1.0, 1.0] {
            let (vmax, bound) = self.tail_window(sign, edge, tail_tol, TailKind::Identity)?;
            let part = quad::adaptive(&log_breaks(vmax), tol, |v| {
                let y = sign * edge * v.exp();
                integrand(y) * edge * v.exp()
            })?;
            ensure_finite(&part)?;
            value.add(part.value);
            err += part.error;
            mass_d.add(part.integrate(|v| {
                let y = sign * edge * v.exp();
                self.pdf_dispersion_deriv(y).unwrap_or(f64::NAN) * edge * v.exp()
            }));
            tail_bound += bound;
            if sign < 0.0 {
                domain.0 = -edge * vmax.exp();
            } else {
                domain.1 = edge * vmax.exp();
            }
        }
        let value = value.value();
        Ok(IdentityReport {
            value,
            err_est: err + tail_bound + self.source.clipped_mass() * value.abs(),
            mass_derivative: mass_d.value(),
            domain_used: domain,
            tail_bound,
        })
    }

    /// J = dh/dη by the identity and by a Richardson-refined central
    /// difference of h with step 1e-4·η.
    pub fn fractional_fisher_j(&self) -> Result<DeBruijnReport> {
        let identity = self.entropy_dispersion_deriv_identity()?;
        let step = 1e-4 * self.eta;
        let plan = self.entropy_plan()?;
        let h_at = |eta: f64| -> Result<f64> { Ok(self.at_eta(eta)?.entropy_on_plan(&plan)?.h) };
        let d1 = (h_at(self.eta + step)? - h_at(self.eta - step)?) / (2.0 * step);
        let d2 = (h_at(self.eta + 2.0 * step)? - h_at(self.eta - 2.0 * step)?) / (4.0 * step);
        let j_fd = (4.0 * d1 - d2) / 3.0;
        let abs_diff = (identity.value - j_fd).abs();
        let tolerance = 1e-4f64.max(1e-3 * identity.value.abs());
        Ok(DeBruijnReport {
            alpha: self.alpha(),
            eta: self.eta,
            J_identity: identity.value,
            J_fd: j_fd,
            abs_diff,
            fd_step: step,
            mass_derivative: identity.mass_derivative,
            tolerance,
            pass: abs_diff <= tolerance,
        })
    }

    /// Finds how far (in log-radius past `edge`) to integrate so that a
    /// power-law tail envelope bounds the remainder below `tol`.
    fn tail_window(&self, sign: f64, edge: f64, tol: f64, kind: TailKind) -> Result<(f64, f64)> {
        let alpha = self.alpha();
        // q decays no slower than |y|^{-a_up}; no faster than |y|^{-(1+α)}
        let a_up = match self.source.tail_decay() {
            Some(d) => d.min(1.0 + alpha),
            None => 1.0 + alpha,
        };
        let a_lo = 1.0 + alpha;
        let mut v = TAIL_STEP;
        loop {
            let y0 = edge * v.exp();
            let mut k_up: f64 = 0.0;
            let mut k_lo = f64::INFINITY;
            let mut k_d: f64 = 0.0;
            for i in 0..=24 {
                let y = y0 * 10f64.powf(i as f64 / 4.0);
                let (q, dq) = self.pdf_and_deriv(sign * y)?;
                k_up = k_up.max(q * y.powf(a_up));
                k_lo = k_lo.min(q * y.powf(a_lo));
                k_d = k_d.max(dq.abs() * y.powf(a_up));
            }
            let k_up = 1.05 * k_up;
            let k_lo = 0.95 * k_lo;
            let k_d = 1.05 * k_d;
            if k_lo > 0.0 && k_lo.is_finite() {
                let konst = match kind {
                    TailKind::Entropy => k_up,
                    TailKind::Identity => k_d,
                };
                // ∫_Y^∞ K y^{-a} (a_lo ln y − ln k_lo) dy
                let a1 = a_up - 1.0;
                let ly = y0.ln();
                let p = y0.powf(-a1);
                let bound = konst * (a_lo * p * (ly / a1 + 1.0 / (a1 * a1)) - k_lo.ln() * p / a1);
                if bound.is_finite() && bound.abs() <= tol && k_up * y0.powf(-a_up) < (-1f64).exp() {
                    return Ok((v, bound.max(0.0)));
                }
            }
            v += TAIL_STEP;
            if v > TAIL_MAX_LOG {
                return Err(Error::Convergence {
                    panels: 0,
                    estimate: f64::INFINITY,
                });
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum TailKind {
    Entropy,
    Identity,
}

fn ensure_finite(p: &Partition) -> Result<()> {
    if p.value.is_finite() && p.error.is_finite() {
        Ok(())
    } else {
        Err(Error::Convergence {
            panels: p.edges.len(),
            estimate: p.error,
        })
    }
}

fn log_breaks(vmax: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut v = 1.0;
    while v < vmax {
        b.push(v);
        v += 4.0;
    }
    b.push(vmax);
    b
}

/// E[s_b(y − X)] for any source.
pub(crate) fn r_b_for_source(law: &StableLaw, spec: &EnvelopeSpec, source: &SourceDistribution, y: f64) -> Result<f64> {
    let err = std::cell::RefCell::new(None);
    let f = |x: f64| match spec.eval(law, y - x) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let hint = Some(Hint {
        center: y,
        scale: spec.t0,
    });
    let v = source.expect_with_hint(f, hint);
    match (v, err.into_inner()) {
        (_, Some(e)) => Err(e),
        (v, None) => v,
    }
}

#[cfg(test)]
mod tests;

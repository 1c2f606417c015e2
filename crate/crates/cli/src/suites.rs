//! One job = one (suite, α, η or b) combination producing one report.

use serde::Serialize;
use serde_json::{json, Value};
use stable_entropy::bounds::{
    build_envelope, certify_domination, certify_global_deriv_bound, default_t_grid, envelope_integrals,
    log_integrability_check, q_lower_bound_check, CertificateReport, DispersionWindow,
};
use stable_entropy::mixture::MixtureModel;
use stable_entropy::sampling::{mc_entropy, RngSeed};
use stable_entropy::source::SourceDistribution;
use stable_entropy::specfun::global_deriv_bound;
use stable_entropy::stable::{QuadratureConfig, StableLaw};
use stable_entropy::Result;

use crate::args::Command;

/// Second coordinate of a job: a dispersion, or a window endpoint.
#[derive(Debug, Clone, Copy)]
pub enum Level {
    Eta(f64),
    Window(f64),
}

impl Level {
    pub fn value(&self) -> f64 {
        match *self {
            Level::Eta(v) | Level::Window(v) => v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Job {
    pub alpha: f64,
    pub level: Level,
}

impl Job {
    pub fn stem(&self) -> String {
        format!("{:?}_{:?}", self.alpha, self.level.value())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub alpha: f64,
    pub eta: f64,
    pub y: Option<f64>,
    pub value: f64,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub pass: bool,
}

#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub rows: Vec<CsvRow>,
    /// Names of failed checks; empty when everything passed.
    pub failures: Vec<String>,
}

/// Everything a job needs besides its coordinates.
#[derive(Debug, Clone)]
pub struct Context {
    pub command: Command,
    pub config: QuadratureConfig,
    pub source: SourceDistribution,
    pub grid: Vec<f64>,
}

const CERT_RTOL: f64 = stable_entropy::bounds::CERT_RTOL;

pub fn run_job(ctx: &Context, job: &Job) -> Result<Outcome> {
    let common = ctx.command.common();
    let mut out = match ctx.command {
        Command::Pdf(_) => pdf(ctx, job)?,
        Command::Derivs(_) => derivs(ctx, job)?,
        Command::Bounds(_) => bounds(ctx, job, common.t0)?,
        Command::Entropy(_) => entropy(ctx, job)?,
        Command::Debruijn(_) => debruijn(ctx, job)?,
        Command::Mc(_) => mc(ctx, job, common.samples, common.seed)?,
        Command::CertifyAll(_) => certify_all(ctx, job, common.t0)?,
    };
    let level_key = match job.level {
        Level::Eta(_) => "eta",
        Level::Window(_) => "b",
    };
    let header = json!({
        "suite": ctx.command.suite(),
        "alpha": job.alpha,
        level_key: job.level.value(),
        "config": ctx.config,
        "source": ctx.source,
        "pass": out.failures.is_empty(),
        "failures": out.failures,
    });
    if let (Value::Object(mut h), Value::Object(body)) = (header, out.json.take()) {
        h.extend(body);
        out.json = Value::Object(h);
    }
    Ok(out)
}

fn pdf(ctx: &Context, job: &Job) -> Result<Outcome> {
    let law = StableLaw::tabulated(job.alpha, ctx.config)?;
    let eta = job.level.value();
    let bound = global_deriv_bound(job.alpha, 0)? * eta.powf(-1.0 / job.alpha);
    let mut rows = Vec::with_capacity(ctx.grid.len());
    for &y in &ctx.grid {
        let v = law.scaled_pdf(eta, y)?;
        rows.push(CsvRow {
            alpha: job.alpha,
            eta,
            y: Some(y),
            value: v,
            bound: Some(bound),
            slack: Some(1.0 - v / bound),
            pass: v <= bound * (1.0 + CERT_RTOL),
        });
    }
    let failures = failing_points("pdf_global_bound", &rows);
    Ok(Outcome {
        json: json!({ "bound_id": "global_deriv_bound", "bound": bound, "points": rows }),
        rows,
        failures,
    })
}

fn derivs(ctx: &Context, job: &Job) -> Result<Outcome> {
    let law = StableLaw::new(job.alpha, ctx.config)?;
    let eta = job.level.value();
    let s = eta.powf(1.0 / job.alpha);
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for n in 0..=stable_entropy::specfun::MAX_DERIV_ORDER {
        let scale = s.powi(-(n as i32) - 1);
        let bound = global_deriv_bound(job.alpha, n)? * scale;
        let mut pts = Vec::with_capacity(ctx.grid.len());
        for &y in &ctx.grid {
            let v = law.pdf_deriv(n, y / s)? * scale;
            pts.push(CsvRow {
                alpha: job.alpha,
                eta,
                y: Some(y),
                value: v,
                bound: Some(bound),
                slack: Some(1.0 - v.abs() / bound),
                pass: v.abs() <= bound * (1.0 + CERT_RTOL),
            });
        }
        orders.push(json!({ "order": n, "bound": bound, "points": pts }));
        rows.extend(pts);
    }
    let failures = failing_points("deriv_global_bound", &rows);
    Ok(Outcome {
        json: json!({ "bound_id": "global_deriv_bound", "orders": orders }),
        rows,
        failures,
    })
}

fn failing_points(id: &str, rows: &[CsvRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| !r.pass)
        .take(1)
        .map(|r| format!("{id} at y = {}", r.y.unwrap_or(f64::NAN)))
        .collect()
}

fn cert_row(job: &Job, c: &CertificateReport) -> CsvRow {
    CsvRow {
        alpha: job.alpha,
        eta: job.level.value(),
        y: None,
        value: 1.0 - c.slack_min,
        bound: Some(1.0),
        slack: Some(c.slack_min),
        pass: c.pass,
    }
}

/// Certificates for the window (b, 2b).
fn window_certificates(ctx: &Context, job: &Job, t0: f64) -> Result<(Value, Vec<CertificateReport>)> {
    let b = job.level.value();
    let law = StableLaw::tabulated(job.alpha, ctx.config)?;
    let direct = StableLaw::new(job.alpha, ctx.config)?;
    let window = DispersionWindow::new(b)?;
    let spec = build_envelope(&law, window, t0)?;
    let mut certs = Vec::new();
    let u_grid: Vec<f64> = (-2000..=2000).map(|i| i as f64 * 0.05).collect();
    for n in 0..=3 {
        certs.push(certify_global_deriv_bound(&direct, n, &u_grid)?);
    }
    certs.push(certify_domination(&law, &spec, &window.eta_grid(8), &default_t_grid())?);
    let y_lo = 10.0 * ctx.source.median_radius() + 10.0;
    let y_hi = (1e3f64).max(10.0 * y_lo);
    let y_grid: Vec<f64> = (0..50).map(|i| y_lo * (y_hi / y_lo).powf(i as f64 / 49.0)).collect();
    certs.push(q_lower_bound_check(
        &law,
        window,
        &ctx.source,
        &window.eta_grid(8),
        &y_grid,
    )?);
    certs.push(log_integrability_check(&law, &spec, &ctx.source)?);
    let integrals = envelope_integrals(&law, &spec)?;
    let json = json!({ "envelope": spec, "envelope_integrals": integrals });
    Ok((json, certs))
}

fn bounds(ctx: &Context, job: &Job, t0: f64) -> Result<Outcome> {
    let (mut json, certs) = window_certificates(ctx, job, t0)?;
    json["certificates"] = serde_json::to_value(&certs)?;
    Ok(Outcome {
        rows: certs.iter().map(|c| cert_row(job, c)).collect(),
        failures: certs.iter().filter(|c| !c.pass).map(|c| c.bound_id.clone()).collect(),
        json,
    })
}

fn model(ctx: &Context, job: &Job, eta: f64) -> Result<MixtureModel> {
    let law = StableLaw::tabulated(job.alpha, ctx.config)?;
    MixtureModel::with_law(law, eta, ctx.source.clone())
}

fn entropy(ctx: &Context, job: &Job) -> Result<Outcome> {
    let eta = job.level.value();
    let r = model(ctx, job, eta)?.entropy()?;
    let rows = vec![CsvRow {
        alpha: job.alpha,
        eta,
        y: None,
        value: r.h,
        bound: Some(r.err_est),
        slack: None,
        pass: true,
    }];
    Ok(Outcome {
        json: json!({ "entropy": r }),
        rows,
        failures: Vec::new(),
    })
}

const MASS_DERIVATIVE_TOL: f64 = 1e-6;

fn debruijn(ctx: &Context, job: &Job) -> Result<Outcome> {
    let eta = job.level.value();
    let r = model(ctx, job, eta)?.fractional_fisher_j()?;
    let mut failures = Vec::new();
    if !r.pass {
        failures.push("identity_vs_finite_difference".to_string());
    }
    if r.mass_derivative.abs() > MASS_DERIVATIVE_TOL {
        failures.push("mass_derivative".to_string());
    }
    let rows = vec![CsvRow {
        alpha: job.alpha,
        eta,
        y: None,
        value: r.J_identity,
        bound: Some(r.tolerance),
        slack: Some(1.0 - r.abs_diff / r.tolerance),
        pass: failures.is_empty(),
    }];
    Ok(Outcome {
        json: json!({ "debruijn": r }),
        rows,
        failures,
    })
}

fn mc(ctx: &Context, job: &Job, samples: usize, seed: u64) -> Result<Outcome> {
    let eta = job.level.value();
    let m = model(ctx, job, eta)?;
    let e = m.entropy()?;
    let est = mc_entropy(&m, samples, RngSeed(seed))?;
    let z = (est.estimate - e.h).abs() / est.stderr.hypot(e.err_est);
    let pass = z <= 3.0;
    let rows = vec![CsvRow {
        alpha: job.alpha,
        eta,
        y: None,
        value: est.estimate,
        bound: Some(e.h),
        slack: Some(1.0 - z / 3.0),
        pass,
    }];
    Ok(Outcome {
        json: json!({ "monte_carlo": est, "entropy": e, "z_score": z }),
        rows,
        failures: if pass {
            Vec::new()
        } else {
            vec!["monte_carlo_agreement".to_string()]
        },
    })
}

/// Window certificates, then the derivative checks at dispersions inside
/// the window.
fn certify_all(ctx: &Context, job: &Job, t0: f64) -> Result<Outcome> {
    let (mut json, certs) = window_certificates(ctx, job, t0)?;
    let mut rows: Vec<CsvRow> = certs.iter().map(|c| cert_row(job, c)).collect();
    let mut failures: Vec<String> = certs.iter().filter(|c| !c.pass).map(|c| c.bound_id.clone()).collect();

    let b = job.level.value();
    let window = DispersionWindow::new(b)?;
    let mut interchange_worst: f64 = 0.0;
    let y_grid: Vec<f64> = (-10..=10).map(|i| i as f64).collect();
    for eta in window.eta_grid(4) {
        let m = model(ctx, job, eta)?;
        let h = 1e-5 * eta;
        let (up, dn) = (m.at_eta(eta + h)?, m.at_eta(eta - h)?);
        for &y in &y_grid {
            let d = m.pdf_dispersion_deriv(y)?;
            let fd = (up.pdf(y)? - dn.pdf(y)?) / (2.0 * h);
            interchange_worst = interchange_worst.max((d - fd).abs() / 1e-8f64.max(1e-5 * d.abs()));
        }
    }
    if interchange_worst > 1.0 {
        failures.push("derivative_interchange".to_string());
    }
    let mid = 1.5 * b;
    let dj = model(ctx, job, mid)?.fractional_fisher_j()?;
    if !dj.pass {
        failures.push("identity_vs_finite_difference".to_string());
    }
    if dj.mass_derivative.abs() > MASS_DERIVATIVE_TOL {
        failures.push("mass_derivative".to_string());
    }
    rows.push(CsvRow {
        alpha: job.alpha,
        eta: mid,
        y: None,
        value: dj.J_identity,
        bound: Some(dj.tolerance),
        slack: Some(1.0 - dj.abs_diff / dj.tolerance),
        pass: dj.pass,
    });
    json["certificates"] = serde_json::to_value(&certs)?;
    json["interchange_worst_ratio"] = json!(interchange_worst);
    json["debruijn"] = serde_json::to_value(&dj)?;
    Ok(Outcome { json, rows, failures })
}

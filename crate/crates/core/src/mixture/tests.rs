use std::f64::consts::PI;

use super::*;
use crate::bounds::{build_envelope, DispersionWindow};

fn cauchy_law() -> StableLaw {
    StableLaw::tabulated(1.0, QuadratureConfig::default()).unwrap()
}

fn two_atoms() -> SourceDistribution {
    SourceDistribution::atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

#[test]
fn degenerate_source_reduces_to_stable_density() {
    let law = StableLaw::tabulated(0.8, QuadratureConfig::default()).unwrap();
    let m = MixtureModel::with_law(law.clone(), 1.7, SourceDistribution::point(0.0).unwrap()).unwrap();
    for &y in &[-30.0, -1.0, 0.0, 0.4, 12.0] {
        assert!((m.pdf(y).unwrap() - law.scaled_pdf(1.7, y).unwrap()).abs() < 1e-15);
        assert!((m.pdf_dispersion_deriv(y).unwrap() - law.dispersion_deriv(1.7, y).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn two_atom_cauchy_closed_forms() {
    let m = MixtureModel::with_law(cauchy_law(), 1.0, two_atoms()).unwrap();
    assert!((m.pdf(0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    // (1 − η²)/(π(η² + 1)²) vanishes at η = 1
    assert!(m.pdf_dispersion_deriv(0.0).unwrap().abs() < 1e-15);
    let m = m.at_eta(0.5).unwrap();
    let exact = (1.0 - 0.25) / (PI * 1.25f64.powi(2));
    assert!((m.pdf_dispersion_deriv(0.0).unwrap() - exact).abs() < 1e-14);
}

#[test]
fn derivative_matches_finite_difference() {
    let sources = [
        two_atoms(),
        SourceDistribution::gaussian(0.0, 1.0).unwrap(),
        SourceDistribution::sample(vec![-3.0, 0.1, 0.5, 8.0]).unwrap(),
    ];
    for alpha in [0.8, 1.5] {
        let law = StableLaw::tabulated(alpha, QuadratureConfig::default()).unwrap();
        for src in &sources {
            for eta in [0.5, 2.0] {
                let m = MixtureModel::with_law(law.clone(), eta, src.clone()).unwrap();
                let h = 1e-5 * eta;
                for &y in &[-7.0, 0.0, 0.3, 2.5, 40.0] {
                    let d = m.pdf_dispersion_deriv(y).unwrap();
                    let fd = (m.at_eta(eta + h).unwrap().pdf(y).unwrap() - m.at_eta(eta - h).unwrap().pdf(y).unwrap())
                        / (2.0 * h);
                    assert!(
                        (d - fd).abs() <= 1e-8f64.max(1e-5 * d.abs()),
                        "α={alpha} η={eta} y={y}: {d} vs {fd}"
                    );
                }
            }
        }
    }
}

#[test]
fn cauchy_entropy_and_derivative() {
    for gamma in [0.5, 2.0] {
        let m = MixtureModel::with_law(cauchy_law(), gamma, SourceDistribution::point(0.0).unwrap()).unwrap();
        let e = m.entropy().unwrap();
        assert!((e.h - (4.0 * PI * gamma).ln()).abs() < 1e-9, "{e:?}");
        assert!(e.err_est >= 0.0 && e.err_est < 1e-8);
        let j = m.fractional_fisher_j().unwrap();
        assert!((j.J_identity - 1.0 / gamma).abs() < 1e-8);
        assert!((j.J_fd - 1.0 / gamma).abs() < 1e-6);
        assert!(j.mass_derivative.abs() < 1e-10);
        assert!(j.pass);
    }
}

#[test]
fn stable_scaling_of_entropy() {
    // h(η^{1/α} N) = h(N) + ln(η)/α
    let law = StableLaw::tabulated(1.5, QuadratureConfig::default()).unwrap();
    let src = SourceDistribution::point(0.0).unwrap();
    let h1 = MixtureModel::with_law(law.clone(), 1.0, src.clone())
        .unwrap()
        .entropy()
        .unwrap()
        .h;
    let h3 = MixtureModel::with_law(law, 3.0, src).unwrap().entropy().unwrap().h;
    assert!((h3 - h1 - 3f64.ln() / 1.5).abs() < 1e-9);
}

#[test]
fn entropy_is_translation_invariant() {
    let law = StableLaw::tabulated(0.8, QuadratureConfig::default()).unwrap();
    let a = MixtureModel::with_law(law.clone(), 1.0, SourceDistribution::point(0.0).unwrap()).unwrap();
    let b = MixtureModel::with_law(law, 1.0, SourceDistribution::point(5.0).unwrap()).unwrap();
    assert!((a.entropy().unwrap().h - b.entropy().unwrap().h).abs() < 2e-8);
    let ja = a.fractional_fisher_j().unwrap().J_identity;
    let jb = b.fractional_fisher_j().unwrap().J_identity;
    assert!((ja - jb).abs() < 1e-8);
}

#[test]
fn mixing_does_not_lower_entropy() {
    for alpha in [0.8, 1.0, 1.5] {
        let law = StableLaw::tabulated(alpha, QuadratureConfig::default()).unwrap();
        let pure = MixtureModel::with_law(law.clone(), 1.0, SourceDistribution::point(0.0).unwrap()).unwrap();
        let mixed = MixtureModel::with_law(law, 1.0, two_atoms()).unwrap();
        assert!(mixed.entropy().unwrap().h >= pure.entropy().unwrap().h - 2e-6);
    }
}

#[test]
fn halving_tolerance_stays_within_error_estimate() {
    let cfg = QuadratureConfig::default();
    let law = StableLaw::tabulated(1.5, cfg).unwrap();
    let m = MixtureModel::with_law(law, 1.0, two_atoms()).unwrap();
    let coarse = m.entropy().unwrap();
    let fine_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol / 2.0,
        ..cfg
    };
    let fine_law = StableLaw::tabulated(1.5, fine_cfg).unwrap();
    let fine = MixtureModel::with_law(fine_law, 1.0, two_atoms())
        .unwrap()
        .entropy()
        .unwrap();
    assert!(
        (coarse.h - fine.h).abs() < coarse.err_est,
        "{} vs {} (err {})",
        coarse.h,
        fine.h,
        coarse.err_est
    );
}

#[test]
fn r_b_reduces_to_envelope_and_bounds_derivative() {
    let law = cauchy_law();
    let spec = build_envelope(&law, DispersionWindow::new(0.5).unwrap(), 50.0).unwrap();
    let atom = MixtureModel::with_law(law.clone(), 0.7, SourceDistribution::point(0.0).unwrap()).unwrap();
    for &y in &[0.0, 3.0, -49.0, 120.0] {
        assert!((atom.r_b(&spec, y).unwrap() - spec.eval(&law, y).unwrap()).abs() < 1e-15);
    }
    let m = MixtureModel::with_law(law, 0.7, two_atoms()).unwrap();
    for &y in &[0.0, 0.9, 5.0, 60.0, 400.0] {
        let r = m.r_b(&spec, y).unwrap();
        assert!((r - m.r_b(&spec, -y).unwrap()).abs() < 1e-14 * r);
        assert!(m.pdf_dispersion_deriv(y).unwrap().abs() <= r);
    }
    let outside = m.at_eta(1.5).unwrap();
    assert!(matches!(outside.r_b(&spec, 0.0), Err(Error::Parameter(_))));
}

#[test]
fn report_serializes() {
    let m = MixtureModel::with_law(cauchy_law(), 1.0, two_atoms()).unwrap();
    let json = serde_json::to_value(m.fractional_fisher_j().unwrap()).unwrap();
    for key in ["J_identity", "J_fd", "abs_diff", "fd_step"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn cauchy_source_in_cauchy_noise() {
    // Y is Cauchy with scale γ + η
    let src = SourceDistribution::cauchy(0.0, 1.0).unwrap();
    let m = MixtureModel::with_law(cauchy_law(), 1.0, src).unwrap();
    let e = m.entropy().unwrap();
    let exact = (8.0 * PI).ln();
    assert!((e.h - exact).abs() <= e.err_est, "{} vs {exact} (err {})", e.h, e.err_est);
    let far = m.pdf(1e12).unwrap();
    assert!((far * PI * (4.0 + 1e24) / 2.0 - 1.0).abs() < 1e-6);
}

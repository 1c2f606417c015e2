// tabulated reference values are written out in decimal
#![allow(clippy::approx_constant)]

use super::*;
use proptest::prelude::*;

const ALPHAS: [f64; 6] = [0.5, 0.8, 1.0, 1.2, 1.5, 1.9];

fn law(alpha: f64) -> StableLaw {
    StableLaw::new(alpha, QuadratureConfig::default()).unwrap()
}

#[test]
fn cauchy_values() {
    let l = law(1.0);
    assert!((l.pdf(0.0).unwrap() - 0.318_309_886_2).abs() < 1e-10);
    assert!((l.pdf(1.0).unwrap() - 0.159_154_943_1).abs() < 1e-10);
    assert_eq!(l.pdf_deriv(1, 0.0).unwrap(), 0.0);
    assert!((l.pdf_deriv(1, 1.0).unwrap() + 0.159_154_943_1).abs() < 1e-10);
    assert!((l.scaled_pdf(2.0, 0.0).unwrap() - 0.159_154_943_1).abs() < 1e-10);
    assert!((l.dispersion_deriv(1.0, 0.0).unwrap() + 0.318_309_886_2).abs() < 1e-10);
}

#[test]
fn symmetric_and_order_zero_reduction() {
    let l = law(0.8);
    assert_eq!(l.pdf(2.5).unwrap(), l.pdf(-2.5).unwrap());
    let l = law(1.5);
    assert_eq!(l.pdf_deriv(0, 0.7).unwrap(), l.pdf(0.7).unwrap());
}

#[test]
fn series_and_quadrature_agree_at_switch() {
    for &alpha in &ALPHAS {
        if alpha == 1.0 {
            continue;
        }
        let l = law(alpha);
        let r = l.tail_radius();
        for n in 0..=4 {
            for &x in &[r, 1.2 * r] {
                let q = fourier::fourier_deriv(alpha, n, x, l.config()).unwrap().value;
                let s = series::series_deriv(alpha, n, x).value;
                assert!(
                    (q - s).abs() <= 1e-14 + 1e-10 * s.abs(),
                    "alpha={alpha} n={n} x={x}: {q} vs {s}"
                );
            }
        }
    }
}

#[test]
fn table_matches_direct_evaluation() {
    for &alpha in &[0.5, 0.8, 1.2, 1.5, 1.9] {
        let direct = law(alpha);
        let tab = StableLaw::tabulated(alpha, QuadratureConfig::default()).unwrap();
        let r = tab.tail_radius();
        for i in 0..=97 {
            let u = r * (i as f64 / 97.0).powi(2);
            for n in 0..=1 {
                let a = direct.pdf_deriv(n, u).unwrap();
                let b = tab.pdf_deriv(n, u).unwrap();
                assert!((a - b).abs() < 1e-13, "alpha={alpha} n={n} u={u}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn dispersion_derivative_matches_finite_difference() {
    for &alpha in &[0.8, 1.0, 1.5] {
        let l = StableLaw::tabulated(alpha, QuadratureConfig::default()).unwrap();
        for &eta in &[0.5, 1.0, 2.0] {
            for &t in &[-30.0, -2.0, -0.3, 0.0, 0.6, 1.7, 4.0, 12.0, 80.0] {
                let h = 1e-5 * eta;
                let fd = (l.scaled_pdf(eta + h, t).unwrap() - l.scaled_pdf(eta - h, t).unwrap()) / (2.0 * h);
                let d = l.dispersion_deriv(eta, t).unwrap();
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs() + 1e-10,
                    "alpha={alpha} eta={eta} t={t}: fd {fd} vs {d}"
                );
                assert!((l.dispersion_deriv(eta, -t).unwrap() - d).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn cauchy_mode_derivative_matches_closed_form() {
    // p_η(0) = 1/(πη) at α = 1, so ∂/∂η = −1/(πη²)
    let l = law(1.0);
    for &eta in &[0.5, 1.0, 3.0] {
        let d = l.dispersion_deriv(eta, 0.0).unwrap();
        assert!((d + 1.0 / (PI * eta * eta)).abs() < 1e-14);
    }
}

#[test]
fn unimodal_on_grid() {
    for &alpha in &ALPHAS {
        let l = law(alpha);
        let mut prev = l.pdf(0.0).unwrap();
        for i in 1..=2000 {
            let u = i as f64 * 0.05;
            let v = l.pdf(u).unwrap();
            assert!(v <= prev + 1e-10, "alpha={alpha} u={u}");
            prev = v;
        }
    }
}

#[test]
fn mass_is_one() {
    for &alpha in &ALPHAS {
        let m = law(alpha).total_mass().unwrap();
        assert!((m - 1.0).abs() < 1e-6, "alpha={alpha}: mass {m}");
    }
}

#[test]
fn tail_mass_halving() {
    let l = law(1.0);
    assert!((l.tail_mass(1.0).unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn tail_slopes() {
    for &(alpha, n, want) in &[(1.0, 0u32, -2.0), (1.0, 1, -3.0), (0.5, 0, -1.5)] {
        let r = tail_asymptote(&law(alpha), n, 50.0, 500.0).unwrap();
        assert!((r.slope - want).abs() < 0.05, "alpha={alpha} n={n}: {}", r.slope);
    }
}

#[test]
fn invalid_inputs() {
    assert!(StableModel::new(2.0, 1.0).is_err());
    assert!(StableModel::new(0.0, 1.0).is_err());
    assert!(StableModel::new(1.0, 0.0).is_err());
    assert!(law(1.2).pdf_deriv(5, 0.0).is_err());
    assert!(law(1.2).pdf(f64::NAN).is_err());
    let cfg = QuadratureConfig {
        max_panels: 8,
        ..Default::default()
    };
    assert!(StableLaw::new(1.2, cfg).is_err());
    assert!(tail_asymptote(&law(1.0), 3, 50.0, 500.0).is_err());
    assert!(tail_asymptote(&law(1.0), 0, 500.0, 50.0).is_err());
}

#[test]
fn underflowing_window_is_a_fit_error() {
    let r = tail_asymptote(&law(0.5), 0, 1e250, 1e300);
    assert!(matches!(r, Err(Error::Fit(_))));
}

#[test]
fn panel_cap_yields_convergence_error() {
    let cfg = QuadratureConfig {
        max_panels: 16,
        tail_switch_radius: Some(1e6),
        ..Default::default()
    };
    let l = StableLaw::new(0.5, cfg).unwrap();
    assert!(matches!(l.pdf(500.0), Err(Error::Convergence { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity(alpha in 0.3f64..1.95, n in 0u32..=4, u in 0.0f64..40.0) {
        let l = law(alpha);
        let a = l.pdf_deriv(n, u).unwrap();
        let b = l.pdf_deriv(n, -u).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-10);
    }

    #[test]
    fn scaling_composes(alpha in 0.4f64..1.9, eta in 0.1f64..5.0, t in -50.0f64..50.0) {
        let l = law(alpha);
        let s = eta.powf(-1.0 / alpha);
        let lhs = l.scaled_pdf(eta, t).unwrap();
        let rhs = l.scaled_pdf(1.0, t * s).unwrap() * s;
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn derivatives_within_global_bound(alpha in 0.4f64..1.95, n in 0u32..=3, u in -60.0f64..60.0) {
        let l = law(alpha);
        let v = l.pdf_deriv(n, u).unwrap().abs();
        prop_assert!(v <= deriv_bound(alpha, n).unwrap() * (1.0 + 1e-9));
    }
}

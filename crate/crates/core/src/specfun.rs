//! Real gamma function and the derivative bound built on it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument accepted by [`gamma`]; Γ(171.6) overflows, and nothing
/// upstream needs more than Γ(5/α) with α bounded away from zero.
pub const GAMMA_ARG_MAX: f64 = 60.0;

/// Highest derivative order supported by the density evaluators.
pub const MAX_DERIV_ORDER: u32 = 4;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// A validated argument of the gamma function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GammaArg(f64);

impl GammaArg {
    pub fn new(x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("gamma argument must be positive, got {x}")));
        }
        if x > GAMMA_ARG_MAX {
            return Err(Error::Domain(format!(
                "gamma argument {x} exceeds supported maximum {GAMMA_ARG_MAX}"
            )));
        }
        Ok(Self(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Γ(x) on (0, 60] by the Lanczos approximation (g = 7, nine terms).
pub fn gamma(x: GammaArg) -> f64 {
    let x = x.0;
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series on its accurate range.
        return lanczos(x + 1.0) / x;
    }
    lanczos(x)
}

/// Convenience wrapper that validates the argument.
pub fn gamma_checked(x: f64) -> Result<f64> {
    GammaArg::new(x).map(gamma)
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * acc * ((z + 0.5) * t.ln() - t).exp()
}

/// ln Γ(x) for x > 0 without an upper cap; used for series coefficients
/// whose gamma values overflow but whose ratios do not.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return ln_lanczos(x + 1.0) - x.ln();
    }
    ln_lanczos(x)
}

fn ln_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + acc.ln() + (z + 0.5) * t.ln() - t
}

/// Γ((n + 1)/α) / (π α): the uniform bound on |d^n p_N / du^n| for the
/// standard symmetric stable law.
pub fn global_deriv_bound(alpha: f64, n: u32) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    if n > MAX_DERIV_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {n} exceeds supported maximum {MAX_DERIV_ORDER}"
        )));
    }
    let g = gamma_checked((n as f64 + 1.0) / alpha)?;
    Ok(g / (PI * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: shift the argument up by 30 through the product
    /// x(x+1)...(x+29), then use the Stirling series for ln Γ.
    fn gamma_oracle(x: f64) -> f64 {
        const SHIFT: usize = 30;
        let mut prod = 1.0f64;
        let mut z = x;
        for _ in 0..SHIFT {
            prod *= z;
            z += 1.0;
        }
        // Bernoulli-number coefficients B_{2k} / (2k (2k-1)).
        let coef = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360_360.0,
            1.0 / 156.0,
            -3617.0 / 122_400.0,
        ];
        let mut series = 0.0;
        let z2 = z * z;
        let mut zp = z;
        for c in coef {
            series += c / zp;
            zp *= z2;
        }
        let ln_g = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
        (ln_g - prod.ln()).exp()
    }

    #[test]
    fn small_integers_and_half() {
        assert!((gamma(GammaArg::new(1.0).unwrap()) - 1.0).abs() < 1e-14);
        assert!((gamma(GammaArg::new(5.0).unwrap()) - 24.0).abs() < 1e-12);
        let half = gamma(GammaArg::new(0.5).unwrap());
        assert!((half - PI.sqrt()).abs() < 1e-13);
        assert!((half - 1.772_453_850_9).abs() < 1e-10);
    }

    #[test]
    fn matches_oracle_on_range() {
        let mut x = 0.01;
        while x <= GAMMA_ARG_MAX {
            let g = gamma(GammaArg::new(x).unwrap());
            let o = gamma_oracle(x);
            assert!(((g - o) / o).abs() <= 1e-12, "x = {x}: {g} vs {o}");
            x += 0.037;
        }
        let g = gamma(GammaArg::new(60.0).unwrap());
        let o = gamma_oracle(60.0);
        assert!(((g - o) / o).abs() <= 1e-12);
    }

    #[test]
    fn recurrence() {
        for i in 1..=100 {
            let x = i as f64 * 0.1;
            let g1 = gamma(GammaArg::new(x + 1.0).unwrap());
            let g0 = gamma(GammaArg::new(x).unwrap());
            assert!((g1 - x * g0).abs() <= 1e-10 * g1, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_consistent() {
        for i in 1..200 {
            let x = i as f64 * 0.29;
            let direct = gamma_oracle(x).ln();
            assert!((ln_gamma(x) - direct).abs() < 1e-12 * direct.abs().max(1.0), "x = {x}");
        }
        // Stirling check far beyond the gamma cap.
        let x = 400.0f64;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x);
        assert!((ln_gamma(x) - stirling).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(GammaArg::new(0.0).is_err());
        assert!(GammaArg::new(-1.5).is_err());
        assert!(GammaArg::new(f64::NAN).is_err());
        assert!(GammaArg::new(60.5).is_err());
        assert!(global_deriv_bound(0.5, 5).is_err());
        assert!(global_deriv_bound(2.0, 0).is_err());
        assert!(global_deriv_bound(0.01, 0).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn deriv_bound_values() {
        let b = global_deriv_bound(1.0, 0).unwrap();
        assert!((b - 1.0 / PI).abs() < 1e-15);
        assert!((b - 0.318_309_886_2).abs() < 1e-10);
        assert!((global_deriv_bound(1.0, 1).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((global_deriv_bound(0.5, 0).unwrap() - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn deriv_bound_nonincreasing_in_alpha_right_of_minimizer() {
        for n in 0..=3u32 {
            let alphas: Vec<f64> = (3..=19).map(|i| i as f64 * 0.1).collect();
            for w in alphas.windows(2) {
                let (a0, a1) = (w[0], w[1]);
                // both arguments must sit right of Γ's minimizer
                if (n as f64 + 1.0) / a1 <= 1.4616 {
                    continue;
                }
                let b0 = global_deriv_bound(a0, n).unwrap();
                let b1 = global_deriv_bound(a1, n).unwrap();
                assert!(b1 <= b0, "n = {n}, alpha {a0} -> {a1}: {b0} -> {b1}");
            }
        }
    }
}

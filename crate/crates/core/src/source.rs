//! Laws for the source X: finite atoms, empirical samples, and a few
//! parametric families, all with finite log-moment E[ln(1 + |X|)].
//!
//! JSON form:
//!
//! ```json
//! {"kind": "atoms", "atoms": [[-1.0, 0.5], [1.0, 0.5]]}
//! {"kind": "sample", "values": [0.3, -1.2, 4.0]}
//! {"kind": "parametric", "name": "cauchy", "params": {"x0": 0.0, "gamma": 1.0}}
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quad::{CompensatedSum, GaussLegendre};

/// Probability mass left outside the integration range of a parametric law,
/// per side.
pub const CLIP_QUANTILE: f64 = 1e-10;
/// Standard normal quantile at 1 − [`CLIP_QUANTILE`].
const GAUSS_CLIP_Z: f64 = 6.361_340_902_404_056;
const PANEL_ORDER: usize = 16;
/// Smallest panel next to a grading center, relative to its scale.
const GRADING_FLOOR: f64 = 1e-6;
/// Floor for the median radius of a degenerate law.
pub const MEDIAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "lowercase")]
pub enum ParametricLaw {
    Gaussian { mu: f64, sigma: f64 },
    Cauchy { x0: f64, gamma: f64 },
    Uniform { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SourceJson {
    Atoms { atoms: Vec<(f64, f64)> },
    Sample { values: Vec<f64> },
    Parametric(ParametricLaw),
}

/// The law of X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceJson", into = "SourceJson")]
pub enum SourceDistribution {
    /// (location, weight) pairs, weights summing to one.
    Atoms(Vec<(f64, f64)>),
    /// Empirical measure with equal weights.
    Sample(Vec<f64>),
    Parametric(ParametricLaw),
}

impl TryFrom<SourceJson> for SourceDistribution {
    type Error = Error;

    fn try_from(j: SourceJson) -> Result<Self> {
        match j {
            SourceJson::Atoms { atoms } => Self::atoms(atoms),
            SourceJson::Sample { values } => Self::sample(values),
            SourceJson::Parametric(p) => Self::parametric(p),
        }
    }
}

impl From<SourceDistribution> for SourceJson {
    fn from(s: SourceDistribution) -> Self {
        match s {
            SourceDistribution::Atoms(atoms) => SourceJson::Atoms { atoms },
            SourceDistribution::Sample(values) => SourceJson::Sample { values },
            SourceDistribution::Parametric(p) => SourceJson::Parametric(p),
        }
    }
}

/// A point where the integrand of an expectation loses smoothness, with
/// the length scale over which it varies there.
#[derive(Debug, Clone, Copy)]
pub struct Hint {
    pub center: f64,
    pub scale: f64,
}

impl SourceDistribution {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Source("atom list is empty".into()));
        }
        if atoms
            .iter()
            .any(|(x, w)| !x.is_finite() || !(*w > 0.0) || !w.is_finite())
        {
            return Err(Error::Source("atoms need finite locations and positive weights".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Source(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self::Atoms(atoms))
    }

    /// Unit mass at `x`.
    pub fn point(x: f64) -> Result<Self> {
        Self::atoms(vec![(x, 1.0)])
    }

    pub fn sample(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Source("sample is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Source("sample values must be finite".into()));
        }
        Ok(Self::Sample(values))
    }

    pub fn parametric(law: ParametricLaw) -> Result<Self> {
        let ok = match law {
            ParametricLaw::Gaussian { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            ParametricLaw::Cauchy { x0, gamma } => x0.is_finite() && gamma > 0.0 && gamma.is_finite(),
            ParametricLaw::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
        };
        if !ok {
            return Err(Error::Source(format!("parameters out of domain: {law:?}")));
        }
        Ok(Self::Parametric(law))
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Self::parametric(ParametricLaw::Gaussian { mu, sigma })
    }

    pub fn cauchy(x0: f64, gamma: f64) -> Result<Self> {
        Self::parametric(ParametricLaw::Cauchy { x0, gamma })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::parametric(ParametricLaw::Uniform { a, b })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Finite support as (location, weight) pairs; `None` for parametric laws.
    pub fn discrete_points(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Atoms(a) => Some(a.clone()),
            Self::Sample(v) => {
                let w = 1.0 / v.len() as f64;
                Some(v.iter().map(|&x| (x, w)).collect())
            }
            Self::Parametric(_) => None,
        }
    }

    /// The law of X + c.
    pub fn shifted(&self, c: f64) -> Self {
        match self {
            Self::Atoms(a) => Self::Atoms(a.iter().map(|&(x, w)| (x + c, w)).collect()),
            Self::Sample(v) => Self::Sample(v.iter().map(|x| x + c).collect()),
            Self::Parametric(p) => Self::Parametric(match *p {
                ParametricLaw::Gaussian { mu, sigma } => ParametricLaw::Gaussian { mu: mu + c, sigma },
                ParametricLaw::Cauchy { x0, gamma } => ParametricLaw::Cauchy { x0: x0 + c, gamma },
                ParametricLaw::Uniform { a, b } => ParametricLaw::Uniform { a: a + c, b: b + c },
            }),
        }
    }

    /// Probability mass dropped by quantile clipping in parametric
    /// expectations; zero for exact laws.
    pub fn clipped_mass(&self) -> f64 {
        match self {
            Self::Parametric(ParametricLaw::Gaussian { .. } | ParametricLaw::Cauchy { .. }) => 2.0 * CLIP_QUANTILE,
            _ => 0.0,
        }
    }

    /// Density of X decays like |x|^{-d} when `Some(d)`; `None` means
    /// bounded support or faster than any power.
    pub fn tail_decay(&self) -> Option<f64> {
        match self {
            Self::Parametric(ParametricLaw::Cauchy { .. }) => Some(2.0),
            _ => None,
        }
    }

    /// Radius of the region carrying essentially all the mass (the core
    /// region for a Cauchy law).
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Atoms(a) => a.iter().map(|p| p.0.abs()).fold(0.0, f64::max),
            Self::Sample(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
            Self::Parametric(p) => match *p {
                ParametricLaw::Gaussian { mu, sigma } => mu.abs() + GAUSS_CLIP_Z * sigma,
                ParametricLaw::Cauchy { x0, gamma } => x0.abs() + 50.0 * gamma,
                ParametricLaw::Uniform { a, b } => a.abs().max(b.abs()),
            },
        }
    }

    /// Locations where densities built from X may lose smoothness.
    pub fn feature_points(&self) -> Vec<f64> {
        let mut pts = match self {
            Self::Atoms(a) => a.iter().map(|p| p.0).collect(),
            Self::Sample(v) => v.clone(),
            Self::Parametric(p) => match *p {
                ParametricLaw::Gaussian { mu, .. } => vec![mu],
                ParametricLaw::Cauchy { x0, .. } => vec![x0],
                ParametricLaw::Uniform { a, b } => vec![a, b],
            },
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// E[ln(1 + |X|)].
    pub fn log_moment(&self) -> Result<f64> {
        let f = |x: f64| x.abs().ln_1p();
        // ln(1 + |x|) has a kink at the origin
        let kink = Some(Hint {
            center: 0.0,
            scale: 1.0,
        });
        match self {
            Self::Parametric(law @ ParametricLaw::Cauchy { x0, gamma }) => {
                let mut acc = CompensatedSum::new();
                for (x, w) in parametric_nodes(law, kink) {
                    acc.add(w * f(x));
                }
                // ∫_R^∞ ln(c + r) γ/(π r²) dr per side, R = clip distance, c = 1 + |x0|
                let r = gamma * (PI * (0.5 - CLIP_QUANTILE)).tan();
                let c = 1.0 + x0.abs();
                let side = gamma / PI * ((c + r).ln() / r + ((c + r) / r).ln() / c);
                Ok(acc.value() + 2.0 * side)
            }
            _ => self.expect_with_hint(f, kink),
        }
    }

    /// Smallest ỹ > 0 with Pr(|X| ≤ ỹ) ≥ 1/2.
    pub fn median_radius(&self) -> f64 {
        let r = match self {
            Self::Atoms(a) => {
                let mut by_abs: Vec<(f64, f64)> = a.iter().map(|&(x, w)| (x.abs(), w)).collect();
                by_abs.sort_by(|p, q| p.0.total_cmp(&q.0));
                let mut cum = 0.0;
                let mut out = by_abs[by_abs.len() - 1].0;
                for (x, w) in by_abs {
                    cum += w;
                    if cum >= 0.5 - 1e-12 {
                        out = x;
                        break;
                    }
                }
                out
            }
            Self::Sample(v) => {
                let mut abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
                abs.sort_by(f64::total_cmp);
                abs[abs.len().div_ceil(2) - 1]
            }
            Self::Parametric(law) => {
                let mut lo = 0.0;
                let mut hi = 1.0;
                while abs_cdf(law, hi) < 0.5 {
                    hi *= 2.0;
                }
                while hi - lo > 1e-12 * hi.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if abs_cdf(law, mid) >= 0.5 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };
        r.max(MEDIAN_FLOOR)
    }

    /// Pr(|X| ≤ r).
    pub fn prob_abs_le(&self, r: f64) -> f64 {
        match self {
            Self::Atoms(a) => a.iter().filter(|p| p.0.abs() <= r).map(|p| p.1).sum(),
            Self::Sample(v) => v.iter().filter(|x| x.abs() <= r).count() as f64 / v.len() as f64,
            Self::Parametric(law) => abs_cdf(law, r),
        }
    }

    /// E[f(X)].
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.expect_with_hint(f, None)
    }

    /// E[f(X)], grading the quadrature of a parametric law toward the
    /// hinted point. Finite laws ignore the hint.
    pub fn expect_with_hint<F: Fn(f64) -> f64>(&self, f: F, hint: Option<Hint>) -> Result<f64> {
        let value = match self {
            Self::Atoms(a) => {
                let s: CompensatedSum = a.iter().map(|&(x, w)| w * f(x)).collect();
                s.value()
            }
            Self::Sample(v) => {
                let s: CompensatedSum = v.iter().map(|&x| f(x)).collect();
                s.value() / v.len() as f64
            }
            Self::Parametric(law) => {
                let nodes = parametric_nodes(law, hint);
                let mut acc = CompensatedSum::new();
                let mut mass = CompensatedSum::new();
                for (x, w) in &nodes {
                    acc.add(w * f(*x));
                    mass.add(*w);
                }
                acc.value() / mass.value()
            }
        };
        if !value.is_finite() {
            return Err(Error::Convergence {
                panels: 0,
                estimate: f64::NAN,
            });
        }
        Ok(value)
    }

    /// Quadrature nodes (x, weight·density) representing the law; exact
    /// atoms for finite laws. Weights sum to one.
    pub fn nodes(&self, hint: Option<Hint>) -> Vec<(f64, f64)> {
        match self.discrete_points() {
            Some(p) => p,
            None => {
                let Self::Parametric(law) = self else { unreachable!() };
                let mut nodes = parametric_nodes(law, hint);
                let mass: f64 = nodes.iter().map(|n| n.1).sum();
                for n in &mut nodes {
                    n.1 /= mass;
                }
                nodes
            }
        }
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn abs_cdf(law: &ParametricLaw, r: f64) -> f64 {
    match *law {
        ParametricLaw::Gaussian { mu, sigma } => std_normal_cdf((r - mu) / sigma) - std_normal_cdf((-r - mu) / sigma),
        ParametricLaw::Cauchy { x0, gamma } => (((r - x0) / gamma).atan() - ((-r - x0) / gamma).atan()) / PI,
        ParametricLaw::Uniform { a, b } => {
            let lo = (-r).max(a);
            let hi = r.min(b);
            ((hi - lo) / (b - a)).clamp(0.0, 1.0)
        }
    }
}

fn density(law: &ParametricLaw, x: f64) -> f64 {
    match *law {
        ParametricLaw::Gaussian { mu, sigma } => {
            let z = (x - mu) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
        }
        ParametricLaw::Cauchy { x0, gamma } => {
            let z = (x - x0) / gamma;
            1.0 / (PI * gamma * (1.0 + z * z))
        }
        ParametricLaw::Uniform { a, b } => {
            if x >= a && x <= b {
                1.0 / (b - a)
            } else {
                0.0
            }
        }
    }
}

/// Integration range [lo, hi] after quantile clipping.
fn clip_range(law: &ParametricLaw) -> (f64, f64) {
    match *law {
        ParametricLaw::Gaussian { mu, sigma } => (mu - GAUSS_CLIP_Z * sigma, mu + GAUSS_CLIP_Z * sigma),
        ParametricLaw::Cauchy { x0, gamma } => {
            let r = gamma * (PI * (0.5 - CLIP_QUANTILE)).tan();
            (x0 - r, x0 + r)
        }
        ParametricLaw::Uniform { a, b } => (a, b),
    }
}

/// Largest panel width allowed at x by the law's own density.
fn law_step(law: &ParametricLaw, x: f64) -> f64 {
    match *law {
        ParametricLaw::Gaussian { sigma, .. } => 0.5 * sigma,
        ParametricLaw::Cauchy { x0, gamma } => 0.5 * gamma.max((x - x0).abs()),
        ParametricLaw::Uniform { a, b } => 0.25 * (b - a),
    }
}

/// Composite Gauss–Legendre nodes over the clipped range, with panels
/// graded geometrically toward the hint center.
fn parametric_nodes(law: &ParametricLaw, hint: Option<Hint>) -> Vec<(f64, f64)> {
    let (lo, hi) = clip_range(law);
    let hint = hint.unwrap_or(match *law {
        ParametricLaw::Gaussian { mu, sigma } => Hint {
            center: mu,
            scale: sigma,
        },
        ParametricLaw::Cauchy { x0, gamma } => Hint {
            center: x0,
            scale: gamma,
        },
        ParametricLaw::Uniform { a, b } => Hint {
            center: 0.5 * (a + b),
            scale: b - a,
        },
    });
    let c = hint.center;
    let s = hint.scale;
    // A Cauchy law still has non-negligible mass near a hint far past the
    // quantile clip; widen symmetrically so that region is integrated.
    let (lo, hi) = match *law {
        ParametricLaw::Cauchy { x0, .. } if c < lo || c > hi => {
            let r = 2.0 * (c - x0).abs() + 10.0 * s;
            (x0 - r, x0 + r)
        }
        _ => (lo, hi),
    };
    let step = |x: f64| -> f64 {
        let d = (x - c).abs();
        // the last floor keeps steps above round-off far from the origin
        (0.5 * d.max(GRADING_FLOOR * s).max(1e-12 * c.abs())).min(law_step(law, x))
    };
    let start = c.clamp(lo, hi);
    let mut edges = vec![start];
    let mut x = start;
    while x < hi {
        let nx = (x + step(x)).min(hi);
        edges.push(nx);
        x = nx;
    }
    let mut left = Vec::new();
    x = start;
    while x > lo {
        let nx = (x - step(x)).max(lo);
        left.push(nx);
        x = nx;
    }
    left.reverse();
    left.extend(edges);
    let edges = left;

    let rule = GaussLegendre::get(PANEL_ORDER);
    let mut nodes = Vec::with_capacity(PANEL_ORDER * edges.len());
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let xx = mid + half * t;
            nodes.push((xx, wt * half * density(law, xx)));
        }
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, AdaptiveTol};
    use proptest::prelude::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn log_moment_examples() {
        assert_eq!(SourceDistribution::point(0.0).unwrap().log_moment().unwrap(), 0.0);
        let two = SourceDistribution::atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!((two.log_moment().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn cauchy_log_moment_matches_independent_routes() {
        let c = SourceDistribution::cauchy(0.0, 1.0).unwrap();
        let lm = c.log_moment().unwrap();
        // x = tan θ turns the heavy tail into a finite interval
        let tol = AdaptiveTol {
            abs: 1e-14,
            rel: 1e-14,
            max_panels: 4000,
        };
        let (oracle, _) = integrate(0.0, PI / 2.0, tol, |t| (2.0 / PI) * t.tan().ln_1p()).unwrap();
        assert!((lm - oracle).abs() < 1e-8, "{lm} vs {oracle}");
        let closed = std::f64::consts::LN_2 / 2.0 + 2.0 * CATALAN / PI;
        assert!((lm - closed).abs() < 1e-8);
    }

    #[test]
    fn median_radius_examples() {
        assert_eq!(SourceDistribution::point(0.0).unwrap().median_radius(), MEDIAN_FLOOR);
        let two = SourceDistribution::atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(two.median_radius(), 1.0);
        let g = SourceDistribution::gaussian(0.0, 1.0).unwrap().median_radius();
        assert!((g - 0.674_489_750_2).abs() < 1e-9);
        let c = SourceDistribution::cauchy(0.0, 2.0).unwrap().median_radius();
        assert!((c - 2.0).abs() < 1e-9);
        let s = SourceDistribution::sample(vec![3.0, -1.0, 0.5, 10.0]).unwrap();
        assert_eq!(s.median_radius(), 1.0);
    }

    #[test]
    fn expectation_examples() {
        let two = SourceDistribution::atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(two.expect(|_| 1.0).unwrap(), 1.0);
        assert_eq!(two.expect(|x| x).unwrap(), 0.0);
        for src in [
            SourceDistribution::gaussian(0.3, 2.0).unwrap(),
            SourceDistribution::uniform(-1.0, 4.0).unwrap(),
            SourceDistribution::cauchy(1.0, 0.5).unwrap(),
        ] {
            assert!((src.expect(|_| 1.0).unwrap() - 1.0).abs() < 1e-14);
        }
        let g = SourceDistribution::gaussian(0.3, 2.0).unwrap();
        assert!((g.expect(|x| x).unwrap() - 0.3).abs() < 1e-12);
        // clipping at the 1e-10 quantiles removes ~1e-8 of the variance
        assert!((g.expect(|x| (x - 0.3).powi(2)).unwrap() - 4.0).abs() < 1e-7);
        let u = SourceDistribution::uniform(-1.0, 4.0).unwrap();
        assert!((u.expect(|x| x).unwrap() - 1.5).abs() < 1e-13);
        // E[ln(1+|X|)] through the generic route for light-tailed laws
        let kink = Some(Hint {
            center: 0.0,
            scale: 1.0,
        });
        let direct = g.expect_with_hint(|x| x.abs().ln_1p(), kink).unwrap();
        assert!((direct - g.log_moment().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_and_schema() {
        let src = SourceDistribution::from_json(r#"{"kind":"parametric","name":"cauchy","params":{"x0":0,"gamma":1}}"#)
            .unwrap();
        assert_eq!(src, SourceDistribution::cauchy(0.0, 1.0).unwrap());
        let atoms = SourceDistribution::from_json(r#"{"kind":"atoms","atoms":[[-1,0.5],[1,0.5]]}"#).unwrap();
        assert_eq!(atoms.median_radius(), 1.0);
        let s = SourceDistribution::from_json(r#"{"kind":"sample","values":[1,2,3]}"#).unwrap();
        let back = SourceDistribution::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
        assert!(SourceDistribution::from_json(r#"{"kind":"atoms","atoms":[[0,0.4]]}"#).is_err());
        assert!(SourceDistribution::from_json(r#"{"kind":"sample","values":[]}"#).is_err());
        assert!(SourceDistribution::from_json(
            r#"{"kind":"parametric","name":"gaussian","params":{"mu":0,"sigma":-1}}"#
        )
        .is_err());
        assert!(
            SourceDistribution::from_json(r#"{"kind":"parametric","name":"uniform","params":{"a":2,"b":1}}"#).is_err()
        );
    }

    fn arb_source() -> impl Strategy<Value = SourceDistribution> {
        prop_oneof![
            prop::collection::vec((-20.0f64..20.0, 0.1f64..1.0), 1..6).prop_map(|v| {
                let total: f64 = v.iter().map(|p| p.1).sum();
                let mut atoms: Vec<(f64, f64)> = v.into_iter().map(|(x, w)| (x, w / total)).collect();
                // push the rounding residue onto the last weight
                let s: f64 = atoms.iter().map(|p| p.1).sum();
                atoms.last_mut().unwrap().1 += 1.0 - s;
                SourceDistribution::atoms(atoms).unwrap()
            }),
            prop::collection::vec(-50.0f64..50.0, 1..30).prop_map(|v| SourceDistribution::sample(v).unwrap()),
            (-5.0f64..5.0, 0.2f64..3.0).prop_map(|(m, s)| SourceDistribution::gaussian(m, s).unwrap()),
            (-5.0f64..5.0, 0.2f64..3.0).prop_map(|(m, s)| SourceDistribution::cauchy(m, s).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn expectation_is_linear(src in arb_source(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let f = |x: f64| (0.3 * x).sin();
            let g = |x: f64| 1.0 / (1.0 + x * x);
            let lhs = src.expect(|x| a * f(x) + b * g(x)).unwrap();
            let rhs = a * src.expect(f).unwrap() + b * src.expect(g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn shifted_log_moment_obeys_triangle_bound(src in arb_source(), c in -30.0f64..30.0) {
            let d = (src.shifted(c).log_moment().unwrap() - src.log_moment().unwrap()).abs();
            prop_assert!(d <= c.abs().ln_1p() + 1e-9);
        }

        #[test]
        fn median_radius_is_admissible(src in arb_source()) {
            let r = src.median_radius();
            prop_assert!(r > 0.0);
            prop_assert!(src.prob_abs_le(r) >= 0.5 - 1e-9);
        }
    }
}

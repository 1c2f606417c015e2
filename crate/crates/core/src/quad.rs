//! Quadrature building blocks: Gauss–Legendre rules, a 21-point
//! Gauss–Kronrod pair, adaptive partitioning and compensated summation.
//!
//! Adaptive integration here returns the [`Partition`] it settled on, so a
//! caller can re-use the same nodes for nearby integrands. Finite
//! differences of integrals in a parameter stay smooth that way.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_GL_ORDER: usize = 64;

impl GaussLegendre {
    /// Rule with `order` nodes, computed once and cached.
    pub fn get(order: usize) -> &'static GaussLegendre {
        assert!(
            (1..=MAX_GL_ORDER).contains(&order),
            "Gauss-Legendre order {order} out of range"
        );
        static RULES: [OnceLock<GaussLegendre>; MAX_GL_ORDER + 1] = [const { OnceLock::new() }; MAX_GL_ORDER + 1];
        RULES[order].get_or_init(|| Self::compute(order))
    }

    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_deriv(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// ∫_a^b f with this rule, no error estimate.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_126,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One application of the 21-point Kronrod rule: (value, error estimate).
pub fn gauss_kronrod_21<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveTol {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

/// Result of an adaptive integration: the estimate plus the mesh used.
#[derive(Debug, Clone)]
pub struct Partition {
    pub value: f64,
    pub error: f64,
    /// Panel endpoints in increasing order.
    pub edges: Vec<(f64, f64)>,
}

impl Partition {
    /// Applies the 21-point Kronrod rule on the stored panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(a, b) in &self.edges {
            acc.add(gauss_kronrod_21(a, b, &mut f).0);
        }
        acc.value()
    }

    /// Kronrod nodes and weights of the whole mesh, flattened.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(21 * self.edges.len());
        for &(a, b) in &self.edges {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for j in 0..10 {
                out.push((c - h * XGK[j], WGK[j] * h));
                out.push((c + h * XGK[j], WGK[j] * h));
            }
            out.push((c, WGK[10] * h));
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

/// Adaptive bisection over an initial set of breakpoints (sorted, at least
/// two). Worst panel first; stops when the summed error estimate meets
/// `max(abs, rel·|value|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(breakpoints: &[f64], tol: AdaptiveTol, mut f: F) -> Result<Partition> {
    if breakpoints.len() < 2 {
        return Err(Error::Parameter(
            "adaptive quadrature needs at least two breakpoints".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_21(w[0], w[1], &mut f);
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let (value, error) = totals(&heap);
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(finish(heap, value, error));
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Convergence {
                panels: heap.len(),
                estimate: error,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * mid.abs().max(1e-300) {
            // Cannot split further: keep it and accept the roundoff floor.
            heap.push(Panel { error: 0.0, ..worst });
            let (value, _) = totals(&heap);
            return Ok(finish(heap, value, error));
        }
        let (v1, e1) = gauss_kronrod_21(worst.a, mid, &mut f);
        let (v2, e2) = gauss_kronrod_21(mid, worst.b, &mut f);
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    // Sorted so the sum does not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: CompensatedSum = panels.iter().map(|p| p.value).collect();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    (value.value(), error)
}

fn finish(heap: BinaryHeap<Panel>, value: f64, error: f64) -> Partition {
    let mut edges: Vec<(f64, f64)> = heap.into_iter().map(|p| (p.a, p.b)).collect();
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));
    Partition { value, error, edges }
}

/// Plain adaptive integral over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: AdaptiveTol, f: F) -> Result<(f64, f64)> {
    let p = adaptive(&[a, b], tol, f)?;
    Ok((p.value, p.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: AdaptiveTol = AdaptiveTol {
        abs: 1e-13,
        rel: 1e-13,
        max_panels: 2000,
    };

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in [5usize, 10, 16, 20, 32] {
            let rule = GaussLegendre::get(order);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            // x^(2·order − 2) on [0, 1]
            let p = 2 * order - 2;
            let v = rule.integrate(0.0, 1.0, |x| x.powi(p as i32));
            assert!((v - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "order {order}");
        }
    }

    #[test]
    fn kronrod_handles_smooth_and_singular() {
        let (v, _) = integrate(0.0, std::f64::consts::PI, TOL, f64::sin).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let (v, _) = integrate(0.0, 1.0, TOL, |x| x.sqrt()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let (v, _) = integrate(1e-300, 1.0, TOL, |x| -x.ln()).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn partition_reuse_matches() {
        let p = adaptive(&[0.0, 0.5, 3.0], TOL, |x| (-x * x).exp()).unwrap();
        let again = p.integrate(|x| (-x * x).exp());
        assert!((again - p.value).abs() < 1e-15);
        let nodes = p.nodes();
        let s: f64 = nodes.iter().map(|(x, w)| w * (-x * x).exp()).sum();
        assert!((s - p.value).abs() < 1e-14);
    }

    #[test]
    fn panel_cap_reports_convergence_failure() {
        let tight = AdaptiveTol {
            abs: 1e-300,
            rel: 0.0,
            max_panels: 4,
        };
        let err = integrate(0.0, 1.0, tight, |x| (50.0 * x).sin() / x.sqrt().max(1e-3));
        assert!(matches!(err, Err(Error::Convergence { .. })));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-13).abs() < 1e-20);
    }
}

//! Monte Carlo oracle: exact stable variates by the Chambers–Mallows–Stuck
//! construction and a plug-in entropy estimate −mean(ln q(Y_i)).
//!
//! Streams are ChaCha20 keyed by the seed; draw i lives in substream
//! i / CHUNK, so output is bit-identical for any number of worker threads.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::MixtureModel;
use crate::quad::{CompensatedSum, GaussLegendre};
use crate::source::{ParametricLaw, SourceDistribution};
use crate::stable::{check_alpha, StableLaw};

/// Draws per substream.
pub const CHUNK: usize = 1 << 16;

/// Seed of the sampling streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed(pub u64);

/// Generator for substream `k` of `seed`.
pub fn substream(seed: RngSeed, k: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
    rng.set_stream(k);
    rng
}

/// One CMS draw from uniform V on (−π/2, π/2) and exponential W.
pub fn cms(alpha: f64, v: f64, w: f64) -> f64 {
    if alpha == 1.0 {
        return v.tan();
    }
    let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    a * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

fn draw_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let e: f64 = rng.sample(Open01);
    cms(alpha, v, -e.ln())
}

fn chunked<T: Send, F>(n: usize, seed: RngSeed, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha20Rng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|i| f(&mut rng, c * CHUNK + i)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// i.i.d. draws from the standard law with characteristic function e^{−|ω|^α}.
pub fn sample_stable(alpha: f64, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    Ok(chunked(n, seed, |rng, _| draw_stable(alpha, rng)))
}

fn draw_source<R: Rng>(source: &SourceDistribution, rng: &mut R) -> f64 {
    match source {
        SourceDistribution::Atoms(a) => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for &(x, w) in a {
                acc += w;
                if u < acc {
                    return x;
                }
            }
            a.last().expect("nonempty").0
        }
        SourceDistribution::Sample(v) => v[rng.random_range(0..v.len())],
        SourceDistribution::Parametric(law) => match *law {
            ParametricLaw::Gaussian { mu, sigma } => Normal::new(mu, sigma).expect("validated").sample(rng),
            ParametricLaw::Cauchy { x0, gamma } => Cauchy::new(x0, gamma).expect("validated").sample(rng),
            ParametricLaw::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
        },
    }
}

/// Draws of Y = X + η^{1/α} N.
pub fn sample_mixture(model: &MixtureModel, n: usize, seed: RngSeed) -> Vec<f64> {
    let s = model.eta().powf(1.0 / model.alpha());
    let alpha = model.alpha();
    chunked(n, seed, |rng, _| {
        let x = draw_source(model.source(), rng);
        x + s * draw_stable(alpha, rng)
    })
}

/// Plug-in entropy estimate with its standard error.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub alpha: f64,
    pub eta: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

pub fn mc_entropy(model: &MixtureModel, n: usize, seed: RngSeed) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 samples, got {n}")));
    }
    let ys = sample_mixture(model, n, seed);
    let logs: Vec<f64> = ys
        .par_chunks(CHUNK)
        .map(|c| {
            c.iter()
                .map(|&y| model.pdf(y).map(|q| -q.ln()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mean: f64 = logs.iter().copied().collect::<CompensatedSum>().value() / n as f64;
    let var: f64 = logs
        .iter()
        .map(|l| (l - mean).powi(2))
        .collect::<CompensatedSum>()
        .value()
        / (n - 1) as f64;
    Ok(McEstimate {
        alpha: model.alpha(),
        eta: model.eta(),
        estimate: mean,
        stderr: (var / n as f64).sqrt(),
        n_samples: n,
        seed: seed.0,
    })
}

/// Per-bin χ² comparison of a sample against p_N.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramReport {
    pub alpha: f64,
    pub bins: usize,
    pub bin_width: f64,
    pub range: (f64, f64),
    /// Bins whose (observed − expected)²/expected is below the threshold.
    pub bins_ok: usize,
    pub fraction_ok: f64,
    pub max_chi2: f64,
    pub pass: bool,
}

pub const CHI2_BIN_LIMIT: f64 = 4.0;
pub const CHI2_FRACTION: f64 = 0.95;

pub fn histogram_check(law: &StableLaw, samples: &[f64], lo: f64, hi: f64, width: f64) -> Result<HistogramReport> {
    if !(hi > lo && width > 0.0) {
        return Err(Error::Parameter("histogram needs lo < hi and width > 0".into()));
    }
    let bins = ((hi - lo) / width).round() as usize;
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if x >= lo && x < hi {
            let i = (((x - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let gl = GaussLegendre::get(10);
    let n = samples.len() as f64;
    let mut ok = 0;
    let mut max_chi2: f64 = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let a = lo + i as f64 * width;
        let mut err = None;
        let p = gl.integrate(a, a + width, |u| {
            law.pdf(u).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        let expected = n * p;
        let chi2 = (c as f64 - expected).powi(2) / expected;
        max_chi2 = max_chi2.max(chi2);
        if chi2 < CHI2_BIN_LIMIT {
            ok += 1;
        }
    }
    let fraction_ok = ok as f64 / bins as f64;
    Ok(HistogramReport {
        alpha: law.alpha(),
        bins,
        bin_width: width,
        range: (lo, hi),
        bins_ok: ok,
        fraction_ok,
        max_chi2,
        pass: fraction_ok >= CHI2_FRACTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::QuadratureConfig;

    #[test]
    fn cauchy_draw_is_tangent_of_first_uniform() {
        let seed = RngSeed(7);
        let x = sample_stable(1.0, 3, seed).unwrap();
        let mut rng = substream(seed, 0);
        let u: f64 = rng.sample(Open01);
        assert_eq!(x[0], (PI * (u - 0.5)).tan());
    }

    #[test]
    fn streams_are_reproducible_and_chunk_aligned() {
        let a = sample_stable(0.8, CHUNK + 10, RngSeed(3)).unwrap();
        let b = sample_stable(0.8, CHUNK + 10, RngSeed(3)).unwrap();
        assert_eq!(a, b);
        let short = sample_stable(0.8, 5, RngSeed(3)).unwrap();
        assert_eq!(&a[..5], &short[..]);
        assert_ne!(a, sample_stable(0.8, CHUNK + 10, RngSeed(4)).unwrap());
    }

    #[test]
    fn cauchy_cdf_at_one() {
        let x = sample_stable(1.0, 1_000_000, RngSeed(11)).unwrap();
        let f = x.iter().filter(|&&v| v <= 1.0).count() as f64 / x.len() as f64;
        assert!((f - 0.75).abs() < 0.002, "{f}");
    }

    #[test]
    fn median_near_zero() {
        for alpha in [0.5, 1.5] {
            let mut x = sample_stable(alpha, 200_000, RngSeed(5)).unwrap();
            x.sort_by(f64::total_cmp);
            assert!(x[x.len() / 2].abs() < 0.01);
        }
    }

    #[test]
    fn stderr_scales_like_inverse_root_n() {
        let law = StableLaw::tabulated(1.0, QuadratureConfig::default()).unwrap();
        let m = MixtureModel::with_law(law, 1.0, SourceDistribution::point(0.0).unwrap()).unwrap();
        let a = mc_entropy(&m, 100_000, RngSeed(1)).unwrap();
        let b = mc_entropy(&m, 200_000, RngSeed(1)).unwrap();
        let r = b.stderr / a.stderr;
        assert!((r - 0.5f64.sqrt()).abs() < 0.2 * 0.5f64.sqrt(), "{r}");
        assert!((a.estimate - (4.0 * PI).ln()).abs() < 4.0 * a.stderr);
        let again = mc_entropy(&m, 100_000, RngSeed(1)).unwrap();
        assert_eq!(a.estimate, again.estimate);
    }
}

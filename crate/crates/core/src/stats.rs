//! Statistical behaviour of `√J(y, Φx)` under Poisson noise.
//!
//! For a non-negative flux-preserving `Φ` and `sᵢ = N (Φx)ᵢ`:
//!
//! * `E[√J] ≤ √(N/4)`,
//! * `Var[√J] ≤ (11 + 5 Σ 1/sᵢ) / max(0, 4 (2 − Σ 1/sᵢ))`, which tends to
//!   `11/8` once every `sᵢ` is large,
//! * `√J ≤ √N (½ + √11/8)` with probability at least `1 − 2e^{−N/2}`.
//!
//! The last radius is the default constraint radius for the SQJSD-constrained
//! estimator; the alternative is the empirical 99th percentile.

use alloc::vec::Vec;

use crate::divergences::{jsd_raw, NonNegVector};
use crate::error::{Error, Result};
use crate::math::{compensated_sum, exp, ln, normal_cdf, sqrt, KahanSum};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sensing::SensingMatrix;
use crate::simulate::poisson_draw;

/// `½ + √11/8`: the tail radius per `√N`.
pub const TAIL_RADIUS_PER_SQRT_N: f64 = 0.5 + 0.414_578_098_794_425_3;

/// Minimum sample count for percentile-based radii.
pub const MIN_PERCENTILE_SAMPLES: usize = 100;

/// Minimum sample count for the KS test.
pub const MIN_KS_SAMPLES: usize = 30;

/// Monte-Carlo draws of `√J(y, Φx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqjsdSampleSet {
    pub samples: Vec<f64>,
    pub measurements: usize,
    pub intensity: f64,
}

impl SqjsdSampleSet {
    pub fn trials(&self) -> usize {
        self.samples.len()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.samples)
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        variance(&self.samples)
    }

    /// Linearly interpolated percentile, `q ∈ [0, 1]`.
    pub fn percentile(&self, q: f64) -> f64 {
        percentile(&self.samples, q)
    }
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    compensated_sum(v.iter().copied()) / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let mut acc = KahanSum::new();
    for x in v {
        acc.add((x - m) * (x - m));
    }
    acc.value() / (v.len() - 1) as f64
}

/// Percentile by linear interpolation between the closest order statistics
/// at fractional rank `q (n − 1)`.
pub fn percentile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let h = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = h as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// `trials` independent Poisson realizations of `√J(y, Φx)`.
///
/// Trial `t` draws from the stream `derive_seed(seed, &[t])`.
pub fn monte_carlo_sqjsd(phi: &SensingMatrix, x: &NonNegVector, trials: usize, seed: u64) -> Result<SqjsdSampleSet> {
    if trials < 2 {
        return Err(Error::InvalidParam("need at least two trials"));
    }
    if x.len() != phi.signal_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.signal_dim(),
            actual: x.len(),
        });
    }
    let rates: Vec<f64> = phi.apply(x)?.into_iter().map(|r| r.max(0.0)).collect();
    sqjsd_samples_for_rates(&rates, trials, seed, x.l1_norm())
}

pub(crate) fn sqjsd_samples_for_rates(rates: &[f64], trials: usize, seed: u64, intensity: f64) -> Result<SqjsdSampleSet> {
    let mut y = alloc::vec![0.0; rates.len()];
    let mut samples = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, &[t as u64]));
        for (yi, &r) in y.iter_mut().zip(rates) {
            *yi = poisson_draw(r, &mut rng)? as f64;
        }
        samples.push(sqrt(jsd_raw(&y, rates)?));
    }
    Ok(SqjsdSampleSet {
        samples,
        measurements: rates.len(),
        intensity,
    })
}

/// Analytic bounds on `√J(y, Φx)` for a given `Φ` and `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqjsdBounds {
    /// `√(N/4)`.
    pub mean_bound: f64,
    /// Variance bound; `+∞` when `Σ 1/sᵢ ≥ 2`.
    pub var_bound: f64,
    /// `√N (½ + √11/8)`.
    pub tail_epsilon: f64,
    /// `1 − 2e^{−N/2}`.
    pub tail_prob: f64,
    /// `minᵢ N (Φx)ᵢ`.
    pub s_min: f64,
}

impl SqjsdBounds {
    pub fn var_bound_is_finite(&self) -> bool {
        self.var_bound.is_finite()
    }
}

pub fn sqjsd_bounds(phi: &SensingMatrix, x: &NonNegVector) -> Result<SqjsdBounds> {
    let n = phi.measurements() as f64;
    let s: Vec<f64> = phi.apply(x)?.into_iter().map(|r| n * r).collect();
    Ok(bounds_from_scaled_rates(&s))
}

/// Bounds from `sᵢ = N (Φx)ᵢ` directly.
pub fn bounds_from_scaled_rates(s: &[f64]) -> SqjsdBounds {
    let n = s.len() as f64;
    let inv_sum = compensated_sum(s.iter().map(|&v| if v > 0.0 { 1.0 / v } else { f64::INFINITY }));
    SqjsdBounds {
        mean_bound: sqrt(n / 4.0),
        var_bound: variance_bound(inv_sum),
        tail_epsilon: sqrt(n) * TAIL_RADIUS_PER_SQRT_N,
        tail_prob: 1.0 - 2.0 * exp(-n / 2.0),
        s_min: s.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// `(11 + 5Σ) / max(0, 4(2 − Σ))` with `Σ = Σ 1/sᵢ`.
pub fn variance_bound(inv_sum: f64) -> f64 {
    let den = 4.0 * (2.0 - inv_sum);
    if !(den > 0.0) {
        return f64::INFINITY;
    }
    (11.0 + 5.0 * inv_sum) / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

/// Asymptotic one-sample KS critical coefficient `c(α) = √(−½ ln(α/2))`.
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    sqrt(-0.5 * ln(alpha / 2.0))
}

/// One-sample KS test against the Gaussian with the samples' own mean and
/// standard deviation. The critical value is the plain asymptotic
/// `c(α)/√n`, without a correction for the estimated parameters.
pub fn ks_gaussian_test(samples: &SqjsdSampleSet, alpha: f64) -> Result<KsResult> {
    ks_gaussian(&samples.samples, alpha)
}

pub fn ks_gaussian(values: &[f64], alpha: f64) -> Result<KsResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParam("alpha must lie in (0, 1)"));
    }
    if values.len() < MIN_KS_SAMPLES {
        return Err(Error::InvalidParam("KS test needs at least 30 samples"));
    }
    let mu = mean(values);
    let sd = sqrt(variance(values));
    if !(sd > 0.0) {
        return Err(Error::DegenerateSamples);
    }
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let statistic = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf((x - mu) / sd);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let critical = ks_critical_coefficient(alpha) / sqrt(n);
    Ok(KsResult {
        statistic,
        critical,
        pass: statistic < critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonMode {
    /// `√N (½ + √11/8)`.
    Theory,
    /// Empirical 99th percentile of `√J`.
    Percentile,
}

pub fn choose_epsilon(mode: EpsilonMode, measurements: usize, samples: Option<&SqjsdSampleSet>) -> Result<f64> {
    match mode {
        EpsilonMode::Theory => Ok(sqrt(measurements as f64) * TAIL_RADIUS_PER_SQRT_N),
        EpsilonMode::Percentile => {
            let s = samples.ok_or(Error::MissingSamples {
                required: MIN_PERCENTILE_SAMPLES,
                actual: 0,
            })?;
            if s.trials() < MIN_PERCENTILE_SAMPLES {
                return Err(Error::MissingSamples {
                    required: MIN_PERCENTILE_SAMPLES,
                    actual: s.trials(),
                });
            }
            Ok(s.percentile(0.99))
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|&v| ln(v)).collect();
    let ly: Vec<f64> = y.iter().map(|&v| ln(v)).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

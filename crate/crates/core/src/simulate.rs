//! Poisson measurements `y ~ Poisson(Φx)` and test signals.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use crate::divergences::NonNegVector;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::sensing::SensingMatrix;

/// Counts drawn from a known rate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    pub counts: Vec<u64>,
    pub rates: NonNegVector,
    pub seed: u64,
}

impl MeasurementVector {
    /// Counts as reals, for divergences and solvers.
    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// One exact Poisson variate. A zero rate yields zero without touching `rng`.
pub fn poisson_draw(rate: f64, rng: &mut Rng) -> Result<u64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParam("poisson rate must be finite and non-negative"));
    }
    if rate == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(rate).map_err(|_| Error::InvalidParam("poisson rate out of range"))?;
    Ok(dist.sample(rng) as u64)
}

/// Draw `yᵢ ~ Poisson((Φx)ᵢ)` independently from the stream named by `seed`.
pub fn measure(phi: &SensingMatrix, x: &NonNegVector, seed: u64) -> Result<MeasurementVector> {
    if x.len() != phi.signal_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.signal_dim(),
            actual: x.len(),
        });
    }
    let rates = NonNegVector::from_vec_unchecked(
        phi.apply(x)?.into_iter().map(|r| r.max(0.0)).collect(),
    );
    measure_rates(rates, seed)
}

/// Draw counts for an explicit rate vector.
pub fn measure_rates(rates: NonNegVector, seed: u64) -> Result<MeasurementVector> {
    let mut rng = rng_from_seed(seed);
    let counts = rates
        .iter()
        .map(|&r| poisson_draw(r, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementVector { counts, rates, seed })
}

/// Non-negative `s`-sparse signal of dimension `m` with `‖x‖₁ = intensity`.
///
/// The support is uniform without replacement; magnitudes are i.i.d.
/// `U(0.5, 1.5)` before rescaling.
pub fn sparse_signal(m: usize, s: usize, intensity: f64, rng: &mut Rng) -> Result<NonNegVector> {
    if s == 0 || s > m {
        return Err(Error::InvalidParam("sparsity must lie in 1..=m"));
    }
    if !(intensity > 0.0) || !intensity.is_finite() {
        return Err(Error::InvalidParam("intensity must be positive"));
    }
    let support = index::sample(rng, m, s);
    let mut x = alloc::vec![0.0; m];
    for j in support.iter() {
        x[j] = rng.random_range(0.5..1.5);
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v *= intensity / total);
    Ok(NonNegVector::from_vec_unchecked(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{build_phi, sample_rip_matrix};

    #[test]
    fn zero_rate_is_zero() {
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(poisson_draw(0.0, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn invalid_rates() {
        let mut rng = rng_from_seed(1);
        assert!(poisson_draw(-1.0, &mut rng).is_err());
        assert!(poisson_draw(f64::NAN, &mut rng).is_err());
        assert!(poisson_draw(f64::INFINITY, &mut rng).is_err());
    }

    #[test]
    fn high_rate_mean_and_dispersion() {
        let mut rng = rng_from_seed(2024);
        let n = 100_000;
        let rate = 1e4;
        let draws: Vec<f64> = (0..n).map(|_| poisson_draw(rate, &mut rng).unwrap() as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - rate).abs() <= 3.0 * 100.0 / (n as f64).sqrt(), "{mean}");
        let ratio = var / mean;
        assert!((0.97..=1.03).contains(&ratio), "{ratio}");
    }

    #[test]
    fn very_high_rates_are_sampled() {
        let mut rng = rng_from_seed(5);
        let d = poisson_draw(1e8, &mut rng).unwrap() as f64;
        assert!((d - 1e8).abs() < 6.0 * 1e4);
    }

    #[test]
    fn measurement_of_zero_signal_is_zero() {
        let phi = build_phi(sample_rip_matrix(10, 20, 0.5, 3).unwrap());
        let x = NonNegVector::new(alloc::vec![0.0; 20]).unwrap();
        let y = measure(&phi, &x, 9).unwrap();
        assert!(y.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn measurement_is_reproducible_and_checks_dims() {
        let phi = build_phi(sample_rip_matrix(10, 20, 0.5, 3).unwrap());
        let x = NonNegVector::new(alloc::vec![5.0; 20]).unwrap();
        assert_eq!(measure(&phi, &x, 4).unwrap(), measure(&phi, &x, 4).unwrap());
        let bad = NonNegVector::new(alloc::vec![1.0; 19]).unwrap();
        assert!(matches!(measure(&phi, &bad, 4), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sparse_signal_properties() {
        let mut rng = rng_from_seed(77);
        let x = sparse_signal(100, 5, 1e6, &mut rng).unwrap();
        assert_eq!(x.iter().filter(|&&v| v > 0.0).count(), 5);
        assert!((x.l1_norm() - 1e6).abs() < 1e-6);
        assert!(sparse_signal(10, 11, 1.0, &mut rng).is_err());
        assert!(sparse_signal(10, 2, 0.0, &mut rng).is_err());
    }
}

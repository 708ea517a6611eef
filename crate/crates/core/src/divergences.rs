//! Divergences between non-negative vectors.
//!
//! All logarithms are natural. Terms of the form `0·log(0/q)` are zero, and
//! a strictly positive mass against a zero reference is a [`Error::Domain`]
//! rather than `+∞`. Sums go through a compensated accumulator.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::math::{abs, compensated_sum, ln, sqrt};

/// Vector of finite, non-negative reals with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegVector(Vec<f64>);

impl NonNegVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParam("vector must have at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("entries must be finite and non-negative"));
        }
        Ok(Self(values))
    }

    /// Wraps values that are already known to be valid.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_norm(&self) -> f64 {
        compensated_sum(self.0.iter().copied())
    }
}

impl Deref for NonNegVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for NonNegVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl TryFrom<&[f64]> for NonNegVector {
    type Error = Error;

    fn try_from(v: &[f64]) -> Result<Self> {
        Self::new(v.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceKind {
    Kl,
    GenKl,
    Jsd,
    Sqjsd,
    TotalVariation,
    Delta,
    Snll,
    NllApprox,
    SymKl,
}

impl DivergenceKind {
    /// Whether values of this kind are guaranteed non-negative.
    pub fn is_nonnegative(self) -> bool {
        !matches!(self, DivergenceKind::Snll | DivergenceKind::NllApprox)
    }
}

/// A divergence value in nats, tagged with what produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    pub value: f64,
    pub kind: DivergenceKind,
}

impl DivergenceValue {
    fn new(kind: DivergenceKind, value: f64) -> Self {
        Self { value, kind }
    }
}

fn same_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

#[inline]
fn kl_term(p: f64, q: f64) -> Result<f64> {
    if p == 0.0 {
        Ok(0.0)
    } else if q == 0.0 {
        Err(Error::Domain("kl: positive mass against a zero reference"))
    } else {
        Ok(p * ln(p / q))
    }
}

/// `p·log(p/m) + q·log(q/m)` halved, with `m = (p+q)/2`.
#[inline]
pub(crate) fn jsd_term(p: f64, q: f64) -> f64 {
    let s = p + q;
    if s == 0.0 {
        return 0.0;
    }
    let mut t = 0.0;
    if p > 0.0 {
        t += p * ln(2.0 * p / s);
    }
    if q > 0.0 {
        t += q * ln(2.0 * q / s);
    }
    0.5 * t
}

#[inline]
fn gen_kl_term(y: f64, u: f64) -> Result<f64> {
    if y == 0.0 {
        Ok(u)
    } else if u == 0.0 {
        Err(Error::Domain("generalized kl: positive count against a zero rate"))
    } else {
        Ok(y * ln(y / u) - y + u)
    }
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    let terms = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| kl_term(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// Length-checked JSD over raw slices. No sign validation.
pub(crate) fn jsd_raw(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    // each term is >= 0 analytically; clamp the rounding noise
    Ok(compensated_sum(p.iter().zip(q).map(|(&a, &b)| jsd_term(a, b))).max(0.0))
}

pub(crate) fn gen_kl_raw(y: &[f64], u: &[f64]) -> Result<f64> {
    same_len(y, u)?;
    let terms = y
        .iter()
        .zip(u)
        .map(|(&a, &b)| gen_kl_term(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms).max(0.0))
}

/// Kullback-Leibler divergence `Σ pᵢ log(pᵢ/qᵢ)`.
pub fn kl(p: &NonNegVector, q: &NonNegVector) -> Result<DivergenceValue> {
    kl_raw(p, q).map(|v| DivergenceValue::new(DivergenceKind::Kl, v))
}

/// Jensen-Shannon divergence `(D(p,m) + D(q,m))/2`, `m = (p+q)/2`.
///
/// Finite for every pair of non-negative vectors and symmetric.
pub fn jsd(p: &NonNegVector, q: &NonNegVector) -> Result<DivergenceValue> {
    jsd_raw(p, q).map(|v| DivergenceValue::new(DivergenceKind::Jsd, v))
}

/// Square root of [`jsd`]; a metric on the non-negative orthant.
pub fn sqjsd(p: &NonNegVector, q: &NonNegVector) -> Result<DivergenceValue> {
    jsd_raw(p, q).map(|v| DivergenceValue::new(DivergenceKind::Sqjsd, sqrt(v)))
}

/// Generalized KL `Σ yᵢ log(yᵢ/uᵢ) − yᵢ + uᵢ`.
pub fn gen_kl(y: &NonNegVector, u: &NonNegVector) -> Result<DivergenceValue> {
    gen_kl_raw(y, u).map(|v| DivergenceValue::new(DivergenceKind::GenKl, v))
}

/// l1 distance `Σ |pᵢ − qᵢ|`.
pub fn total_variation(p: &NonNegVector, q: &NonNegVector) -> Result<DivergenceValue> {
    same_len(p, q)?;
    let v = compensated_sum(p.iter().zip(q.iter()).map(|(a, b)| abs(a - b)));
    Ok(DivergenceValue::new(DivergenceKind::TotalVariation, v))
}

/// Triangular discrimination `Σ (pᵢ−qᵢ)²/(pᵢ+qᵢ)`; coordinates with
/// `pᵢ + qᵢ = 0` contribute nothing.
pub fn delta(p: &NonNegVector, q: &NonNegVector) -> Result<DivergenceValue> {
    same_len(p, q)?;
    let v = compensated_sum(p.iter().zip(q.iter()).map(|(&a, &b)| {
        let s = a + b;
        if s == 0.0 {
            0.0
        } else {
            (a - b) * (a - b) / s
        }
    }));
    Ok(DivergenceValue::new(DivergenceKind::Delta, v))
}

/// Symmetrized KL `D(u,v) + D(v,u)`.
pub fn sym_kl(u: &NonNegVector, v: &NonNegVector) -> Result<DivergenceValue> {
    let a = kl_raw(u, v)?;
    let b = kl_raw(v, u)?;
    Ok(DivergenceValue::new(DivergenceKind::SymKl, a + b))
}

fn require_positive(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain(what));
    }
    Ok(())
}

/// Poisson negative log-likelihood with `log yᵢ!` replaced by Stirling's
/// approximation: `G(y,u) + Σ (½ log yᵢ + ½ log 2π)`.
///
/// Zero counts are outside the domain; filter them first.
pub fn nll_approx(y: &NonNegVector, u: &NonNegVector) -> Result<DivergenceValue> {
    same_len(y, u)?;
    require_positive(y, "nll_approx: counts must be strictly positive")?;
    require_positive(u, "nll_approx: rates must be strictly positive")?;
    let g = gen_kl_raw(y, u)?;
    let c = compensated_sum(y.iter().map(|&yi| 0.5 * ln(yi) + 0.5 * ln(2.0 * PI)));
    Ok(DivergenceValue::new(DivergenceKind::NllApprox, g + c))
}

/// Symmetrized Stirling-approximated NLL:
/// `G(y,u) + G(u,y) + Σ (½ log yᵢ + ½ log uᵢ + log 2π)`.
pub fn snll(y: &NonNegVector, u: &NonNegVector) -> Result<DivergenceValue> {
    same_len(y, u)?;
    require_positive(y, "snll: counts must be strictly positive")?;
    require_positive(u, "snll: rates must be strictly positive")?;
    let v = compensated_sum(
        y.iter()
            .zip(u.iter())
            .map(|(&a, &b)| snll_term(a, b)),
    );
    Ok(DivergenceValue::new(DivergenceKind::Snll, v))
}

#[inline]
pub(crate) fn snll_term(y: f64, u: f64) -> f64 {
    // G(y,u) + G(u,y) collapses to (y − u)·log(y/u)
    (y - u) * ln(y / u) + 0.5 * ln(y) + 0.5 * ln(u) + ln(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::LN_2;
    use proptest::prelude::*;

    fn nn(v: &[f64]) -> NonNegVector {
        NonNegVector::new(v.to_vec()).unwrap()
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn rejects_bad_vectors() {
        assert!(NonNegVector::new(vec![]).is_err());
        assert!(NonNegVector::new(vec![1.0, -0.1]).is_err());
        assert!(NonNegVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl(&nn(&[0.5, 0.5]), &nn(&[0.5, 0.5])).unwrap().value, 0.0);
        let v = kl(&nn(&[1.0, 0.0]), &nn(&[0.5, 0.5])).unwrap().value;
        assert!((v - LN_2).abs() < TOL);
        let v = kl(&nn(&[0.2, 0.8]), &nn(&[0.6, 0.4])).unwrap().value;
        let oracle = 0.2 * (1.0f64 / 3.0).ln() + 0.8 * 2.0f64.ln();
        assert!((v - oracle).abs() < TOL);
        assert!((v - 0.3348).abs() < 1e-4);
    }

    #[test]
    fn kl_errors() {
        assert_eq!(
            kl(&nn(&[1.0]), &nn(&[1.0, 2.0])),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        );
        assert!(matches!(kl(&nn(&[1.0, 1.0]), &nn(&[1.0, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(jsd(&nn(&[3.0, 7.0]), &nn(&[3.0, 7.0])).unwrap().value, 0.0);
        let v = jsd(&nn(&[1.0, 0.0]), &nn(&[0.0, 1.0])).unwrap().value;
        assert!((v - LN_2).abs() < TOL);
        let s = sqjsd(&nn(&[1.0, 0.0]), &nn(&[0.0, 1.0])).unwrap().value;
        assert!((s - LN_2.sqrt()).abs() < TOL);
        assert!((s - 0.8326).abs() < 1e-4);
        assert!(jsd(&nn(&[1.0]), &nn(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn gen_kl_examples() {
        assert_eq!(gen_kl(&nn(&[2.0, 5.0]), &nn(&[2.0, 5.0])).unwrap().value, 0.0);
        assert!((gen_kl(&nn(&[0.0, 0.0]), &nn(&[1.0, 2.0])).unwrap().value - 3.0).abs() < TOL);
        let v = gen_kl(&nn(&[4.0]), &nn(&[2.0])).unwrap().value;
        assert!((v - (4.0 * LN_2 - 2.0)).abs() < TOL);
        assert!((v - 0.7726).abs() < 1e-4);
        assert!(gen_kl(&nn(&[1.0]), &nn(&[0.0])).is_err());
    }

    #[test]
    fn tv_and_delta_examples() {
        let (a, b) = (nn(&[1.0, 0.0]), nn(&[0.0, 1.0]));
        assert_eq!(total_variation(&a, &a).unwrap().value, 0.0);
        assert_eq!(total_variation(&a, &b).unwrap().value, 2.0);
        assert!((total_variation(&nn(&[0.3]), &nn(&[0.7])).unwrap().value - 0.4).abs() < TOL);
        assert_eq!(delta(&a, &a).unwrap().value, 0.0);
        assert_eq!(delta(&a, &b).unwrap().value, 2.0);
        assert_eq!(delta(&nn(&[0.0, 0.0]), &nn(&[0.0, 0.0])).unwrap().value, 0.0);
    }

    #[test]
    fn boundary_chain_tightness() {
        let (p, q) = (nn(&[1.0, 0.0]), nn(&[0.0, 1.0]));
        let v = total_variation(&p, &q).unwrap().value;
        let d = delta(&p, &q).unwrap().value;
        let j = jsd(&p, &q).unwrap().value;
        assert_eq!(0.5 * v * v, 2.0);
        assert_eq!(d, 2.0);
        assert!((4.0 * j - 2.7726).abs() < 1e-4);
        assert!(0.5 * v * v <= d && d <= 4.0 * j);
    }

    #[test]
    fn sym_kl_example() {
        let (u, v) = (nn(&[0.2, 0.8]), nn(&[0.6, 0.4]));
        let oracle = (0.2 * (1.0f64 / 3.0).ln() + 0.8 * 2.0f64.ln())
            + (0.6 * 3.0f64.ln() + 0.4 * 0.5f64.ln());
        let s = sym_kl(&u, &v).unwrap().value;
        assert!((s - oracle).abs() < TOL);
        assert!((s - 0.7167).abs() < 1e-4);
        assert_eq!(sym_kl(&u, &u).unwrap().value, 0.0);
    }

    #[test]
    fn nll_and_snll_examples() {
        let half_log_2pi = 0.5 * (2.0 * PI).ln();
        let v = nll_approx(&nn(&[1.0]), &nn(&[1.0])).unwrap().value;
        assert!((v - half_log_2pi).abs() < TOL);
        assert!((v - 0.9189).abs() < 1e-4);
        let v = nll_approx(&nn(&[5.0]), &nn(&[5.0])).unwrap().value;
        assert!((v - (0.5 * 5.0f64.ln() + half_log_2pi)).abs() < TOL);
        assert!(nll_approx(&nn(&[0.0]), &nn(&[1.0])).is_err());

        let v = snll(&nn(&[1.0]), &nn(&[1.0])).unwrap().value;
        assert!((v - (2.0 * PI).ln()).abs() < TOL);
        assert!(snll(&nn(&[1.0, 0.0]), &nn(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn nonnegative_kinds() {
        assert!(DivergenceKind::Jsd.is_nonnegative());
        assert!(!DivergenceKind::Snll.is_nonnegative());
        assert!(!DivergenceKind::NllApprox.is_nonnegative());
    }

    fn pos_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..30).prop_flat_map(|n| {
            (
                proptest::collection::vec(0.01f64..10.0, n),
                proptest::collection::vec(0.01f64..10.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn jsd_symmetric_and_permutation_invariant((p, q) in pos_pair(), rot in 0usize..30) {
            let a = jsd(&nn(&p), &nn(&q)).unwrap().value;
            let b = jsd(&nn(&q), &nn(&p)).unwrap().value;
            prop_assert_eq!(a, b);
            let k = rot % p.len();
            let mut pr = p.clone();
            let mut qr = q.clone();
            pr.rotate_left(k);
            qr.rotate_left(k);
            let c = jsd(&nn(&pr), &nn(&qr)).unwrap().value;
            prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a));
        }

        #[test]
        fn nll_minus_gen_kl_is_independent_of_rate(
            y in proptest::collection::vec(0.1f64..50.0, 1..10),
            scale1 in 0.1f64..5.0,
            scale2 in 0.1f64..5.0,
        ) {
            let u1: Vec<f64> = y.iter().map(|v| v * scale1).collect();
            let u2: Vec<f64> = y.iter().map(|v| v * scale2 + 0.3).collect();
            let (y, u1, u2) = (nn(&y), nn(&u1), nn(&u2));
            let d1 = nll_approx(&y, &u1).unwrap().value - gen_kl(&y, &u1).unwrap().value;
            let d2 = nll_approx(&y, &u2).unwrap().value - gen_kl(&y, &u2).unwrap().value;
            prop_assert!((d1 - d2).abs() < 1e-9 * (1.0 + d1.abs()));
        }

        #[test]
        fn snll_symmetric_and_dominates_sym_kl((y, u) in pos_pair()) {
            let (yv, uv) = (nn(&y), nn(&u));
            let a = snll(&yv, &uv).unwrap().value;
            let b = snll(&uv, &yv).unwrap().value;
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
            let condition = y.iter().zip(&u).all(|(yi, ui)| *yi >= 1.0 / (4.0 * PI * PI * ui));
            if condition {
                prop_assert!(a + 1e-10 >= sym_kl(&yv, &uv).unwrap().value);
            }
        }

        #[test]
        fn inequality_chain_on_subnormalized((p, q) in pos_pair(), sp in 0.05f64..1.0, sq in 0.05f64..1.0) {
            let np: f64 = p.iter().sum();
            let nq: f64 = q.iter().sum();
            let p: Vec<f64> = p.iter().map(|v| v * sp / np).collect();
            let q: Vec<f64> = q.iter().map(|v| v * sq / nq).collect();
            let (p, q) = (nn(&p), nn(&q));
            let v = total_variation(&p, &q).unwrap().value;
            let d = delta(&p, &q).unwrap().value;
            let j = jsd(&p, &q).unwrap().value;
            prop_assert!(0.5 * v * v <= d + 1e-10);
            prop_assert!(d <= 4.0 * j + 1e-10);
            prop_assert!(j <= 0.25 * sym_kl(&p, &q).unwrap().value + 1e-10);
        }
    }
}

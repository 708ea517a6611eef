//! Physically realizable sensing matrices.
//!
//! A Bernoulli matrix `Z` with entries `−√((1−p)/p)` (probability `p`) or
//! `+√(p/(1−p))` (probability `1−p`) has zero-mean unit-variance entries, so
//! `Φ̃ = Z/√N` satisfies the RIP with high probability. The measurement
//! matrix
//!
//! ```text
//! Φ = √(p(1−p)/N) · Φ̃ + ((1−p)/N) · 1
//! ```
//!
//! maps every negative entry of `Φ̃` to exactly `0` and every positive entry
//! to exactly `1/N`, for any `p`, so `Φ` is non-negative and each column
//! sums to at most one.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::math::{abs, sqrt};
use crate::rng::rng_from_seed;
use crate::transforms::OrthonormalBasis;

/// Default cap on the number of supports `estimate_ric` will enumerate.
pub const DEFAULT_SUPPORT_CAP: u128 = 1_000_000;

/// Tolerance used to validate the two admissible entries of `Φ`.
const ENTRY_TOL: f64 = 1e-15;

/// The RIP-bearing matrix `Φ̃ = Z/√N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RipMatrix {
    entries: Matrix,
    p: f64,
}

impl RipMatrix {
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Wrap an existing matrix, checking that entries take the two
    /// admissible values for `p`.
    pub fn from_entries(entries: Matrix, p: f64) -> Result<Self> {
        check_p(p)?;
        let n = entries.rows() as f64;
        let (neg, pos) = two_point(p, n);
        let ok = entries
            .as_slice()
            .iter()
            .all(|&v| abs(v - neg) <= 1e-12 * abs(neg) || abs(v - pos) <= 1e-12 * abs(pos));
        if !ok {
            return Err(Error::InvalidParam("entries are not a scaled Bernoulli matrix"));
        }
        Ok(Self { entries, p })
    }
}

/// The non-negative, flux-preserving measurement matrix `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    entries: Matrix,
    source: RipMatrix,
}

impl SensingMatrix {
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn source(&self) -> &RipMatrix {
        &self.source
    }

    pub fn p(&self) -> f64 {
        self.source.p
    }

    /// Number of measurements `N`.
    pub fn measurements(&self) -> usize {
        self.entries.rows()
    }

    /// Signal dimension `m`.
    pub fn signal_dim(&self) -> usize {
        self.entries.cols()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.entries.mul_vec(x)
    }
}

/// δ for one sparsity order, with the number of supports examined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicEstimate {
    pub order: usize,
    pub delta: f64,
    pub supports_checked: u128,
}

/// `A = ΦΨ` together with its RIP companion `B = Φ̃Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMatrices {
    pub effective: Matrix,
    pub companion: Matrix,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParam("p must lie in (0, 1)"));
    }
    Ok(())
}

/// The (negative, positive) entries of `Φ̃` for `N` rows.
fn two_point(p: f64, n: f64) -> (f64, f64) {
    let s = sqrt(n);
    (-sqrt((1.0 - p) / p) / s, sqrt(p / (1.0 - p)) / s)
}

/// Draw `Φ̃ ∈ ℝ^{N×m}` from the seeded stream.
pub fn sample_rip_matrix(n: usize, m: usize, p: f64, seed: u64) -> Result<RipMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParam("matrix dimensions must be positive"));
    }
    check_p(p)?;
    let (neg, pos) = two_point(p, n as f64);
    let mut rng = rng_from_seed(seed);
    let entries = Matrix::from_fn(n, m, |_, _| if rng.random::<f64>() < p { neg } else { pos });
    Ok(RipMatrix { entries, p })
}

/// Map `Φ̃` onto the 0 / (1/N) measurement matrix and validate it.
pub fn build_phi(zt: RipMatrix) -> SensingMatrix {
    let n = zt.entries.rows() as f64;
    let p = zt.p;
    let scale = sqrt(p * (1.0 - p) / n);
    let offset = (1.0 - p) / n;
    let hi = 1.0 / n;
    let entries = Matrix::from_fn(zt.entries.rows(), zt.entries.cols(), |i, j| {
        let v = zt.entries[(i, j)];
        let affine = scale * v + offset;
        let exact = if v < 0.0 { 0.0 } else { hi };
        debug_assert!(abs(affine - exact) <= ENTRY_TOL.max(4.0 * f64::EPSILON * hi));
        exact
    });
    let phi = SensingMatrix { entries, source: zt };
    debug_assert!(validate_phi(&phi).is_ok());
    phi
}

/// Check non-negativity, the two-point entry set and flux preservation.
pub fn validate_phi(phi: &SensingMatrix) -> Result<()> {
    let e = &phi.entries;
    let hi = 1.0 / e.rows() as f64;
    if e
        .as_slice()
        .iter()
        .any(|&v| !(abs(v) <= ENTRY_TOL || abs(v - hi) <= ENTRY_TOL))
    {
        return Err(Error::Domain("sensing matrix entries must be 0 or 1/N"));
    }
    for j in 0..e.cols() {
        let col: f64 = (0..e.rows()).map(|i| e[(i, j)]).sum();
        if col > 1.0 + 1e-12 {
            return Err(Error::Domain("sensing matrix column sum exceeds one"));
        }
    }
    Ok(())
}

/// Exhaustive restricted isometry constant of order `2s` over every
/// `2s`-column support of `b`.
pub fn estimate_ric(b: &Matrix, s: usize) -> Result<RicEstimate> {
    estimate_ric_with_cap(b, s, DEFAULT_SUPPORT_CAP)
}

pub fn estimate_ric_with_cap(b: &Matrix, s: usize, cap: u128) -> Result<RicEstimate> {
    let m = b.cols();
    let order = 2 * s;
    if s == 0 || order > m {
        return Err(Error::InvalidParam("need 1 <= 2s <= number of columns"));
    }
    let supports = binomial(m, order);
    if supports > cap {
        return Err(Error::TooManySupports { supports, cap });
    }
    let mut support: Vec<usize> = (0..order).collect();
    let mut delta = 0.0f64;
    let mut checked = 0u128;
    loop {
        let ev = symmetric_eigenvalues(&b.column_gram(&support))?;
        let (lo, hi) = (ev[0], ev[order - 1]);
        delta = delta.max(abs(hi - 1.0)).max(abs(1.0 - lo));
        checked += 1;
        if !next_combination(&mut support, m) {
            break;
        }
    }
    Ok(RicEstimate {
        order,
        delta,
        supports_checked: checked,
    })
}

/// Advance a sorted k-subset of `0..n` to the next one in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `A = ΦΨ` and `B = Φ̃Ψ`.
pub fn compose_effective(phi: &SensingMatrix, basis: &OrthonormalBasis) -> Result<EffectiveMatrices> {
    let psi = basis.matrix();
    Ok(EffectiveMatrices {
        effective: phi.entries.matmul(&psi)?,
        companion: phi.source.entries.matmul(&psi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn half_probability_entries_are_signed_unit() {
        let zt = sample_rip_matrix(16, 9, 0.5, 3).unwrap();
        let a = 1.0 / 4.0;
        assert!(zt.entries().as_slice().iter().all(|&v| v == a || v == -a));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_rip_matrix(10, 20, 0.5, 99).unwrap();
        let b = sample_rip_matrix(10, 20, 0.5, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_rip_matrix(10, 20, 0.5, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn positive_fraction_concentrates() {
        let zt = sample_rip_matrix(400, 100, 0.5, 11).unwrap();
        let pos = zt.entries().as_slice().iter().filter(|&&v| v > 0.0).count();
        let frac = pos as f64 / 40_000.0;
        assert!((0.45..=0.55).contains(&frac), "{frac}");
    }

    #[test]
    fn invalid_params() {
        assert!(sample_rip_matrix(0, 3, 0.5, 0).is_err());
        assert!(sample_rip_matrix(3, 3, 1.0, 0).is_err());
        assert!(sample_rip_matrix(3, 3, 0.0, 0).is_err());
    }

    #[test]
    fn phi_maps_signs_to_zero_and_inverse_n() {
        for &p in &[0.5, 0.3, 0.8] {
            let zt = sample_rip_matrix(12, 30, p, 5).unwrap();
            let phi = build_phi(zt.clone());
            validate_phi(&phi).unwrap();
            for i in 0..12 {
                for j in 0..30 {
                    let want = if zt.entries()[(i, j)] < 0.0 { 0.0 } else { 1.0 / 12.0 };
                    assert_eq!(phi.entries()[(i, j)], want);
                }
            }
        }
    }

    #[test]
    fn flux_is_preserved() {
        let phi = build_phi(sample_rip_matrix(20, 50, 0.5, 8).unwrap());
        let x: Vec<f64> = (0..50).map(|j| (j * 37 % 11) as f64).collect();
        let y = phi.apply(&x).unwrap();
        assert!(y.iter().sum::<f64>() <= x.iter().sum::<f64>() + 1e-12);
        assert!(y.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn ric_of_orthonormal_is_zero() {
        let b = Matrix::identity(6);
        for s in 1..=3 {
            let r = estimate_ric(&b, s).unwrap();
            assert!(r.delta < 1e-14);
            assert_eq!(r.supports_checked, binomial(6, 2 * s));
        }
    }

    #[test]
    fn ric_of_duplicated_column_is_at_least_one() {
        let mut b = Matrix::identity(5);
        for i in 0..5 {
            b[(i, 4)] = b[(i, 0)];
        }
        assert!(estimate_ric(&b, 1).unwrap().delta >= 1.0 - 1e-12);
    }

    #[test]
    fn ric_cap_and_params() {
        let b = Matrix::identity(30);
        assert!(matches!(
            estimate_ric_with_cap(&b, 5, 1000),
            Err(Error::TooManySupports { .. })
        ));
        assert!(estimate_ric(&b, 0).is_err());
        assert!(estimate_ric(&Matrix::identity(3), 2).is_err());
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut c, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(4, 5), 0);
    }

    #[test]
    fn identity_basis_composition_is_phi() {
        let phi = build_phi(sample_rip_matrix(8, 10, 0.5, 1).unwrap());
        let eff = compose_effective(&phi, &OrthonormalBasis::identity(10)).unwrap();
        assert_eq!(&eff.effective, phi.entries());
        assert_eq!(&eff.companion, phi.source().entries());
    }
}

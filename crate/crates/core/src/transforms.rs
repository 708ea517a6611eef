//! Sparsifying bases and the overlapping-patch pipeline.
//!
//! Patches are vectorized row-major. The 2-D DCT basis is the Kronecker
//! product of two orthonormal DCT-II matrices, stored densely (49×49 for the
//! default 7×7 patch).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Identity,
    Dct2 { rows: usize, cols: usize },
}

/// Orthonormal basis `Ψ`: `x = Ψθ` (synthesis), `θ = Ψᵀx` (analysis).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    kind: BasisKind,
    dim: usize,
    // None for the identity
    psi: Option<Matrix>,
}

impl OrthonormalBasis {
    pub fn identity(dim: usize) -> Self {
        Self {
            kind: BasisKind::Identity,
            dim,
            psi: None,
        }
    }

    /// 2-D orthonormal DCT-II on `rows × cols` patches.
    pub fn dct2(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParam("patch dimensions must be positive"));
        }
        let cr = dct_matrix(rows);
        let cc = dct_matrix(cols);
        let dim = rows * cols;
        // column (k, l) holds the basis image cr[k, ·] ⊗ cc[l, ·]
        let psi = Matrix::from_fn(dim, dim, |pix, coef| {
            let (i, j) = (pix / cols, pix % cols);
            let (k, l) = (coef / cols, coef % cols);
            cr[(k, i)] * cc[(l, j)]
        });
        Ok(Self {
            kind: BasisKind::Dct2 { rows, cols },
            dim,
            psi: Some(psi),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.psi.is_none()
    }

    /// Dense `Ψ`.
    pub fn matrix(&self) -> Matrix {
        match &self.psi {
            Some(m) => m.clone(),
            None => Matrix::identity(self.dim),
        }
    }

    pub fn synthesize(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check(theta.len())?;
        Ok(match &self.psi {
            Some(m) => m.mul_vec_unchecked(theta),
            None => theta.to_vec(),
        })
    }

    pub fn analyze(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x.len())?;
        Ok(match &self.psi {
            Some(m) => m.mul_vec_transposed_unchecked(x),
            None => x.to_vec(),
        })
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: len,
            });
        }
        Ok(())
    }
}

/// Orthonormal DCT-II matrix `C`, `C[k, i] = a_k cos(π(2i+1)k / 2n)`.
fn dct_matrix(n: usize) -> Matrix {
    let nf = n as f64;
    Matrix::from_fn(n, n, |k, i| {
        let a = if k == 0 { sqrt(1.0 / nf) } else { sqrt(2.0 / nf) };
        a * libm::cos(PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf))
    })
}

/// Grid of square `patch × patch` windows placed every `stride` pixels.
///
/// When `stride` does not divide `image − patch`, a final window flush with
/// the bottom/right edge is added so every pixel is covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGrid {
    pub image_h: usize,
    pub image_w: usize,
    pub patch: usize,
    pub stride: usize,
}

impl PatchGrid {
    pub fn new(image_h: usize, image_w: usize, patch: usize, stride: usize) -> Result<Self> {
        if patch == 0 || patch > image_h.min(image_w) {
            return Err(Error::InvalidParam("patch must fit inside the image"));
        }
        if stride == 0 {
            return Err(Error::InvalidParam("stride must be at least 1"));
        }
        Ok(Self {
            image_h,
            image_w,
            patch,
            stride,
        })
    }

    fn offsets(len: usize, patch: usize, stride: usize) -> Vec<usize> {
        let last = len - patch;
        let mut v: Vec<usize> = (0..=last).step_by(stride).collect();
        if *v.last().unwrap() != last {
            v.push(last);
        }
        v
    }

    /// Top-left corners of every patch, row-major.
    pub fn origins(&self) -> Vec<(usize, usize)> {
        let rows = Self::offsets(self.image_h, self.patch, self.stride);
        let cols = Self::offsets(self.image_w, self.patch, self.stride);
        rows.iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .collect()
    }

    pub fn patch_count(&self) -> usize {
        self.origins().len()
    }

    /// Number of patches covering each pixel.
    pub fn coverage(&self) -> Vec<usize> {
        let mut cov = vec![0usize; self.image_h * self.image_w];
        for (r, c) in self.origins() {
            for i in 0..self.patch {
                for j in 0..self.patch {
                    cov[(r + i) * self.image_w + c + j] += 1;
                }
            }
        }
        cov
    }
}

/// Vectorized patches of a row-major image.
pub fn extract_patches(image: &[f64], grid: &PatchGrid) -> Result<Vec<Vec<f64>>> {
    if image.len() != grid.image_h * grid.image_w {
        return Err(Error::DimensionMismatch {
            expected: grid.image_h * grid.image_w,
            actual: image.len(),
        });
    }
    let p = grid.patch;
    Ok(grid
        .origins()
        .into_iter()
        .map(|(r, c)| {
            let mut v = Vec::with_capacity(p * p);
            for i in 0..p {
                let start = (r + i) * grid.image_w + c;
                v.extend_from_slice(&image[start..start + p]);
            }
            v
        })
        .collect())
}

/// Average overlapping patch estimates back into an image.
pub fn reassemble(patches: &[Vec<f64>], grid: &PatchGrid) -> Result<Vec<f64>> {
    let origins = grid.origins();
    if patches.len() != origins.len() {
        return Err(Error::DimensionMismatch {
            expected: origins.len(),
            actual: patches.len(),
        });
    }
    let p = grid.patch;
    let mut acc = vec![0.0; grid.image_h * grid.image_w];
    let mut cov = vec![0usize; acc.len()];
    for (patch, &(r, c)) in patches.iter().zip(&origins) {
        if patch.len() != p * p {
            return Err(Error::DimensionMismatch {
                expected: p * p,
                actual: patch.len(),
            });
        }
        for i in 0..p {
            for j in 0..p {
                let k = (r + i) * grid.image_w + c + j;
                acc[k] += patch[i * p + j];
                cov[k] += 1;
            }
        }
    }
    Ok(acc
        .into_iter()
        .zip(cov)
        .map(|(a, n)| a / n as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn dct_basis_is_orthonormal() {
        for side in [1usize, 2, 3, 7] {
            let b = OrthonormalBasis::dct2(side, side).unwrap();
            let psi = b.matrix();
            let g = psi.transpose().matmul(&psi).unwrap();
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut s = 3u64;
        for b in [OrthonormalBasis::identity(49), OrthonormalBasis::dct2(7, 7).unwrap()] {
            let theta: Vec<f64> = (0..49).map(|_| lcg(&mut s)).collect();
            let x = b.synthesize(&theta).unwrap();
            let back = b.analyze(&x).unwrap();
            for (a, c) in theta.iter().zip(&back) {
                assert!((a - c).abs() < 1e-12);
            }
            let n1: f64 = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n2: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n1 - n2).abs() < 1e-12);
        }
        let id = OrthonormalBasis::identity(3);
        assert_eq!(id.synthesize(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(id.analyze(&[1.0]).is_err());
    }

    #[test]
    fn constant_patch_has_only_dc() {
        let b = OrthonormalBasis::dct2(7, 7).unwrap();
        let theta = b.analyze(&[2.5; 49]).unwrap();
        assert!((theta[0] - 7.0 * 2.5).abs() < 1e-12);
        assert!(theta[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn patch_counts_and_coverage() {
        let g = PatchGrid::new(8, 8, 7, 1).unwrap();
        assert_eq!(g.patch_count(), 4);
        let g = PatchGrid::new(20, 20, 7, 1).unwrap();
        let cov = g.coverage();
        assert_eq!(cov[0], 1);
        assert_eq!(cov[10 * 20 + 10], 49);
        let g = PatchGrid::new(64, 64, 7, 3).unwrap();
        assert_eq!(g.patch_count(), 400);
        assert!(g.coverage().iter().all(|&c| c >= 1));
        let g = PatchGrid::new(10, 10, 7, 2).unwrap();
        assert!(g.coverage().iter().all(|&c| c >= 1));
        assert!(PatchGrid::new(5, 5, 7, 1).is_err());
        assert!(PatchGrid::new(9, 9, 7, 0).is_err());
    }

    #[test]
    fn reassembly_inverts_extraction() {
        let mut s = 9u64;
        let img: Vec<f64> = (0..13 * 11).map(|_| lcg(&mut s)).collect();
        for stride in [1, 2, 3] {
            let g = PatchGrid::new(13, 11, 7, stride).unwrap();
            let patches = extract_patches(&img, &g).unwrap();
            let back = reassemble(&patches, &g).unwrap();
            for (a, b) in img.iter().zip(&back) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let g = PatchGrid::new(8, 8, 7, 1).unwrap();
        assert!(extract_patches(&[0.0; 10], &g).is_err());
        assert!(reassemble(&[vec![0.0; 49]], &g).is_err());
    }
}

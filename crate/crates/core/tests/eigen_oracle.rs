use nalgebra::{DMatrix, SymmetricEigen};
use poisson_cs_core::linalg::symmetric_eigenvalues;
use poisson_cs_core::rng::rng_from_seed;
use poisson_cs_core::sensing::{build_phi, compose_effective, estimate_ric, sample_rip_matrix};
use poisson_cs_core::{Matrix, OrthonormalBasis};
use rand::Rng;

fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn oracle_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(to_nalgebra(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn jacobi_matches_nalgebra_on_random_symmetric_matrices() {
    let mut rng = rng_from_seed(11);
    for trial in 0..20 {
        let n = 2 + trial % 9;
        let raw: Vec<f64> = (0..n * n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let sym = Matrix::from_fn(n, n, |i, j| 0.5 * (raw[i * n + j] + raw[j * n + i]));
        let ours = symmetric_eigenvalues(&sym).unwrap();
        let theirs = oracle_eigenvalues(&sym);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }
}

fn oracle_ric(b: &Matrix, s: usize) -> f64 {
    let nb = to_nalgebra(b);
    let m = b.cols();
    let k = 2 * s;
    let mut delta = 0.0f64;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let cols: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
        let sub = nb.select_columns(&cols);
        let ev = SymmetricEigen::new(sub.transpose() * &sub).eigenvalues;
        let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        delta = delta.max(hi - 1.0).max(1.0 - lo);
    }
    delta
}

#[test]
fn ric_matches_brute_force_oracle() {
    for seed in 0..20u64 {
        let (n, m, s) = (12 + (seed as usize % 5), 8, 1 + (seed as usize % 2));
        let p = [0.5, 0.3, 0.7][seed as usize % 3];
        let phi = build_phi(sample_rip_matrix(n, m, p, seed).unwrap());
        let b = compose_effective(&phi, &OrthonormalBasis::identity(m)).unwrap().companion;
        let est = estimate_ric(&b, s).unwrap();
        let oracle = oracle_ric(&b, s);
        assert!((est.delta - oracle).abs() < 1e-10, "seed {seed}: {} vs {oracle}", est.delta);
    }
}

#[test]
fn dct_basis_is_orthonormal_by_oracle() {
    let psi = to_nalgebra(&OrthonormalBasis::dct2(5, 5).unwrap().matrix());
    let gram = psi.transpose() * &psi;
    assert!((gram - DMatrix::<f64>::identity(25, 25)).amax() < 1e-12);
}

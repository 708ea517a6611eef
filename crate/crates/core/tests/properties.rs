use poisson_cs_core::divergences::{jsd, sqjsd};
use poisson_cs_core::rng::rng_from_seed;
use poisson_cs_core::sensing::{build_phi, compose_effective, sample_rip_matrix, validate_phi};
use poisson_cs_core::simulate::{measure, sparse_signal};
use poisson_cs_core::solvers::{fit_value_and_gradient, lambda_noise_level, solve_penalized};
use poisson_cs_core::stats::percentile;
use poisson_cs_core::{FitTerm, NonNegVector, OrthonormalBasis, SolverConfig};
use proptest::prelude::*;

fn positive_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..20.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_entries_follow_the_affine_map(n in 2usize..30, m in 1usize..30, p in 0.05f64..0.95, seed: u64) {
        let zt = sample_rip_matrix(n, m, p, seed).unwrap();
        let phi = build_phi(zt.clone());
        prop_assert!(validate_phi(&phi).is_ok());
        let scale = (p * (1.0 - p) / n as f64).sqrt();
        let offset = (1.0 - p) / n as f64;
        for (e, z) in phi.entries().as_slice().iter().zip(zt.entries().as_slice()) {
            prop_assert!((e - (scale * z + offset)).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_flux_never_exceeds_signal_flux(x in positive_vec(12), seed: u64) {
        let phi = build_phi(sample_rip_matrix(10, 12, 0.5, seed).unwrap());
        let u = phi.apply(&x).unwrap();
        prop_assert!(u.iter().sum::<f64>() <= x.iter().sum::<f64>() * (1.0 + 1e-12));
        prop_assert!(u.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn sqjsd_is_symmetric_and_bounded(p in positive_vec(6), q in positive_vec(6)) {
        let (pv, qv) = (NonNegVector::new(p).unwrap(), NonNegVector::new(q).unwrap());
        let a = sqjsd(&pv, &qv).unwrap().value;
        let b = sqjsd(&qv, &pv).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
        let j = jsd(&pv, &qv).unwrap().value;
        prop_assert!(j >= 0.0 && j <= 0.5 * core::f64::consts::LN_2 * (pv.l1_norm() + qv.l1_norm()) + 1e-12);
    }

    #[test]
    fn fit_gradients_match_central_differences(y in positive_vec(5), u in positive_vec(5), which in 0usize..3) {
        let fit = [FitTerm::jsd(), FitTerm::snll(), FitTerm::gen_kl()][which];
        let (_, g) = fit_value_and_gradient(&fit, &y, &u).unwrap();
        for i in 0..u.len() {
            let h = 1e-6 * u[i].max(1.0);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (fit_value_and_gradient(&fit, &y, &up).unwrap().0 - fit_value_and_gradient(&fit, &y, &dn).unwrap().0) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "{} vs {}", fd, g[i]);
        }
    }

    #[test]
    fn percentile_is_monotone_in_q(v in proptest::collection::vec(-100.0f64..100.0, 1..40), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(percentile(&v, lo) <= percentile(&v, hi));
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(percentile(&v, 0.0), min);
        prop_assert_eq!(percentile(&v, 1.0), max);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn penalized_objective_never_increases(seed: u64, which in 0usize..3, mult in 0.01f64..10.0) {
        let fit = [FitTerm::jsd(), FitTerm::snll(), FitTerm::gen_kl()][which];
        let (n, m) = (12, 24);
        let phi = build_phi(sample_rip_matrix(n, m, 0.5, seed).unwrap());
        let basis = OrthonormalBasis::identity(m);
        let a = compose_effective(&phi, &basis).unwrap().effective;
        let x = sparse_signal(m, 3, 1e5, &mut rng_from_seed(seed ^ 1)).unwrap();
        let y = measure(&phi, &x, seed ^ 2).unwrap().counts_f64();
        let lam = mult * lambda_noise_level(&a, &y, fit).unwrap();
        let r = solve_penalized(&a, &basis, &y, fit, lam, &SolverConfig::default()).unwrap();
        for w in r.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{} -> {}", w[0], w[1]);
        }
        prop_assert!(r.theta_star.iter().all(|&t| t >= 0.0));
    }
}

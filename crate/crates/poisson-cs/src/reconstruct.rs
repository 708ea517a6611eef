//! One reconstruction from one measurement vector.

use poisson_cs_core::solvers::{
    lambda_grid, lambda_noise_level, rrmse, solve_constrained, solve_penalized, ConstrainedConfig,
};
use poisson_cs_core::stats::{choose_epsilon, monte_carlo_sqjsd, EpsilonMode};
use poisson_cs_core::{
    FitKind, FitTerm, Matrix, NonNegVector, OrthonormalBasis, SensingMatrix, SolveResult, SolverConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spec::{EpsilonChoice, Estimator, ExperimentSpec, LambdaMode, SolverSettings};

/// What a solve produced, scored against the true signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub rrmse: f64,
    pub converged: bool,
    pub iterations: usize,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(skip)]
    pub estimate: Vec<f64>,
}

pub fn solver_config(settings: &SolverSettings, nonneg_default: bool, intensity: f64) -> SolverConfig {
    SolverConfig {
        max_iters: settings.max_iters,
        grad_tol: settings.grad_tol,
        objective_tol: settings.objective_tol,
        nonneg_signal: settings.nonneg_signal.unwrap_or(nonneg_default),
        nonneg_coefficients: settings.nonneg_coefficients,
        enforce_intensity: settings.enforce_intensity.then_some(intensity),
        acceleration: settings.acceleration,
        ..SolverConfig::default()
    }
}

pub fn fit_for(estimator: Estimator, beta: f64) -> Result<FitTerm> {
    let kind = match estimator {
        Estimator::ConstrainedJsd | Estimator::PenalizedJsd => FitKind::Jsd,
        Estimator::PenalizedSnll => FitKind::Snll,
        Estimator::PenalizedGenKl => FitKind::GenKl,
    };
    Ok(FitTerm::new(kind, beta)?)
}

/// Radius `ε` for the constrained estimator.
///
/// The percentile rule needs `√J` samples at the unknown signal; they are
/// drawn at the constant signal carrying the measured flux instead, relying
/// on the intensity-independence of `√J`.
pub fn epsilon_for(spec: &ExperimentSpec, phi: &SensingMatrix, y: &[f64], seed: u64) -> Result<f64> {
    let n = phi.measurements();
    match spec.epsilon_mode {
        EpsilonChoice::Theory => Ok(choose_epsilon(EpsilonMode::Theory, n, None)?),
        EpsilonChoice::Percentile => {
            let m = phi.signal_dim();
            let ones = NonNegVector::new(vec![1.0; m])?;
            let base: f64 = phi.apply(&ones)?.iter().sum();
            let flux: f64 = y.iter().sum();
            let c = if base > 0.0 { flux / base } else { 0.0 };
            let x0 = NonNegVector::new(vec![c; m])?;
            let samples = monte_carlo_sqjsd(phi, &x0, spec.percentile_trials, seed)?;
            Ok(choose_epsilon(EpsilonMode::Percentile, n, Some(&samples))?)
        }
    }
}

/// Solve for `x` from `y` with the spec's estimator and score the result.
///
/// `a` is the effective matrix `ΦΨ`; `x` is the true signal in pixel space.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct(
    spec: &ExperimentSpec,
    phi: &SensingMatrix,
    a: &Matrix,
    basis: &OrthonormalBasis,
    x: &[f64],
    y: &[f64],
    cfg: &SolverConfig,
    epsilon_seed: u64,
) -> Result<Outcome> {
    let fit = fit_for(spec.estimator, spec.solver.beta)?;
    let score = |r: &SolveResult| -> Result<(f64, Vec<f64>)> {
        let est = basis.synthesize(&r.theta_star)?;
        Ok((rrmse(x, &est)?, est))
    };
    match spec.estimator {
        Estimator::ConstrainedJsd => {
            let epsilon = epsilon_for(spec, phi, y, epsilon_seed)?;
            let ccfg = ConstrainedConfig {
                beta: spec.solver.beta,
                tolerance: spec.solver.bisection_tol,
                max_bisections: spec.solver.max_bisections,
                ..ConstrainedConfig::default()
            };
            let r = solve_constrained(a, basis, y, epsilon, cfg, &ccfg)?;
            let (e, estimate) = score(&r)?;
            Ok(Outcome {
                rrmse: e,
                converged: r.converged,
                iterations: r.iterations,
                lambda: r.lambda_used,
                epsilon: Some(epsilon),
                estimate,
            })
        }
        _ => {
            let lambdas = match &spec.lambda_mode {
                LambdaMode::Fixed { value } => vec![*value],
                LambdaMode::Omniscient {
                    lo_decades,
                    hi_decades,
                    points,
                } => lambda_grid(lambda_noise_level(a, y, fit)?, *lo_decades, *hi_decades, *points),
            };
            let mut best: Option<Outcome> = None;
            for lam in lambdas {
                let r = solve_penalized(a, basis, y, fit, lam, cfg)?;
                let (e, estimate) = score(&r)?;
                if best.as_ref().is_none_or(|b| e < b.rrmse) {
                    best = Some(Outcome {
                        rrmse: e,
                        converged: r.converged,
                        iterations: r.iterations,
                        lambda: Some(lam),
                        epsilon: None,
                        estimate,
                    });
                }
            }
            Ok(best.expect("lambda grid is non-empty"))
        }
    }
}

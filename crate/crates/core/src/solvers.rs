//! l1-regularized reconstruction.
//!
//! The penalized problem
//!
//! ```text
//! minimize  λ‖θ‖₁ + fit(y, Aθ)        A = ΦΨ
//! ```
//!
//! is solved by proximal gradient with backtracking, optionally accelerated
//! (FISTA) with a monotone restart. The data fit is the JSD, the symmetrized
//! Stirling NLL, or the generalized KL, each optionally smoothed by an offset
//! `β` applied to both arguments.
//!
//! The SQJSD-constrained problem `minimize ‖θ‖₁ s.t. √J(y, Aθ) ≤ ε` is solved
//! by bisection on `log λ`: the fit of the penalized solution is monotone in
//! `λ`, so the constrained solution is the penalized one whose SQJSD meets `ε`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::divergences::{jsd_raw, jsd_term, snll_term};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::math::{abs, exp, ln, sqrt};
use crate::transforms::OrthonormalBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    Jsd,
    Snll,
    GenKl,
}

/// Data-fit choice with its smoothing offset `β ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTerm {
    pub kind: FitKind,
    pub beta: f64,
}

impl FitTerm {
    pub fn new(kind: FitKind, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParam("beta must be finite and non-negative"));
        }
        Ok(Self { kind, beta })
    }

    pub fn jsd() -> Self {
        Self { kind: FitKind::Jsd, beta: 0.0 }
    }

    pub fn snll() -> Self {
        Self { kind: FitKind::Snll, beta: 0.0 }
    }

    pub fn gen_kl() -> Self {
        Self { kind: FitKind::GenKl, beta: 0.0 }
    }

    /// Whether a measurement enters the fit. With `β = 0` the likelihood
    /// fits cannot use zero counts and drop them; the JSD keeps them.
    pub fn uses_measurement(&self, y: f64) -> bool {
        match self.kind {
            FitKind::Jsd => true,
            FitKind::Snll | FitKind::GenKl => self.beta > 0.0 || y > 0.0,
        }
    }

    /// Value, derivative and second derivative of one coordinate's term in
    /// the offset variables `a = y + β`, `b = u + β`.
    #[inline]
    fn term(&self, y: f64, u: f64) -> Result<(f64, f64, f64)> {
        let a = y + self.beta;
        let b = u + self.beta;
        if !(b >= 0.0) {
            return Err(Error::Domain("fitted rate plus offset must be positive"));
        }
        match self.kind {
            FitKind::Jsd => {
                if a == 0.0 {
                    // ½ b log 2 for every b >= 0
                    return Ok((0.5 * LN_2 * b, 0.5 * LN_2, 0.0));
                }
                if b == 0.0 {
                    return Err(Error::Domain("fitted rate plus offset must be positive"));
                }
                let s = a + b;
                Ok((jsd_term(a, b), 0.5 * ln(2.0 * b / s), 0.5 * a / (b * s)))
            }
            FitKind::GenKl => {
                if a == 0.0 {
                    return Ok((b, 1.0, 0.0));
                }
                if b == 0.0 {
                    return Err(Error::Domain("fitted rate plus offset must be positive"));
                }
                Ok((a * ln(a / b) - a + b, 1.0 - a / b, a / (b * b)))
            }
            FitKind::Snll => {
                if a <= 0.0 || b == 0.0 {
                    return Err(Error::Domain("snll needs positive counts and rates"));
                }
                let value = snll_term(a, b);
                let grad = ln(b / a) + 1.0 - a / b + 0.5 / b;
                let curv = 1.0 / b + a / (b * b) - 0.5 / (b * b);
                Ok((value, grad, curv))
            }
        }
    }
}

/// Value and exact gradient with respect to `u` of `fit(y, u)`.
pub fn fit_value_and_gradient(fit: &FitTerm, y: &[f64], u: &[f64]) -> Result<(f64, Vec<f64>)> {
    if y.len() != u.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: u.len(),
        });
    }
    let mut value = 0.0;
    let mut grad = vec![0.0; y.len()];
    for (i, (&yi, &ui)) in y.iter().zip(u).enumerate() {
        let (v, g, _) = fit.term(yi, ui)?;
        value += v;
        grad[i] = g;
    }
    Ok((value, grad))
}

/// `sign(vᵢ) · max(|vᵢ| − t, 0)`.
pub fn soft_threshold(v: &[f64], t: f64) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let m = abs(x) - t;
            if m > 0.0 {
                m.copysign(x)
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Gradient-mapping tolerance, in units of `λ` (sup norm).
    pub grad_tol: f64,
    /// Relative objective change tolerance over 5 consecutive iterations.
    pub objective_tol: f64,
    /// Initial step; `None` picks `1/L̂` from the curvature at the start.
    pub step_init: Option<f64>,
    pub backtrack_factor: f64,
    /// Keep `Ψθ ⪰ 0`. Exact for the identity basis; one clamp-and-reanalyze
    /// pass after the shrinkage otherwise.
    pub nonneg_signal: bool,
    /// Keep `θ ⪰ 0`.
    pub nonneg_coefficients: bool,
    /// Rescale the result so that `‖Ψθ‖₁` equals this intensity.
    pub enforce_intensity: Option<f64>,
    pub acceleration: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-7,
            objective_tol: 1e-8,
            step_init: None,
            backtrack_factor: 0.5,
            nonneg_signal: true,
            nonneg_coefficients: false,
            enforce_intensity: None,
            acceleration: true,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParam("max_iters must be at least 1"));
        }
        if !(self.grad_tol > 0.0) || !(self.objective_tol > 0.0) {
            return Err(Error::InvalidParam("tolerances must be positive"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidParam("backtrack factor must lie in (0, 1)"));
        }
        if let Some(s) = self.step_init {
            if !(s > 0.0) {
                return Err(Error::InvalidParam("initial step must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub theta_star: Vec<f64>,
    /// Objective after every accepted step, starting with the initial point.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `√J(y, Aθ⋆) − ε` for the constrained problem.
    pub constraint_residual: Option<f64>,
    pub lambda_used: Option<f64>,
    /// Data fit at `θ⋆`.
    pub fit_value: f64,
}

/// Measurements restricted to the rows the fit uses.
struct Problem<'a> {
    a: Matrix,
    y: Vec<f64>,
    fit: FitTerm,
    basis: &'a OrthonormalBasis,
}

impl<'a> Problem<'a> {
    fn new(a: &Matrix, basis: &'a OrthonormalBasis, y: &[f64], fit: FitTerm) -> Result<Self> {
        if a.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                actual: y.len(),
            });
        }
        if a.cols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                actual: a.cols(),
            });
        }
        if y.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain("measurements must be finite and non-negative"));
        }
        let rows: Vec<usize> = (0..y.len()).filter(|&i| fit.uses_measurement(y[i])).collect();
        let mut data = Vec::with_capacity(rows.len() * a.cols());
        for &i in &rows {
            data.extend_from_slice(a.row(i));
        }
        Ok(Self {
            a: Matrix::from_row_major(rows.len(), a.cols(), data)?,
            y: rows.iter().map(|&i| y[i]).collect(),
            fit,
            basis,
        })
    }

    fn dim(&self) -> usize {
        self.a.cols()
    }

    /// Fit value at `θ`, or `None` outside the domain.
    fn value(&self, theta: &[f64]) -> Option<f64> {
        let u = self.a.mul_vec_unchecked(theta);
        let mut acc = 0.0;
        for (&yi, &ui) in self.y.iter().zip(&u) {
            acc += self.fit.term(yi, ui).ok()?.0;
        }
        Some(acc)
    }

    /// Fit value and θ-gradient `Aᵀ ∇ᵤ fit`.
    fn value_grad(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let u = self.a.mul_vec_unchecked(theta);
        let (v, gu) = fit_value_and_gradient(&self.fit, &self.y, &u)?;
        Ok((v, self.a.mul_vec_transposed_unchecked(&gu)))
    }

    /// `1/L̂` with `L̂ = ‖A‖² · maxᵢ fit''(uᵢ)` at `θ`.
    fn initial_step(&self, theta: &[f64]) -> f64 {
        let u = self.a.mul_vec_unchecked(theta);
        let curv = self
            .y
            .iter()
            .zip(&u)
            .filter_map(|(&yi, &ui)| self.fit.term(yi, ui).ok().map(|t| t.2))
            .fold(0.0, f64::max);
        let l = self.a.spectral_norm_sq(200) * curv;
        if l > 0.0 && l.is_finite() {
            1.0 / l
        } else {
            1.0
        }
    }

    /// Constant signal whose fitted rates carry the measured flux.
    fn feasible_start(&self) -> Result<Vec<f64>> {
        let ones = self.basis.analyze(&vec![1.0; self.basis.dim()])?;
        let u1 = self.a.mul_vec_unchecked(&ones);
        let flux: f64 = self.y.iter().sum();
        let base: f64 = u1.iter().sum();
        let c = if flux > 0.0 && base > 0.0 { flux / base } else { 1.0 };
        let theta: Vec<f64> = ones.iter().map(|v| v * c).collect();
        match self.value(&theta) {
            Some(v) if v.is_finite() => Ok(theta),
            _ => Err(Error::InfeasibleStart),
        }
    }

    fn prox(&self, v: &[f64], t: f64, cfg: &SolverConfig) -> Vec<f64> {
        let mut theta = soft_threshold(v, t);
        if cfg.nonneg_coefficients || (cfg.nonneg_signal && self.basis.is_identity()) {
            theta.iter_mut().for_each(|x| *x = x.max(0.0));
        } else if cfg.nonneg_signal {
            if let Ok(mut x) = self.basis.synthesize(&theta) {
                x.iter_mut().for_each(|v| *v = v.max(0.0));
                if let Ok(back) = self.basis.analyze(&x) {
                    theta = back;
                }
            }
        }
        theta
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| abs(*x)).sum()
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParam("lambda must be positive and finite"));
    }
    Ok(())
}

/// Penalized reconstruction from the constant feasible start.
pub fn solve_penalized(
    a: &Matrix,
    basis: &OrthonormalBasis,
    y: &[f64],
    fit: FitTerm,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    solve_penalized_from(a, basis, y, fit, lambda, cfg, None)
}

/// Penalized reconstruction from `init` (falls back to the constant start
/// when `init` lies outside the fit's domain).
pub fn solve_penalized_from(
    a: &Matrix,
    basis: &OrthonormalBasis,
    y: &[f64],
    fit: FitTerm,
    lambda: f64,
    cfg: &SolverConfig,
    init: Option<&[f64]>,
) -> Result<SolveResult> {
    validate_lambda(lambda)?;
    cfg.validate()?;
    let problem = Problem::new(a, basis, y, fit)?;
    let start = match init {
        Some(t) if t.len() == problem.dim() && problem.value(t).is_some() => t.to_vec(),
        _ => problem.feasible_start()?,
    };
    let mut result = proximal_gradient(&problem, lambda, cfg, start)?;
    if let Some(target) = cfg.enforce_intensity {
        let x = basis.synthesize(&result.theta_star)?;
        let total = l1(&x);
        if total > 0.0 {
            result.theta_star.iter_mut().for_each(|v| *v *= target / total);
            if let Some(f) = problem.value(&result.theta_star) {
                result.fit_value = f;
            }
        }
    }
    Ok(result)
}

fn proximal_gradient(p: &Problem<'_>, lambda: f64, cfg: &SolverConfig, start: Vec<f64>) -> Result<SolveResult> {
    let objective = |theta: &[f64], fit: f64| fit + lambda * l1(theta);

    let mut theta = start;
    let mut fit_theta = p.value(&theta).ok_or(Error::InfeasibleStart)?;
    let mut f_theta = objective(&theta, fit_theta);
    let mut trace = vec![f_theta];

    let mut step = cfg.step_init.unwrap_or_else(|| p.initial_step(&theta));
    let step_floor = step * 1e-30;
    let mut z = theta.clone();
    let mut momentum = 1.0;
    let mut quiet = 0usize;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let (fz, gz) = match p.value_grad(&z) {
            Ok(v) => v,
            Err(_) => {
                z.clone_from(&theta);
                momentum = 1.0;
                p.value_grad(&z)?
            }
        };

        // backtracking on the quadratic upper model at z
        let (cand, fit_cand) = loop {
            let v: Vec<f64> = z.iter().zip(&gz).map(|(zi, gi)| zi - step * gi).collect();
            let cand = p.prox(&v, step * lambda, cfg);
            if let Some(fc) = p.value(&cand) {
                let mut lin = 0.0;
                let mut sq = 0.0;
                for ((c, zi), gi) in cand.iter().zip(&z).zip(&gz) {
                    let d = c - zi;
                    lin += gi * d;
                    sq += d * d;
                }
                if fc <= fz + lin + sq / (2.0 * step) + 1e-12 * abs(fz) {
                    break (cand, fc);
                }
            }
            step *= cfg.backtrack_factor;
            if step < step_floor {
                break (theta.clone(), fit_theta);
            }
        };
        if step < step_floor {
            break;
        }

        let f_cand = objective(&cand, fit_cand);
        let mapping = cand
            .iter()
            .zip(&z)
            .map(|(c, zi)| abs(zi - c) / step)
            .fold(0.0, f64::max);

        if f_cand > f_theta + 1e-12 * abs(f_theta) {
            // monotone restart: drop the momentum and retry from θ
            if cfg.acceleration && z != theta {
                z.clone_from(&theta);
                momentum = 1.0;
                continue;
            }
            // a plain prox-gradient step could not decrease F any further
            converged = true;
            break;
        }

        let rel = abs(f_theta - f_cand) / abs(f_cand).max(1e-300);
        let prev = core::mem::replace(&mut theta, cand);
        fit_theta = fit_cand;
        f_theta = f_cand;
        trace.push(f_theta);

        if cfg.acceleration {
            let next = 0.5 * (1.0 + sqrt(1.0 + 4.0 * momentum * momentum));
            let w = (momentum - 1.0) / next;
            z = theta.iter().zip(&prev).map(|(t, q)| t + w * (t - q)).collect();
            momentum = next;
        } else {
            z.clone_from(&theta);
        }

        quiet = if rel < cfg.objective_tol { quiet + 1 } else { 0 };
        if quiet >= 5 || mapping <= cfg.grad_tol * lambda {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        theta_star: theta,
        objective_trace: trace,
        iterations,
        converged,
        constraint_residual: None,
        lambda_used: Some(lambda),
        fit_value: fit_theta,
    })
}

/// `‖∇ fit‖∞` at the constant feasible start, the scale of useful `λ`.
pub fn lambda_scale(a: &Matrix, basis: &OrthonormalBasis, y: &[f64], fit: FitTerm) -> Result<f64> {
    let p = Problem::new(a, basis, y, fit)?;
    let theta0 = p.feasible_start()?;
    let (_, g) = p.value_grad(&theta0)?;
    Ok(g.iter().map(|v| abs(*v)).fold(0.0, f64::max))
}

/// Noise-level penalty: `√(2 ln m) · maxⱼ ‖A_{·j} ⊙ σ‖₂`, where `σᵢ` is the
/// Poisson standard deviation of the fit gradient at `u = y`.
pub fn lambda_noise_level(a: &Matrix, y: &[f64], fit: FitTerm) -> Result<f64> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: y.len(),
        });
    }
    // d fit / du ≈ c (u − y)/u near the fit, with Var(y) = u
    let c = match fit.kind {
        FitKind::Jsd => 0.25,
        FitKind::GenKl => 1.0,
        FitKind::Snll => 2.0,
    };
    // an empty bin carries no Poisson spread
    let sigma: Vec<f64> = y
        .iter()
        .map(|&v| {
            let a = v + fit.beta;
            if a > 0.0 {
                c / sqrt(a.max(1.0))
            } else {
                0.0
            }
        })
        .collect();
    let mut best = 0.0f64;
    for j in 0..a.cols() {
        let s: f64 = (0..a.rows())
            .map(|i| {
                let v = a[(i, j)] * sigma[i];
                v * v
            })
            .sum();
        best = best.max(sqrt(s));
    }
    Ok(best * sqrt(2.0 * ln(a.cols().max(2) as f64)))
}

/// Log-spaced penalties `reference · 10^k` for `k` evenly spaced in
/// `[lo_decades, hi_decades]`.
pub fn lambda_grid(reference: f64, lo_decades: f64, hi_decades: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![reference * exp(lo_decades * core::f64::consts::LN_10)];
    }
    (0..points)
        .map(|k| {
            let d = lo_decades + (hi_decades - lo_decades) * k as f64 / (points - 1) as f64;
            reference * exp(d * core::f64::consts::LN_10)
        })
        .collect()
}

/// Settings for the SQJSD-constrained solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedConfig {
    /// Offset applied inside the JSD.
    pub beta: f64,
    /// Accept `|√J − ε| ≤ tolerance · ε`.
    pub tolerance: f64,
    pub max_bisections: usize,
    /// Upper end of the λ bracket as a multiple of [`lambda_scale`].
    pub lambda_hi_scale: f64,
    /// Lower end of the λ bracket relative to the upper end.
    pub lambda_lo_ratio: f64,
}

impl Default for ConstrainedConfig {
    fn default() -> Self {
        Self {
            beta: 0.0,
            tolerance: 0.01,
            max_bisections: 40,
            lambda_hi_scale: 1e2,
            lambda_lo_ratio: 1e-10,
        }
    }
}

/// `√J(y + β, Aθ + β)`; infinite when a fitted rate is negative.
fn sqjsd_at(p: &Problem<'_>, theta: &[f64]) -> f64 {
    let beta = p.fit.beta;
    let u = p.a.mul_vec_unchecked(theta);
    if u.iter().any(|v| !(*v + beta >= 0.0)) {
        return f64::INFINITY;
    }
    let a: Vec<f64> = p.y.iter().map(|v| v + beta).collect();
    let b: Vec<f64> = u.iter().map(|v| v + beta).collect();
    jsd_raw(&a, &b).map(sqrt).unwrap_or(f64::INFINITY)
}

/// `minimize ‖θ‖₁ s.t. √J(y + β, Aθ + β) ≤ ε` by bisection on `log λ`,
/// warm-starting each penalized solve from the previous one.
pub fn solve_constrained(
    a: &Matrix,
    basis: &OrthonormalBasis,
    y: &[f64],
    epsilon: f64,
    cfg: &SolverConfig,
    ccfg: &ConstrainedConfig,
) -> Result<SolveResult> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParam("epsilon must be positive and finite"));
    }
    if !(ccfg.tolerance > 0.0) {
        return Err(Error::InvalidParam("bisection tolerance must be positive"));
    }
    cfg.validate()?;
    let fit = FitTerm::new(FitKind::Jsd, ccfg.beta)?;
    let p = Problem::new(a, basis, y, fit)?;
    let hit = |s: f64| abs(s - epsilon) <= ccfg.tolerance * epsilon;

    let finish = |mut r: SolveResult, s: f64, converged: bool| {
        r.constraint_residual = Some(s - epsilon);
        r.converged = r.converged && converged;
        r
    };

    // θ = 0 is the unconstrained l1 minimizer; take it whenever it is feasible
    let zero = vec![0.0; p.dim()];
    let s_zero = sqjsd_at(&p, &zero);
    if s_zero <= epsilon {
        let fit_value = s_zero * s_zero;
        return Ok(SolveResult {
            theta_star: zero,
            objective_trace: vec![0.0],
            iterations: 0,
            converged: true,
            constraint_residual: Some(s_zero - epsilon),
            lambda_used: None,
            fit_value,
        });
    }

    let scale = lambda_scale(a, basis, y, fit)?;
    if !(scale > 0.0) {
        return Err(Error::InfeasibleStart);
    }
    let mut hi = ccfg.lambda_hi_scale * scale;
    let mut lo = hi * ccfg.lambda_lo_ratio;

    let solve = |lambda: f64, init: Option<&[f64]>| solve_penalized_from(a, basis, y, fit, lambda, cfg, init);

    let r_lo = solve(lo, None)?;
    let s_lo = sqjsd_at(&p, &r_lo.theta_star);
    if s_lo > epsilon * (1.0 + ccfg.tolerance) {
        return Err(Error::InfeasibleEpsilon {
            epsilon,
            achievable: s_lo,
        });
    }
    if hit(s_lo) {
        return Ok(finish(r_lo, s_lo, true));
    }

    let mut r_hi = solve(hi, Some(&r_lo.theta_star))?;
    let mut s_hi = sqjsd_at(&p, &r_hi.theta_star);
    // widen until the heavy end violates the constraint
    let mut widen = 0;
    while s_hi <= epsilon && widen < 10 {
        if hit(s_hi) {
            return Ok(finish(r_hi, s_hi, true));
        }
        lo = hi;
        hi *= 100.0;
        let next = solve(hi, Some(&r_hi.theta_star))?;
        s_hi = sqjsd_at(&p, &next.theta_star);
        r_hi = next;
        widen += 1;
        if s_hi <= epsilon && widen == 10 {
            return Ok(finish(r_hi, s_hi, false));
        }
    }
    if hit(s_hi) {
        return Ok(finish(r_hi, s_hi, true));
    }

    let mut best = r_lo;
    let mut s_best = s_lo;
    if lo > best.lambda_used.unwrap_or(0.0) {
        best = solve(lo, Some(&r_hi.theta_star))?;
        s_best = sqjsd_at(&p, &best.theta_star);
    }
    let mut warm = best.theta_star.clone();
    for _ in 0..ccfg.max_bisections {
        let mid = sqrt(lo * hi);
        let r = solve(mid, Some(&warm))?;
        let s = sqjsd_at(&p, &r.theta_star);
        warm.clone_from(&r.theta_star);
        if hit(s) {
            return Ok(finish(r, s, true));
        }
        if s > epsilon {
            hi = mid;
        } else {
            lo = mid;
            best = r;
            s_best = s;
        }
    }
    Ok(finish(best, s_best, false))
}

/// `‖x − x⋆‖₂ / ‖x‖₂`.
pub fn rrmse(x: &[f64], x_star: &[f64]) -> Result<f64> {
    if x.len() != x_star.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: x_star.len(),
        });
    }
    let nx = norm2(x);
    if !(nx > 0.0) {
        return Err(Error::InvalidParam("reference signal has zero norm"));
    }
    let d: Vec<f64> = x.iter().zip(x_star).map(|(a, b)| a - b).collect();
    Ok(norm2(&d) / nx)
}

/// `½ log 2π`, the Stirling constant per measurement.
pub const HALF_LOG_2PI: f64 = 0.918_938_533_204_672_8;

//! Experiment descriptions, loaded from JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SweepIntensity,
    SweepMeasurements,
    SweepSparsity,
    VerifyStats,
    ImageRecon,
}

impl ExperimentKind {
    pub fn is_sweep(self) -> bool {
        matches!(self, Self::SweepIntensity | Self::SweepMeasurements | Self::SweepSparsity)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::SweepIntensity => "sweep-intensity",
            Self::SweepMeasurements => "sweep-measurements",
            Self::SweepSparsity => "sweep-sparsity",
            Self::VerifyStats => "verify-stats",
            Self::ImageRecon => "image-recon",
        }
    }
}

/// Reconstruction problem solved per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `min ‖θ‖₁ s.t. √J(y, Aθ) ≤ ε`.
    ConstrainedJsd,
    PenalizedJsd,
    PenalizedSnll,
    PenalizedGenKl,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Self::ConstrainedJsd => "constrained-jsd",
            Self::PenalizedJsd => "penalized-jsd",
            Self::PenalizedSnll => "penalized-snll",
            Self::PenalizedGenKl => "penalized-gen-kl",
        }
    }
}

/// Penalty selection for the penalized estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum LambdaMode {
    /// Oracle selection: best RRMSE against the true signal over a log grid
    /// spanning `10^lo_decades .. 10^hi_decades` times the noise-level λ.
    Omniscient { lo_decades: f64, hi_decades: f64, points: usize },
    Fixed { value: f64 },
}

impl Default for LambdaMode {
    fn default() -> Self {
        Self::Omniscient {
            lo_decades: -4.0,
            hi_decades: 1.0,
            points: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonChoice {
    #[default]
    Theory,
    Percentile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub intensities: Vec<f64>,
    pub measurements: Vec<usize>,
    pub sparsities: Vec<usize>,
    /// Signal length; `None` means 100 for sweeps and `2N` for verify-stats.
    pub signal_dim: Option<usize>,
    /// Bernoulli parameter of the sensing matrix.
    pub bernoulli_p: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            intensities: vec![1e8],
            measurements: vec![50],
            sparsities: vec![5],
            signal_dim: None,
            bernoulli_p: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub objective_tol: f64,
    pub acceleration: bool,
    /// `None` keeps `Ψθ ⪰ 0` for 1-D sweeps and drops it for images.
    pub nonneg_signal: Option<bool>,
    pub nonneg_coefficients: bool,
    /// Rescale each estimate to the true intensity.
    pub enforce_intensity: bool,
    pub beta: f64,
    /// Relative tolerance on `√J = ε` for the constrained estimator.
    pub bisection_tol: f64,
    pub max_bisections: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-7,
            objective_tol: 1e-8,
            acceleration: true,
            nonneg_signal: None,
            nonneg_coefficients: false,
            enforce_intensity: false,
            beta: 0.0,
            bisection_tol: 0.01,
            max_bisections: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageSettings {
    /// Side of the centered square crop; `None` uses the whole image.
    pub crop: Option<usize>,
    pub patch: usize,
    pub stride: usize,
    /// Image-level penalty multipliers of the per-patch noise-level λ,
    /// chosen omnisciently.
    pub lambda_multipliers: Vec<f64>,
    /// Bit depth of the written reconstructions.
    pub output_bits: u8,
}

impl Default for ImageSettings {
    fn default() -> Self {
        Self {
            crop: Some(64),
            patch: 7,
            stride: 3,
            lambda_multipliers: vec![1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0],
            output_bits: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub grid: Grid,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_estimator")]
    pub estimator: Estimator,
    #[serde(default)]
    pub lambda_mode: LambdaMode,
    #[serde(default)]
    pub epsilon_mode: EpsilonChoice,
    /// Monte-Carlo draws behind a percentile ε.
    #[serde(default = "default_percentile_trials")]
    pub percentile_trials: usize,
    /// KS significance level for verify-stats.
    #[serde(default = "default_alpha")]
    pub ks_alpha: f64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub image: ImageSettings,
    /// Write every sensing matrix under `matrices/`.
    #[serde(default)]
    pub save_matrices: bool,
}

/// Overlay `patch` onto `base`, recursing into objects.
fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

fn default_estimator() -> Estimator {
    Estimator::ConstrainedJsd
}

fn default_percentile_trials() -> usize {
    1000
}

fn default_alpha() -> f64 {
    0.01
}

impl ExperimentSpec {
    /// Desk-scale defaults for `kind`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let grid = match kind {
            ExperimentKind::SweepIntensity => Grid {
                intensities: vec![1e4, 1e6, 1e8],
                ..Grid::default()
            },
            ExperimentKind::SweepMeasurements => Grid {
                measurements: vec![20, 50, 100],
                ..Grid::default()
            },
            ExperimentKind::SweepSparsity => Grid {
                sparsities: vec![1, 3, 5, 7, 10],
                ..Grid::default()
            },
            ExperimentKind::VerifyStats => Grid {
                intensities: vec![1e3, 1e4, 1e6],
                measurements: vec![50, 100, 500],
                ..Grid::default()
            },
            ExperimentKind::ImageRecon => Grid {
                intensities: vec![1e4, 1e6, 1e8],
                measurements: vec![25],
                ..Grid::default()
            },
        };
        let (estimator, trials) = match kind {
            ExperimentKind::VerifyStats => (Estimator::ConstrainedJsd, 1000),
            ExperimentKind::ImageRecon => (Estimator::PenalizedJsd, 1),
            _ => (Estimator::ConstrainedJsd, 10),
        };
        Self {
            kind,
            grid,
            trials,
            master_seed: 0,
            estimator,
            lambda_mode: LambdaMode::default(),
            epsilon_mode: EpsilonChoice::Theory,
            percentile_trials: default_percentile_trials(),
            ks_alpha: default_alpha(),
            solver: SolverSettings::default(),
            image: ImageSettings::default(),
            save_matrices: false,
        }
    }

    /// Restore the full-size settings: five intensity levels, uncropped
    /// images with stride 1, and 10⁴ Monte-Carlo draws.
    pub fn into_full_scale(mut self) -> Self {
        match self.kind {
            ExperimentKind::SweepIntensity => self.grid.intensities = vec![1e4, 1e5, 1e6, 1e7, 1e8],
            ExperimentKind::VerifyStats => {
                self.trials = self.trials.max(10_000);
                self.grid.intensities = vec![1e3, 1e4, 1e5, 1e6, 1e7, 1e8];
            }
            ExperimentKind::ImageRecon => {
                self.image.crop = None;
                self.image.stride = 1;
                self.grid.intensities = vec![1e4, 1e5, 1e6, 1e7, 1e8];
            }
            _ => {}
        }
        if self.kind.is_sweep() {
            self.trials = self.trials.max(10);
        }
        self
    }

    /// Parse a spec; fields left out take the defaults of its `kind`.
    pub fn from_json(text: &str) -> Result<Self> {
        let given: serde_json::Value = serde_json::from_str(text)?;
        let kind: ExperimentKind = match given.get("kind") {
            Some(k) => serde_json::from_value(k.clone())?,
            None => return Err(Error::Spec("missing field `kind`".into())),
        };
        let mut merged = serde_json::to_value(Self::defaults(kind))?;
        merge(&mut merged, given);
        let spec: Self = serde_json::from_value(merged)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Spec(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let g = &self.grid;
        if g.intensities.is_empty() || g.measurements.is_empty() || g.sparsities.is_empty() {
            return bad("grid lists must be non-empty");
        }
        if g.intensities.iter().any(|i| !(*i > 0.0) || !i.is_finite()) {
            return bad("intensities must be positive");
        }
        if g.measurements.contains(&0) || g.sparsities.contains(&0) {
            return bad("measurements and sparsities must be positive");
        }
        if !(g.bernoulli_p > 0.0 && g.bernoulli_p < 1.0) {
            return bad("bernoulli_p must lie in (0, 1)");
        }
        if let Some(m) = g.signal_dim {
            if m == 0 {
                return bad("signal_dim must be positive");
            }
            if self.kind.is_sweep() && g.sparsities.iter().any(|&s| s > m) {
                return bad("sparsity exceeds signal_dim");
            }
        }
        match &self.lambda_mode {
            LambdaMode::Omniscient { points, lo_decades, hi_decades } => {
                if *points == 0 || !(lo_decades <= hi_decades) {
                    return bad("omniscient grid needs points >= 1 and lo <= hi");
                }
            }
            LambdaMode::Fixed { value } => {
                if !(*value > 0.0) {
                    return bad("fixed lambda must be positive");
                }
            }
        }
        if self.kind == ExperimentKind::VerifyStats && self.trials < 2 {
            return bad("verify-stats needs at least 2 trials");
        }
        if self.kind == ExperimentKind::ImageRecon {
            let im = &self.image;
            if im.patch == 0 || im.stride == 0 || im.lambda_multipliers.is_empty() {
                return bad("image patch, stride and multipliers must be non-empty");
            }
            if im.output_bits != 8 && im.output_bits != 16 {
                return bad("output_bits must be 8 or 16");
            }
            if im.lambda_multipliers.iter().any(|v| !(*v > 0.0)) {
                return bad("lambda multipliers must be positive");
            }
        }
        if !(self.ks_alpha > 0.0 && self.ks_alpha < 1.0) {
            return bad("ks_alpha must lie in (0, 1)");
        }
        Ok(())
    }

    /// Signal length used for `measurements` in this experiment.
    pub fn signal_dim_for(&self, measurements: usize) -> usize {
        match (self.grid.signal_dim, self.kind) {
            (Some(m), _) => m,
            (None, ExperimentKind::VerifyStats) => 2 * measurements,
            (None, ExperimentKind::ImageRecon) => self.image.patch * self.image.patch,
            (None, _) => 100,
        }
    }
}

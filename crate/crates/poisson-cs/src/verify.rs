//! Monte-Carlo checks of the SQJSD mean, variance and tail bounds.

use std::path::Path;

use poisson_cs_core::rng::{derive_seed, rng_from_seed, streams};
use poisson_cs_core::sensing::{build_phi, sample_rip_matrix};
use poisson_cs_core::simulate::sparse_signal;
use poisson_cs_core::stats::{ks_gaussian_test, log_log_slope, monte_carlo_sqjsd, sqjsd_bounds};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::spec::{ExperimentKind, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub mean_bound: f64,
    /// `None` when the bound is infinite.
    pub var_bound: Option<f64>,
    pub tail_epsilon: f64,
    pub tail_prob: f64,
    pub s_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct StatsCell {
    pub N: usize,
    pub m: usize,
    pub I: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub var: f64,
    pub p99: f64,
    /// Samples above the tail radius.
    pub tail_exceedances: usize,
    pub ks_statistic: Option<f64>,
    pub ks_critical: Option<f64>,
    pub ks_pass: Option<bool>,
    pub bounds: BoundsReport,
}

impl StatsCell {
    pub fn mean_within_bound(&self) -> bool {
        self.mean <= self.bounds.mean_bound
    }
}

/// Log-log slopes against `N` at one intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub intensity: f64,
    pub mean_slope: f64,
    pub p99_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub library_version: String,
    pub spec: ExperimentSpec,
    pub cells: Vec<StatsCell>,
    pub slopes: Vec<SlopeRow>,
}

impl StatsReport {
    pub fn cell(&self, n: usize, intensity: f64) -> Option<&StatsCell> {
        self.cells.iter().find(|c| c.N == n && c.I == intensity)
    }
}

/// Statistics for one `(N, I)` cell from seed `seed`.
///
/// The signal is dense: every entry is `U(0.5, 1.5)` before scaling to `I`.
pub fn stats_cell(n: usize, m: usize, intensity: f64, trials: usize, p: f64, alpha: f64, seed: u64) -> Result<StatsCell> {
    let phi = build_phi(sample_rip_matrix(n, m, p, derive_seed(seed, &[streams::MATRIX]))?);
    let mut rng = rng_from_seed(derive_seed(seed, &[streams::SIGNAL]));
    let x = sparse_signal(m, m, intensity, &mut rng)?;
    let samples = monte_carlo_sqjsd(&phi, &x, trials, derive_seed(seed, &[streams::MEASUREMENT]))?;
    let b = sqjsd_bounds(&phi, &x)?;
    let ks = ks_gaussian_test(&samples, alpha).ok();
    Ok(StatsCell {
        N: n,
        m,
        I: intensity,
        trials,
        seed,
        mean: samples.mean(),
        var: samples.variance(),
        p99: samples.percentile(0.99),
        tail_exceedances: samples.samples.iter().filter(|&&v| v > b.tail_epsilon).count(),
        ks_statistic: ks.map(|k| k.statistic),
        ks_critical: ks.map(|k| k.critical),
        ks_pass: ks.map(|k| k.pass),
        bounds: BoundsReport {
            mean_bound: b.mean_bound,
            var_bound: b.var_bound.is_finite().then_some(b.var_bound),
            tail_epsilon: b.tail_epsilon,
            tail_prob: b.tail_prob,
            s_min: b.s_min,
        },
    })
}

pub fn run_verify_stats(spec: &ExperimentSpec) -> Result<StatsReport> {
    spec.validate()?;
    if spec.kind != ExperimentKind::VerifyStats {
        return Err(Error::Spec(format!("{} is not verify-stats", spec.kind.label())));
    }
    let mut jobs = Vec::new();
    for &n in &spec.grid.measurements {
        for &i in &spec.grid.intensities {
            jobs.push((jobs.len(), n, i));
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(k, n, i)| {
            let seed = derive_seed(spec.master_seed, &[k as u64]);
            stats_cell(n, spec.signal_dim_for(n), i, spec.trials, spec.grid.bernoulli_p, spec.ks_alpha, seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut slopes = Vec::new();
    if spec.grid.measurements.len() >= 2 {
        for &i in &spec.grid.intensities {
            let row: Vec<&StatsCell> = cells.iter().filter(|c| c.I == i).collect();
            let ns: Vec<f64> = row.iter().map(|c| c.N as f64).collect();
            let means: Vec<f64> = row.iter().map(|c| c.mean).collect();
            let p99s: Vec<f64> = row.iter().map(|c| c.p99).collect();
            slopes.push(SlopeRow {
                intensity: i,
                mean_slope: log_log_slope(&ns, &means),
                p99_slope: log_log_slope(&ns, &p99s),
            });
        }
    }
    Ok(StatsReport {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        cells,
        slopes,
    })
}

pub const CSV_HEADER: [&str; 17] = [
    "N",
    "m",
    "I",
    "trials",
    "mean",
    "var",
    "p99",
    "tail_exceedances",
    "ks_statistic",
    "ks_critical",
    "ks_pass",
    "mean_bound",
    "var_bound",
    "tail_epsilon",
    "tail_prob",
    "s_min",
    "seed",
];

pub fn write_csv<W: std::io::Write>(report: &StatsReport, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for c in &report.cells {
        csv.write_record([
            c.N.to_string(),
            c.m.to_string(),
            c.I.to_string(),
            c.trials.to_string(),
            c.mean.to_string(),
            c.var.to_string(),
            c.p99.to_string(),
            c.tail_exceedances.to_string(),
            opt(c.ks_statistic),
            opt(c.ks_critical),
            c.ks_pass.map(|b| b.to_string()).unwrap_or_default(),
            c.bounds.mean_bound.to_string(),
            c.bounds.var_bound.map(|v| v.to_string()).unwrap_or_else(|| "inf".into()),
            c.bounds.tail_epsilon.to_string(),
            c.bounds.tail_prob.to_string(),
            c.bounds.s_min.to_string(),
            c.seed.to_string(),
        ])?;
    }
    csv.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

/// Write `stats.csv` and `stats.json` into `dir`.
pub fn write_outputs(report: &StatsReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join("stats.csv");
    write_csv(report, std::fs::File::create(&csv_path).map_err(io_err(&csv_path))?)?;
    let json_path = dir.join("stats.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(report)?).map_err(io_err(&json_path))?;
    Ok(())
}

//! Seeded reconstruction sweeps over intensity, measurements or sparsity.

use std::path::Path;
use std::time::Instant;

use poisson_cs_core::rng::{derive_seed, rng_from_seed, streams};
use poisson_cs_core::sensing::{build_phi, sample_rip_matrix};
use poisson_cs_core::simulate::{measure, sparse_signal};
use poisson_cs_core::stats::percentile;
use poisson_cs_core::OrthonormalBasis;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::matrix_io;
use crate::reconstruct::{reconstruct, solver_config};
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub intensity: f64,
    pub measurements: usize,
    pub sparsity: usize,
    pub signal_dim: usize,
}

/// Cartesian product of the grid, intensity-major.
pub fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let g = &spec.grid;
    let mut out = Vec::new();
    for &intensity in &g.intensities {
        for &measurements in &g.measurements {
            for &sparsity in &g.sparsities {
                out.push(Cell {
                    index: out.len(),
                    intensity,
                    measurements,
                    sparsity,
                    signal_dim: spec.signal_dim_for(measurements),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub rrmse: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Self {
            min: percentile(values, 0.0),
            q25: percentile(values, 0.25),
            median: percentile(values, 0.5),
            q75: percentile(values, 0.75),
            max: percentile(values, 1.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    #[serde(flatten)]
    pub cell: Cell,
    pub trials: usize,
    pub failures: usize,
    pub not_converged: usize,
    /// Over the trials that produced an estimate.
    pub rrmse: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub library_version: String,
    pub spec: ExperimentSpec,
    pub cells: Vec<CellSummary>,
    pub trials: Vec<TrialRecord>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn any_not_converged(&self) -> bool {
        self.cells.iter().any(|c| c.not_converged > 0)
    }

    /// Copy with the timing zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_clock_seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn summary(&self, index: usize) -> Option<&CellSummary> {
        self.cells.get(index)
    }
}

pub fn trial_seed(master: u64, cell: usize, trial: usize) -> u64 {
    derive_seed(master, &[cell as u64, trial as u64])
}

fn run_trial(spec: &ExperimentSpec, cell: &Cell, trial: usize, out: Option<&Path>) -> TrialRecord {
    let seed = trial_seed(spec.master_seed, cell.index, trial);
    let mut record = TrialRecord {
        cell: cell.index,
        trial,
        seed,
        rrmse: None,
        converged: false,
        iterations: 0,
        lambda: None,
        epsilon: None,
        error: None,
    };
    let result = (|| -> Result<_> {
        let rip = sample_rip_matrix(
            cell.measurements,
            cell.signal_dim,
            spec.grid.bernoulli_p,
            derive_seed(seed, &[streams::MATRIX]),
        )?;
        let phi = build_phi(rip);
        if let Some(dir) = out {
            let path = dir.join(format!("cell{}_trial{}.json", cell.index, trial));
            matrix_io::save(&phi, &path)?;
        }
        let mut rng = rng_from_seed(derive_seed(seed, &[streams::SIGNAL]));
        let x = sparse_signal(cell.signal_dim, cell.sparsity, cell.intensity, &mut rng)?;
        let y = measure(&phi, &x, derive_seed(seed, &[streams::MEASUREMENT]))?.counts_f64();
        let basis = OrthonormalBasis::identity(cell.signal_dim);
        let cfg = solver_config(&spec.solver, true, cell.intensity);
        reconstruct(
            spec,
            &phi,
            phi.entries(),
            &basis,
            &x,
            &y,
            &cfg,
            derive_seed(seed, &[streams::EPSILON]),
        )
    })();
    match result {
        Ok(o) => {
            record.rrmse = Some(o.rrmse);
            record.converged = o.converged;
            record.iterations = o.iterations;
            record.lambda = o.lambda;
            record.epsilon = o.epsilon;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Run every (cell, trial) pair in parallel; results are merged in grid order.
///
/// With `out` set and `spec.save_matrices`, each sensing matrix is written
/// to `out/matrices/`.
pub fn run_sweep(spec: &ExperimentSpec, out: Option<&Path>) -> Result<RunManifest> {
    spec.validate()?;
    if !spec.kind.is_sweep() {
        return Err(Error::Spec(format!("{} is not a sweep", spec.kind.label())));
    }
    let start = Instant::now();
    let matrix_dir = match (out, spec.save_matrices) {
        (Some(dir), true) => {
            let d = dir.join("matrices");
            std::fs::create_dir_all(&d).map_err(io_err(&d))?;
            Some(d)
        }
        _ => None,
    };
    let cells = cells(spec);
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .flat_map(|c| (0..spec.trials).map(move |t| (c.index, t)))
        .collect();
    let trials: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(spec, &cells[c], t, matrix_dir.as_deref()))
        .collect();

    let summaries = cells
        .iter()
        .map(|cell| {
            let mine: Vec<&TrialRecord> = trials.iter().filter(|r| r.cell == cell.index).collect();
            let values: Vec<f64> = mine.iter().filter_map(|r| r.rrmse).collect();
            CellSummary {
                cell: *cell,
                trials: mine.len(),
                failures: mine.iter().filter(|r| r.error.is_some()).count(),
                not_converged: mine.iter().filter(|r| r.error.is_none() && !r.converged).count(),
                rrmse: Quantiles::of(&values),
            }
        })
        .collect();

    Ok(RunManifest {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        cells: summaries,
        trials,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

pub const CSV_HEADER: [&str; 14] = [
    "kind",
    "estimator",
    "intensity",
    "measurements",
    "sparsity",
    "signal_dim",
    "trials",
    "failures",
    "not_converged",
    "rrmse_min",
    "rrmse_q25",
    "rrmse_median",
    "rrmse_q75",
    "rrmse_max",
];

/// One row per cell; empty quantile fields when every trial failed.
pub fn write_csv<W: std::io::Write>(manifest: &RunManifest, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CSV_HEADER)?;
    for c in &manifest.cells {
        let q = |f: fn(&Quantiles) -> f64| c.rrmse.as_ref().map(|q| f(q).to_string()).unwrap_or_default();
        csv.write_record([
            manifest.spec.kind.label().to_string(),
            manifest.spec.estimator.label().to_string(),
            c.cell.intensity.to_string(),
            c.cell.measurements.to_string(),
            c.cell.sparsity.to_string(),
            c.cell.signal_dim.to_string(),
            c.trials.to_string(),
            c.failures.to_string(),
            c.not_converged.to_string(),
            q(|q| q.min),
            q(|q| q.q25),
            q(|q| q.median),
            q(|q| q.q75),
            q(|q| q.max),
        ])?;
    }
    csv.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

/// Write `sweep.csv` and `manifest.json` into `dir`.
pub fn write_outputs(manifest: &RunManifest, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join("sweep.csv");
    let f = std::fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    write_csv(manifest, f)?;
    let json_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(&json_path, text).map_err(io_err(&json_path))?;
    Ok(())
}

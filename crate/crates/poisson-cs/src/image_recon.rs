//! Patch-wise image reconstruction in a 2-D DCT basis.
//!
//! One sensing matrix is shared by all patches of a run; each patch gets its
//! own Poisson stream, and the same streams are reused at every intensity.
//! The penalty is chosen omnisciently at the image level: a single multiplier
//! of each patch's noise-level λ, picked for the best image RRMSE.

use std::path::Path;

use poisson_cs_core::rng::{derive_seed, streams};
use poisson_cs_core::sensing::{build_phi, compose_effective, sample_rip_matrix};
use poisson_cs_core::simulate::measure;
use poisson_cs_core::solvers::{lambda_noise_level, rrmse, solve_penalized};
use poisson_cs_core::transforms::{extract_patches, reassemble};
use poisson_cs_core::{NonNegVector, OrthonormalBasis, PatchGrid, SensingMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::matrix_io;
use crate::pgm::{write_pgm, Raster};
use crate::reconstruct::{fit_for, solver_config};
use crate::spec::{ExperimentKind, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageCell {
    pub intensity: f64,
    pub measurements: usize,
    pub patches: usize,
    pub rrmse: f64,
    pub lambda_multiplier: f64,
    pub not_converged: usize,
    pub output: Option<String>,
    #[serde(skip)]
    pub reconstruction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageReport {
    pub library_version: String,
    pub spec: ExperimentSpec,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<ImageCell>,
}

impl ImageReport {
    pub fn any_not_converged(&self) -> bool {
        self.cells.iter().any(|c| c.not_converged > 0)
    }

    pub fn cell(&self, intensity: f64) -> Option<&ImageCell> {
        self.cells.iter().find(|c| c.intensity == intensity)
    }
}

pub fn patch_matrix(spec: &ExperimentSpec, measurements: usize) -> Result<SensingMatrix> {
    let m = spec.image.patch * spec.image.patch;
    let seed = derive_seed(spec.master_seed, &[streams::MATRIX, measurements as u64]);
    Ok(build_phi(sample_rip_matrix(measurements, m, spec.grid.bernoulli_p, seed)?))
}

/// Reconstruct `source` at every intensity and measurement count of `spec`.
///
/// With `out` set, writes `recon_N{N}_I{I}.pgm` and `phi_N{N}.json` there.
pub fn run_image_recon(spec: &ExperimentSpec, source: &Raster, out: Option<&Path>) -> Result<ImageReport> {
    spec.validate()?;
    if spec.kind != ExperimentKind::ImageRecon {
        return Err(Error::Spec(format!("{} is not image-recon", spec.kind.label())));
    }
    if !(source.total() > 0.0) {
        return Err(Error::ZeroImage);
    }
    let img = match spec.image.crop {
        Some(side) => source.center_crop(side)?,
        None => source.clone(),
    };
    let p = spec.image.patch;
    let grid = PatchGrid::new(img.height, img.width, p, spec.image.stride)?;
    let basis = OrthonormalBasis::dct2(p, p)?;
    let fit = fit_for(spec.estimator, spec.solver.beta)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }

    let mut cells = Vec::new();
    for &n in &spec.grid.measurements {
        let phi = patch_matrix(spec, n)?;
        if let Some(dir) = out {
            matrix_io::save(&phi, &dir.join(format!("phi_N{n}.json")))?;
        }
        let a = compose_effective(&phi, &basis)?.effective;
        for &intensity in &spec.grid.intensities {
            let truth = img.with_intensity(intensity)?;
            let patches = extract_patches(&truth.pixels, &grid)?;
            let measured: Vec<(Vec<f64>, f64)> = patches
                .par_iter()
                .enumerate()
                .map(|(k, patch)| {
                    let seed = derive_seed(spec.master_seed, &[streams::MEASUREMENT, n as u64, k as u64]);
                    let y = measure(&phi, &NonNegVector::new(patch.clone())?, seed)?.counts_f64();
                    let lam = lambda_noise_level(&a, &y, fit)?;
                    Ok((y, lam))
                })
                .collect::<Result<_>>()?;
            let cfg = solver_config(&spec.solver, false, 0.0);

            let mut best: Option<ImageCell> = None;
            for &mult in &spec.image.lambda_multipliers {
                let solved: Vec<(Vec<f64>, bool)> = measured
                    .par_iter()
                    .zip(&patches)
                    .map(|((y, lam), patch)| {
                        let r = solve_penalized(&a, &basis, y, fit, mult * lam, &cfg)?;
                        let mut est = basis.synthesize(&r.theta_star)?;
                        if let Some(target) = spec.solver.enforce_intensity.then(|| patch.iter().sum::<f64>()) {
                            let s: f64 = est.iter().map(|v| v.abs()).sum();
                            if s > 0.0 {
                                est.iter_mut().for_each(|v| *v *= target / s);
                            }
                        }
                        Ok((est, r.converged))
                    })
                    .collect::<Result<_>>()?;
                let not_converged = solved.iter().filter(|s| !s.1).count();
                let estimates: Vec<Vec<f64>> = solved.into_iter().map(|s| s.0).collect();
                let recon = reassemble(&estimates, &grid)?;
                let e = rrmse(&truth.pixels, &recon)?;
                if best.as_ref().is_none_or(|b| e < b.rrmse) {
                    best = Some(ImageCell {
                        intensity,
                        measurements: n,
                        patches: patches.len(),
                        rrmse: e,
                        lambda_multiplier: mult,
                        not_converged,
                        output: None,
                        reconstruction: recon,
                    });
                }
            }
            let mut cell = best.expect("multipliers are non-empty");
            if let Some(dir) = out {
                let name = format!("recon_N{n}_I{intensity:e}.pgm");
                let white = truth.pixels.iter().cloned().fold(0.0, f64::max);
                let r = Raster::new(img.width, img.height, cell.reconstruction.clone())?;
                write_pgm(&r, &dir.join(&name), white, spec.image.output_bits)?;
                cell.output = Some(name);
            }
            cells.push(cell);
        }
    }
    Ok(ImageReport {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        width: img.width,
        height: img.height,
        cells,
    })
}

pub const CSV_HEADER: [&str; 6] = ["intensity", "measurements", "patches", "rrmse", "lambda_multiplier", "not_converged"];

pub fn write_csv<W: std::io::Write>(report: &ImageReport, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CSV_HEADER)?;
    for c in &report.cells {
        csv.write_record([
            c.intensity.to_string(),
            c.measurements.to_string(),
            c.patches.to_string(),
            c.rrmse.to_string(),
            c.lambda_multiplier.to_string(),
            c.not_converged.to_string(),
        ])?;
    }
    csv.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

/// Write `image.csv` and `image.json` into `dir`.
pub fn write_outputs(report: &ImageReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join("image.csv");
    write_csv(report, std::fs::File::create(&csv_path).map_err(io_err(&csv_path))?)?;
    let json_path = dir.join("image.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(report)?).map_err(io_err(&json_path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::synthetic_scene;

    fn spec() -> ExperimentSpec {
        let mut s = ExperimentSpec::defaults(ExperimentKind::ImageRecon);
        s.image.crop = Some(16);
        s.image.lambda_multipliers = vec![0.1, 1.0];
        s.grid.intensities = vec![1e8];
        s
    }

    #[test]
    fn small_crop_reconstructs() {
        let r = run_image_recon(&spec(), &synthetic_scene(32, 32), None).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!((r.width, r.height), (16, 16));
        assert!(r.cells[0].rrmse < 0.1, "{}", r.cells[0].rrmse);
        assert_eq!(r.cells[0].reconstruction.len(), 256);
    }

    #[test]
    fn zero_image_is_an_error() {
        let z = Raster::new(16, 16, vec![0.0; 256]).unwrap();
        assert!(matches!(run_image_recon(&spec(), &z, None), Err(Error::ZeroImage)));
    }

    #[test]
    fn writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_image_recon(&spec(), &synthetic_scene(16, 16), Some(dir.path())).unwrap();
        write_outputs(&r, dir.path()).unwrap();
        let name = r.cells[0].output.as_ref().unwrap();
        let back = crate::pgm::read_pgm(&dir.path().join(name)).unwrap();
        assert_eq!((back.width, back.height), (16, 16));
        assert!(dir.path().join("phi_N25.json").exists());
        assert!(dir.path().join("image.json").exists());
    }
}

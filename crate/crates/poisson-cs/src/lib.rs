//! Seeded experiment runner for Poisson compressed sensing with SQJSD.
//!
//! Sweeps write `sweep.csv` and `manifest.json`; `verify-stats` writes
//! `stats.csv` and `stats.json`; image runs write reconstructed PGMs,
//! `image.csv` and `image.json`. Column sets are listed in `docs/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod image_recon;
pub mod matrix_io;
pub mod pgm;
pub mod reconstruct;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use image_recon::{run_image_recon, ImageReport};
pub use spec::{EpsilonChoice, Estimator, ExperimentKind, ExperimentSpec, LambdaMode};
pub use sweep::{run_sweep, RunManifest};
pub use verify::{run_verify_stats, StatsReport};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_cs::pgm::{read_pgm, synthetic_scene};
use poisson_cs::{image_recon, sweep, verify, EpsilonChoice, Estimator, ExperimentKind, ExperimentSpec};

#[derive(Parser)]
#[command(name = "poisson-cs", version, about = "Poisson compressed sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment spec (JSON); missing fields take the desk-scale defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per cell, overriding the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Full-size grids instead of the desk-scale defaults.
    #[arg(long = "paper-scale")]
    full_scale: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Intensity,
    Measurements,
    Sparsity,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    ConstrainedJsd,
    Jsd,
    Snll,
    GenKl,
}

#[derive(Clone, Copy, ValueEnum)]
enum EpsilonArg {
    Theory,
    Percentile,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruction-error sweep over one parameter.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, value_enum)]
        estimator: Option<EstimatorArg>,
        #[arg(long, value_enum)]
        epsilon: Option<EpsilonArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo statistics of the SQJSD against its bounds.
    VerifyStats {
        #[command(flatten)]
        common: Common,
    },
    /// Patch-wise reconstruction of a PGM image.
    Image {
        /// Input PGM; a built-in synthetic scene when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn load_spec(kind: ExperimentKind, common: &Common) -> Result<ExperimentSpec> {
    let mut spec = match &common.config {
        Some(path) => {
            let spec = ExperimentSpec::load(path).with_context(|| format!("loading {}", path.display()))?;
            anyhow::ensure!(
                spec.kind == kind,
                "config describes {} but the command runs {}",
                spec.kind.label(),
                kind.label()
            );
            spec
        }
        None => ExperimentSpec::defaults(kind),
    };
    if common.full_scale {
        spec = spec.into_full_scale();
    }
    if let Some(seed) = common.seed {
        spec.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        spec.trials = trials;
    }
    spec.validate()?;
    Ok(spec)
}

fn report_exit(out: &Path, not_converged: bool) -> ExitCode {
    eprintln!("results written to {}", out.display());
    if not_converged {
        eprintln!("warning: some solves did not converge");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            kind,
            estimator,
            epsilon,
            common,
        } => {
            let kind = match kind {
                SweepKind::Intensity => ExperimentKind::SweepIntensity,
                SweepKind::Measurements => ExperimentKind::SweepMeasurements,
                SweepKind::Sparsity => ExperimentKind::SweepSparsity,
            };
            let mut spec = load_spec(kind, &common)?;
            if let Some(e) = estimator {
                spec.estimator = match e {
                    EstimatorArg::ConstrainedJsd => Estimator::ConstrainedJsd,
                    EstimatorArg::Jsd => Estimator::PenalizedJsd,
                    EstimatorArg::Snll => Estimator::PenalizedSnll,
                    EstimatorArg::GenKl => Estimator::PenalizedGenKl,
                };
            }
            if let Some(e) = epsilon {
                spec.epsilon_mode = match e {
                    EpsilonArg::Theory => EpsilonChoice::Theory,
                    EpsilonArg::Percentile => EpsilonChoice::Percentile,
                };
            }
            let manifest = sweep::run_sweep(&spec, Some(&common.out))?;
            sweep::write_outputs(&manifest, &common.out)?;
            for c in &manifest.cells {
                let median = c.rrmse.map(|q| q.median.to_string()).unwrap_or_else(|| "-".into());
                println!(
                    "I={:e} N={} s={} median_rrmse={} failures={}",
                    c.cell.intensity, c.cell.measurements, c.cell.sparsity, median, c.failures
                );
            }
            Ok(report_exit(&common.out, manifest.any_not_converged()))
        }
        Command::VerifyStats { common } => {
            let spec = load_spec(ExperimentKind::VerifyStats, &common)?;
            let report = verify::run_verify_stats(&spec)?;
            verify::write_outputs(&report, &common.out)?;
            for c in &report.cells {
                println!(
                    "N={} I={:e} mean={:.4} (bound {:.4}) var={:.4} p99={:.4} ks_pass={:?}",
                    c.N, c.I, c.mean, c.bounds.mean_bound, c.var, c.p99, c.ks_pass
                );
            }
            Ok(report_exit(&common.out, false))
        }
        Command::Image { input, common } => {
            let spec = load_spec(ExperimentKind::ImageRecon, &common)?;
            let source = match &input {
                Some(path) => read_pgm(path)?,
                None => synthetic_scene(96, 96),
            };
            let report = image_recon::run_image_recon(&spec, &source, Some(&common.out))?;
            image_recon::write_outputs(&report, &common.out)?;
            for c in &report.cells {
                println!(
                    "I={:e} N={} rrmse={:.5} lambda_multiplier={}",
                    c.intensity, c.measurements, c.rrmse, c.lambda_multiplier
                );
            }
            Ok(report_exit(&common.out, report.any_not_converged()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

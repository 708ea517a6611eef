//! Poisson compressed sensing with the square-root Jensen-Shannon divergence.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`divergences`]: KL, generalized KL, JSD and its square root, total
//!   variation, the triangular discrimination and the likelihood-derived
//!   fit terms, with the `0 log 0 = 0` convention throughout.
//! * [`sensing`]: flux-preserving 0/(1/N) sensing matrices derived from a
//!   Bernoulli RIP matrix, and exhaustive RIC measurement.
//! * [`simulate`]: seeded Poisson measurement `y ~ Poisson(Φx)` and sparse
//!   signal generation.
//! * [`stats`]: Monte-Carlo behaviour of `√J(y, Φx)`, its analytic bounds,
//!   the Gaussian KS test and the choice of the constraint radius.
//! * [`solvers`]: l1-penalized proximal-gradient solvers with JSD, SNLL or
//!   generalized KL data fit, and the SQJSD-constrained problem solved by
//!   bisection on the penalty weight.
//! * [`transforms`]: identity and orthonormal 2-D DCT bases plus overlapping
//!   patch extraction/averaging.
//!
//! File formats, experiment sweeps and the command line live in the
//! companion `poisson-cs` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod divergences;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod rng;
pub mod sensing;
pub mod simulate;
pub mod solvers;
pub mod stats;
pub mod transforms;

pub use divergences::{DivergenceKind, DivergenceValue, NonNegVector};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use sensing::{RicEstimate, RipMatrix, SensingMatrix};
pub use simulate::MeasurementVector;
pub use solvers::{FitKind, FitTerm, SolveResult, SolverConfig};
pub use stats::{SqjsdBounds, SqjsdSampleSet};
pub use transforms::{OrthonormalBasis, PatchGrid};

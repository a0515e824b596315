//! Maximally multipartite entangled states.
//!
//! The crate minimizes the average purity of balanced bipartitions (the
//! potential of multipartite entanglement, π_ME) over pure qubit states and
//! over pure Gaussian states of continuous-variable modes, and measures how
//! far the minimum stays above the ideal bound (frustration).
//!
//! Modules:
//! - [`state`]: pure states, Haar sampling and the purity of one bipartition.
//! - [`bipartition`]: canonical balanced bipartitions.
//! - [`metrics`]: π_ME, σ, typical-state mean, frustration ratio, classification.
//! - [`optimizer`]: annealing plus Riemannian polishing, greedy and random scans.
//! - [`gaussian`]: covariance matrices, symplectic parametrization, constrained minimization.
//! - [`classical`]: the classical three-agent frustration toy model.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipartition;
pub mod classical;
pub mod error;
pub mod export;
pub mod gaussian;
mod kernel;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod par;
pub mod rng;
pub mod state;

pub use bipartition::{enumerate_balanced, Bipartition, BipartitionSet};
pub use error::{Error, Result};
pub use metrics::{
    classify, frustration_ratio, potential, purity_histogram, purity_report, typical_mean,
    variance_sigma, MmesClass, PurityReport,
};
pub use optimizer::{
    gradient, greedy_scan, minimize_potential, minimize_subset, random_scan, OptimizationResult,
    OptimizerConfig, ScanResult,
};
pub use par::Execution;
pub use state::{purity, purity_oracle, random_haar_state, PureState};

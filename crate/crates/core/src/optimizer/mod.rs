//! Minimization of the average purity over pure states.
//!
//! Each restart anneals from a Haar-random start and polishes the best point
//! found with Riemannian L-BFGS. Restarts draw from independent streams split
//! off the configured seed and are merged by argmin (lowest restart index on
//! ties), so results do not depend on the number of worker threads.

mod anneal;
mod config;
mod polish;
pub(crate) mod scan;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use config::OptimizerConfig;
pub use scan::{
    critical_fraction, greedy_scan, random_scan, RandomScanPoint, ScanResult, GREEDY_QUBITS,
};

use crate::bipartition::Bipartition;
use crate::error::{Error, Result};
use crate::kernel::Scratch;
use crate::metrics::{classify, min_balanced_purity, report_for, MmesClass, PurityReport, ReportFile, DEFAULT_BINS};
use crate::objective::{real_dot, PurityObjective};
use crate::par;
use crate::rng::SeedPath;
use crate::state::{haar_from_path, PureState, StateFile};

/// Qubit counts accepted by the minimizers.
pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 10;

/// Best state found by a minimization, with provenance.
#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub best_state: PureState,
    /// Minimized objective (the full potential, or the subset average for
    /// [`minimize_subset`]).
    pub e0_estimate: f64,
    /// Purities on all balanced bipartitions of the best state.
    pub report: PurityReport,
    pub classification: MmesClass,
    /// (iteration, objective) of the winning restart: annealing steps first,
    /// then polishing iterations numbered after them.
    pub objective_trace: Vec<(usize, f64)>,
    pub seed: u64,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub gradient_norm: f64,
    /// False when polishing hit its iteration cap above the gradient tolerance.
    pub converged: bool,
}

impl OptimizationResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ResultFile::from(self))?)
    }
}

/// JSON form of an [`OptimizationResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultFile {
    pub n: usize,
    pub e0: f64,
    pub classification: MmesClass,
    pub seed: u64,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    pub objective_trace: Vec<(usize, f64)>,
    pub report: ReportFile,
    pub state: StateFile,
}

impl From<&OptimizationResult> for ResultFile {
    fn from(r: &OptimizationResult) -> Self {
        Self {
            n: r.best_state.n(),
            e0: r.e0_estimate,
            classification: r.classification,
            seed: r.seed,
            restarts_used: r.restarts_used,
            best_restart: r.best_restart,
            gradient_norm: r.gradient_norm,
            converged: r.converged,
            objective_trace: r.objective_trace.clone(),
            report: ReportFile::from(&r.report),
            state: StateFile::from(&r.best_state),
        }
    }
}

/// Riemannian gradient of π_ME at `state`, tangent to the unit sphere.
pub fn gradient(state: &PureState) -> Result<Vec<Complex64>> {
    let objective = PurityObjective::balanced(state.n())?;
    Ok(objective.riemannian_gradient(state)?.1)
}

fn check_n(n: usize) -> Result<()> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "minimization supports 2..=10 qubits",
        });
    }
    Ok(())
}

/// Minimizes π_ME over normalized states of `n` qubits.
pub fn minimize_potential(n: usize, config: &OptimizerConfig) -> Result<OptimizationResult> {
    check_n(n)?;
    config.validate()?;
    let objective = PurityObjective::balanced(n)?;
    let run = run_restarts(&objective, config, &SeedPath::new(config.seed), None)?;
    finish(&objective, config, run, true)
}

/// Minimizes the mean purity over `subset` only.
pub fn minimize_subset(
    n: usize,
    subset: &[Bipartition],
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    check_n(n)?;
    config.validate()?;
    let objective = PurityObjective::subset(n, subset)?;
    let run = run_restarts(&objective, config, &SeedPath::new(config.seed), None)?;
    finish(&objective, config, run, false)
}

pub(crate) struct RestartRun {
    pub state: Vec<Complex64>,
    pub value: f64,
    pub trace: Vec<(usize, f64)>,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// One restart: polish from `warm` when given, otherwise anneal from a Haar
/// start and polish the chain's best point.
fn single_restart(
    objective: &PurityObjective,
    config: &OptimizerConfig,
    path: &SeedPath,
    warm: Option<&[Complex64]>,
) -> Result<RestartRun> {
    let mut scratch = Scratch::default();
    let (start, mut trace, offset) = match warm {
        Some(w) => (w.to_vec(), Vec::new(), 0),
        None => {
            let mut rng = path.rng();
            let init = haar_from_path(objective.n(), &path.child(0))?;
            let chain = anneal::anneal(objective, init.into_amplitudes(), config, &mut rng, &mut scratch);
            if !chain.best_value.is_finite() {
                return Err(Error::NonFinite { value: chain.best_value });
            }
            (chain.best, chain.trace, config.anneal_steps)
        }
    };
    let out = polish::polish(
        objective,
        start,
        config.polish_max_iters,
        config.polish_tolerance,
        &mut scratch,
    );
    if !out.value.is_finite() {
        return Err(Error::NonFinite { value: out.value });
    }
    log::trace!(
        "polish: {} iterations, value {:.10}, |grad| {:.2e}",
        out.iterations,
        out.value,
        out.gradient_norm
    );
    trace.extend(out.trace.iter().map(|&(i, v)| (i + offset, v)));
    Ok(RestartRun {
        state: out.state,
        value: out.value,
        trace,
        restarts_used: 1,
        best_restart: 0,
        gradient_norm: out.gradient_norm,
        converged: out.converged,
    })
}

/// Runs `config.restarts` restarts in batches and keeps the best.
///
/// With `warm`, restart 0 polishes the warm state and, if `stop_below` is
/// given and reached by it, the fresh restarts are skipped.
pub(crate) fn run_restarts_with(
    objective: &PurityObjective,
    config: &OptimizerConfig,
    path: &SeedPath,
    warm: Option<&PureState>,
    stop_below: Option<f64>,
) -> Result<RestartRun> {
    let mut best: Option<RestartRun> = None;
    let mut used = 0;
    let stop = match (config.target, stop_below) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let reached = |b: &Option<RestartRun>| match (b, stop) {
        (Some(r), Some(t)) => r.value <= t,
        _ => false,
    };

    if let Some(w) = warm {
        let mut run = single_restart(objective, config, &path.child(u64::MAX), Some(w.amplitudes()))?;
        run.best_restart = 0;
        best = Some(run);
        used += 1;
        if reached(&best) {
            let mut b = best.unwrap();
            b.restarts_used = used;
            return Ok(b);
        }
    }

    let mut next = 0;
    while next < config.restarts {
        let count = config.batch_size.min(config.restarts - next);
        let offset = used;
        let batch = par::map_indexed(config.execution, count, |i| {
            let r = next + i;
            single_restart(objective, config, &path.child(r as u64), None).map(|mut run| {
                run.best_restart = offset + i;
                run
            })
        });
        for run in batch {
            let run = run?;
            let better = match &best {
                None => true,
                Some(b) => run.value < b.value,
            };
            if better {
                best = Some(run);
            }
        }
        used += count;
        next += count;
        if reached(&best) {
            break;
        }
    }
    let mut b = best.expect("at least one restart ran");
    b.restarts_used = used;
    Ok(b)
}

pub(crate) fn run_restarts(
    objective: &PurityObjective,
    config: &OptimizerConfig,
    path: &SeedPath,
    warm: Option<&PureState>,
) -> Result<RestartRun> {
    run_restarts_with(objective, config, path, warm, None)
}

fn finish(
    objective: &PurityObjective,
    config: &OptimizerConfig,
    run: RestartRun,
    full: bool,
) -> Result<OptimizationResult> {
    let n = objective.n();
    let best_state = PureState::from_unit(n, run.state);
    let all = if full {
        objective.clone()
    } else {
        PurityObjective::balanced(n)?
    };
    let report = report_for(&all, &best_state, DEFAULT_BINS)?;
    // Re-evaluate on the stored (renormalized) state so e0 matches the report.
    let e0_estimate = if full {
        report.mean
    } else {
        objective.value(best_state.amplitudes(), &mut Scratch::default())
    };
    let classification = if full {
        classify(&report, config.classify_tolerance)?
    } else {
        subset_class(objective, &best_state, e0_estimate, config.classify_tolerance)
    };
    let floor = min_balanced_purity(n);
    if e0_estimate < floor - 1e-9 {
        return Err(Error::NonFinite { value: e0_estimate });
    }
    Ok(OptimizationResult {
        best_state,
        e0_estimate,
        report,
        classification,
        objective_trace: run.trace,
        seed: config.seed,
        restarts_used: run.restarts_used,
        best_restart: run.best_restart,
        gradient_norm: run.gradient_norm,
        converged: run.converged,
    })
}

fn subset_class(objective: &PurityObjective, state: &PureState, mean: f64, tol: f64) -> MmesClass {
    let purities = objective.purities(state.amplitudes(), &mut Scratch::default());
    let spread = purities.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / purities.len() as f64;
    if mean <= min_balanced_purity(objective.n()) + tol {
        MmesClass::Perfect
    } else if spread.sqrt() <= tol {
        MmesClass::UniformlyOptimal
    } else {
        MmesClass::Frustrated
    }
}

/// Norm of a tangent vector.
pub fn tangent_norm(v: &[Complex64]) -> f64 {
    real_dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random_haar_state;

    fn quick(seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: 4,
            anneal_steps: 200,
            ..OptimizerConfig::default()
        }
        .with_seed(seed)
    }

    #[test]
    fn two_qubits_reach_bell_minimum() {
        let r = minimize_potential(2, &quick(1)).unwrap();
        assert!((r.e0_estimate - 0.5).abs() < 1e-8, "{}", r.e0_estimate);
        assert_eq!(r.classification, MmesClass::Perfect);
    }

    #[test]
    fn three_qubits_are_perfect() {
        let r = minimize_potential(3, &quick(2)).unwrap();
        assert!((r.e0_estimate - 0.5).abs() < 1e-6, "{}", r.e0_estimate);
        assert_eq!(r.classification, MmesClass::Perfect);
        assert!((r.e0_estimate - r.report.mean).abs() < 1e-12);
    }

    #[test]
    fn polishing_is_monotone() {
        let objective = PurityObjective::balanced(5).unwrap();
        let start = random_haar_state(5, 11).unwrap().into_amplitudes();
        let out = polish::polish(&objective, start, 300, 1e-12, &mut Scratch::default());
        for w in out.trace.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15, "{:?}", w);
        }
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(minimize_potential(1, &quick(0)).is_err());
        assert!(minimize_potential(11, &quick(0)).is_err());
    }

    #[test]
    fn target_stops_early() {
        let cfg = OptimizerConfig {
            restarts: 64,
            batch_size: 4,
            target: Some(0.5 + 1e-9),
            ..quick(3)
        };
        let r = minimize_potential(2, &cfg).unwrap();
        assert_eq!(r.restarts_used, 4);
    }
}

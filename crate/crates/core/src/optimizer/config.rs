use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;

/// Settings shared by every minimization in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Independent annealing chains, each polished afterwards.
    pub restarts: usize,
    pub seed: u64,
    pub anneal_steps: usize,
    pub initial_temperature: f64,
    /// Geometric cooling per annealing step, in (0, 1).
    pub cooling_factor: f64,
    /// Norm of a proposal perturbation at the initial temperature.
    pub proposal_stddev: f64,
    pub polish_max_iters: usize,
    /// Gradient norm at which polishing stops.
    pub polish_tolerance: f64,
    /// Stop launching restarts once the objective reaches this value.
    pub target: Option<f64>,
    /// Band around the lower bound counted as "at the bound" in scans.
    pub feasibility_tolerance: f64,
    pub classify_tolerance: f64,
    /// Restarts are launched in batches of this size; `target` is checked between batches.
    pub batch_size: usize,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            anneal_steps: 1000,
            initial_temperature: 0.02,
            cooling_factor: 0.995,
            proposal_stddev: 0.3,
            polish_max_iters: 4000,
            polish_tolerance: 1e-7,
            target: None,
            feasibility_tolerance: 1e-3,
            classify_tolerance: crate::metrics::DEFAULT_CLASSIFY_TOLERANCE,
            batch_size: 8,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("optimizer config: {msg}")));
        if self.restarts == 0 || self.polish_max_iters == 0 || self.batch_size == 0 {
            return bad("restarts, polish_max_iters and batch_size must be at least 1");
        }
        if self.anneal_steps == 0 {
            return bad("anneal_steps must be at least 1");
        }
        if !(self.initial_temperature > 0.0) || !(self.proposal_stddev > 0.0) {
            return bad("temperature and proposal stddev must be positive");
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return bad("cooling_factor must lie in (0, 1)");
        }
        if !(self.polish_tolerance > 0.0)
            || !(self.feasibility_tolerance > 0.0)
            || !(self.classify_tolerance > 0.0)
        {
            return bad("tolerances must be positive");
        }
        if let Some(t) = self.target {
            if !t.is_finite() {
                return bad("target must be finite");
            }
        }
        Ok(())
    }
}

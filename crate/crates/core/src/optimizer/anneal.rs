//! Metropolis annealing on the unit sphere of C^N.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::kernel::Scratch;
use crate::objective::PurityObjective;
use crate::state::norm;

use super::OptimizerConfig;

pub(crate) struct AnnealOutcome {
    pub best: Vec<Complex64>,
    pub best_value: f64,
    pub trace: Vec<(usize, f64)>,
}

/// Runs one chain from `start`. Proposals add a complex Gaussian vector whose
/// expected norm is `proposal_stddev · T / T₀`, then renormalize.
pub(crate) fn anneal<R: Rng + ?Sized>(
    objective: &PurityObjective,
    start: Vec<Complex64>,
    config: &OptimizerConfig,
    rng: &mut R,
    scratch: &mut Scratch,
) -> AnnealOutcome {
    let dim = start.len();
    let per_component = 1.0 / (2.0 * dim as f64).sqrt();
    let mut current = start;
    let mut value = objective.value(&current, scratch);
    let mut best = current.clone();
    let mut best_value = value;
    let mut proposal = vec![Complex64::new(0.0, 0.0); dim];
    let mut temperature = config.initial_temperature;
    let every = (config.anneal_steps / 20).max(1);
    let mut trace = vec![(0, value)];

    for step in 1..=config.anneal_steps {
        let sigma = config.proposal_stddev * (temperature / config.initial_temperature) * per_component;
        for (p, c) in proposal.iter_mut().zip(&current) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *p = c + Complex64::new(re, im) * sigma;
        }
        let inv = 1.0 / norm(&proposal);
        proposal.iter_mut().for_each(|z| *z *= inv);
        let candidate = objective.value(&proposal, scratch);
        let delta = candidate - value;
        let accept = delta <= 0.0 || {
            let u: f64 = rng.random();
            u < (-delta / temperature).exp()
        };
        if accept {
            std::mem::swap(&mut current, &mut proposal);
            value = candidate;
            if value < best_value {
                best_value = value;
                best.copy_from_slice(&current);
            }
        }
        temperature *= config.cooling_factor;
        if step % every == 0 {
            trace.push((step, best_value));
        }
    }
    AnnealOutcome {
        best,
        best_value,
        trace,
    }
}

//! Restricted minimizations over growing sets of bipartitions.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::bipartition::{enumerate_balanced, Bipartition};
use crate::error::{Error, Result};
use crate::kernel::Scratch;
use crate::metrics::min_balanced_purity;
use crate::objective::PurityObjective;
use crate::par;
use crate::rng::SeedPath;
use crate::state::PureState;

use super::{check_n, run_restarts_with, OptimizerConfig};

/// Qubit counts accepted by [`greedy_scan`].
pub const GREEDY_QUBITS: std::ops::RangeInclusive<usize> = 4..=8;

/// One step of a greedy scan.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub k: usize,
    /// k / K.
    pub alpha: f64,
    pub min_avg_purity: f64,
    /// Sorted purities of the k chosen bipartitions at the minimizer.
    pub purity_multiset: Vec<f64>,
    pub chosen: Vec<Bipartition>,
    /// Whether `min_avg_purity` lies within the feasibility band of the bound.
    pub at_bound: bool,
    pub state: PureState,
}

struct Candidate {
    index: usize,
    value: f64,
    /// Bipartitions of the whole canonical set at the bound in `state`.
    at_bound: usize,
    state: PureState,
}

/// Adds balanced bipartitions one at a time, each time picking the candidate
/// whose restricted minimum is lowest.
///
/// Candidates reaching the bound (within `feasibility_tolerance`) all count as
/// tied on the restricted objective. Among them the one whose minimizer puts
/// the most bipartitions of the whole canonical set at the bound wins, which
/// keeps the most room for later additions; remaining ties go to canonical
/// order. When no candidate reaches the bound the strict argmin wins. Each candidate problem is warm-started from
/// the previous step's minimizer; fresh restarts run only when the warm start
/// misses the bound.
pub fn greedy_scan(n: usize, config: &OptimizerConfig) -> Result<Vec<ScanResult>> {
    if !GREEDY_QUBITS.contains(&n) {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "greedy scan supports 4..=8 qubits",
        });
    }
    config.validate()?;
    let set = enumerate_balanced(n)?;
    let total = set.k();
    let bound = min_balanced_purity(n);
    let feasible = bound + config.feasibility_tolerance;
    let root = SeedPath::new(config.seed);
    let full = PurityObjective::balanced(n)?;

    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Option<PureState> = None;
    let mut out = Vec::with_capacity(total);

    for k in 1..=total {
        let remaining: Vec<usize> = (0..total).filter(|i| !chosen.contains(i)).collect();
        let step = root.child(k as u64);
        let evaluated = par::map(config.execution, &remaining, |&idx| -> Result<Candidate> {
            let mut members: Vec<Bipartition> = chosen.iter().map(|&i| set.members()[i]).collect();
            members.push(set.members()[idx]);
            let objective = PurityObjective::subset(n, &members)?;
            let run = run_restarts_with(
                &objective,
                config,
                &step.child(idx as u64),
                current.as_ref(),
                Some(feasible),
            )?;
            let at_bound = full
                .purities(&run.state, &mut Scratch::default())
                .into_iter()
                .filter(|&p| p <= feasible)
                .count();
            Ok(Candidate {
                index: idx,
                value: run.value,
                at_bound,
                state: PureState::from_unit(n, run.state),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        // `evaluated` follows canonical order, so strict comparisons leave the
        // earliest candidate in place on ties.
        let mut pick: Option<usize> = None;
        for (i, c) in evaluated.iter().enumerate() {
            if c.value <= feasible && pick.is_none_or(|b| c.at_bound > evaluated[b].at_bound) {
                pick = Some(i);
            }
        }
        let pick = pick
            .unwrap_or_else(|| {
                let mut best = 0;
                for (i, c) in evaluated.iter().enumerate() {
                    if c.value < evaluated[best].value {
                        best = i;
                    }
                }
                best
            });
        let winner = evaluated.into_iter().nth(pick).expect("non-empty candidate list");
        chosen.push(winner.index);
        let members: Vec<Bipartition> = chosen.iter().map(|&i| set.members()[i]).collect();
        let objective = PurityObjective::subset(n, &members)?;
        let mut multiset = objective.purities(winner.state.amplitudes(), &mut Scratch::default());
        multiset.sort_by(f64::total_cmp);
        let value = objective.value(winner.state.amplitudes(), &mut Scratch::default());
        log::info!("greedy n={n} k={k}: {value:.6} (added {})", set.members()[winner.index]);
        out.push(ScanResult {
            k,
            alpha: k as f64 / total as f64,
            min_avg_purity: value,
            purity_multiset: multiset,
            chosen: members,
            at_bound: value <= feasible,
            state: winner.state.clone(),
        });
        current = Some(winner.state);
    }
    Ok(out)
}

/// Distribution of restricted minima over random k-subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomScanPoint {
    pub k: usize,
    pub alpha: f64,
    pub mean: f64,
    /// 16th and 84th percentiles: the central 68% of the samples.
    pub q16: f64,
    pub q84: f64,
    pub samples: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// For each k, minimizes the mean purity over `samples_per_k` uniformly drawn
/// k-subsets of the canonical bipartitions. Restart batches stop once a
/// sample reaches the bound within `feasibility_tolerance`.
pub fn random_scan(
    n: usize,
    k_values: &[usize],
    samples_per_k: usize,
    config: &OptimizerConfig,
) -> Result<Vec<RandomScanPoint>> {
    check_n(n)?;
    config.validate()?;
    if samples_per_k == 0 {
        return Err(Error::InvalidArgument("samples_per_k must be at least 1".into()));
    }
    let set = enumerate_balanced(n)?;
    let total = set.k();
    if let Some(&bad) = k_values.iter().find(|&&k| k == 0 || k > total) {
        return Err(Error::InvalidArgument(format!("k = {bad} outside 1..={total}")));
    }
    let feasible = min_balanced_purity(n) + config.feasibility_tolerance;
    let root = SeedPath::new(config.seed);
    let jobs: Vec<(usize, usize)> = k_values
        .iter()
        .flat_map(|&k| (0..samples_per_k).map(move |s| (k, s)))
        .collect();
    let values = par::map(config.execution, &jobs, |&(k, s)| -> Result<f64> {
        let path = root.child(k as u64).child(s as u64);
        let mut rng = path.rng();
        let mut picks = sample(&mut rng, total, k).into_vec();
        picks.sort_unstable();
        let members: Vec<Bipartition> = picks.iter().map(|&i| set.members()[i]).collect();
        let objective = PurityObjective::subset(n, &members)?;
        // Reaching the bound is the global minimum, so later batches are skipped.
        let run = run_restarts_with(&objective, config, &path.child(1), None, Some(feasible))?;
        Ok(run.value)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    Ok(k_values
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut samples = values[i * samples_per_k..(i + 1) * samples_per_k].to_vec();
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            samples.sort_by(f64::total_cmp);
            RandomScanPoint {
                k,
                alpha: k as f64 / total as f64,
                mean,
                q16: quantile(&samples, 0.16),
                q84: quantile(&samples, 0.84),
                samples,
            }
        })
        .collect())
}

/// α_c: the fraction at which the mean restricted minimum first rises above
/// `threshold`, linearly interpolated between neighbouring k values.
///
/// Returns `None` when no point exceeds the threshold. When the first point
/// already exceeds it, its own α is returned.
pub fn critical_fraction(points: &[RandomScanPoint], threshold: f64) -> Option<f64> {
    let mut sorted: Vec<&RandomScanPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.k);
    let first = sorted.iter().position(|p| p.mean > threshold)?;
    if first == 0 {
        return Some(sorted[0].alpha);
    }
    let (a, b) = (sorted[first - 1], sorted[first]);
    let frac = (threshold - a.mean) / (b.mean - a.mean);
    Some(a.alpha + frac.clamp(0.0, 1.0) * (b.alpha - a.alpha))
}

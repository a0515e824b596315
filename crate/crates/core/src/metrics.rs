//! Multipartite-entanglement functionals built on the purity kernel.

use serde::{Deserialize, Serialize};

use crate::bipartition::{enumerate_balanced, Bipartition};
use crate::error::{Error, Result};
use crate::kernel::Scratch;
use crate::objective::{stable_sum, PurityObjective};
use crate::par::{self, Execution};
use crate::rng::SeedPath;
use crate::state::{haar_from_path, PureState};

/// Default tolerance for [`classify`].
pub const DEFAULT_CLASSIFY_TOLERANCE: f64 = 1e-6;

/// Default number of histogram bins in a [`PurityReport`].
pub const DEFAULT_BINS: usize = 20;

/// 2^{-floor(n/2)}: the smallest balanced-bipartition purity of n qubits.
pub fn min_balanced_purity(n: usize) -> f64 {
    0.5f64.powi((n / 2) as i32)
}

/// Counts over uniform bins spanning `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn uniform(lower: f64, upper: f64, bins: usize, values: &[f64]) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        if !(upper > lower) {
            return Err(Error::InvalidArgument(format!(
                "empty histogram range [{lower}, {upper}]"
            )));
        }
        let width = (upper - lower) / bins as f64;
        let edges = (0..=bins).map(|i| lower + width * i as f64).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let pos = ((v - lower) / width).floor();
            let bin = if pos < 0.0 {
                0
            } else {
                (pos as usize).min(bins - 1)
            };
            counts[bin] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Balanced-bipartition purities of one state and their statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct PurityReport {
    pub n: usize,
    pub per_bipartition: Vec<(Bipartition, f64)>,
    /// π_ME, the mean purity.
    pub mean: f64,
    /// Population standard deviation σ.
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
    /// Smallest attainable purity for the balanced split (qubit or constrained bound).
    pub lower_bound: f64,
    pub histogram: Histogram,
}

impl PurityReport {
    /// Summarizes `entries` with a histogram over `[lower_bound, 1]`.
    pub fn from_entries(
        n: usize,
        per_bipartition: Vec<(Bipartition, f64)>,
        lower_bound: f64,
        bins: usize,
    ) -> Result<Self> {
        if per_bipartition.is_empty() {
            return Err(Error::InvalidArgument("report needs at least one purity".into()));
        }
        let values: Vec<f64> = per_bipartition.iter().map(|(_, p)| *p).collect();
        let count = values.len() as f64;
        let mean = stable_sum(values.iter().copied()) / count;
        let var = stable_sum(values.iter().map(|p| (p - mean) * (p - mean))) / count;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Identical purities must give exactly zero spread.
        let stdev = if max - min <= 1e-12 { 0.0 } else { var.sqrt() };
        let histogram = Histogram::uniform(lower_bound, 1.0, bins, &values)?;
        Ok(Self {
            n,
            per_bipartition,
            mean,
            stdev,
            min,
            max,
            lower_bound,
            histogram,
        })
    }

    pub fn purities(&self) -> Vec<f64> {
        self.per_bipartition.iter().map(|(_, p)| *p).collect()
    }

    pub fn k(&self) -> usize {
        self.per_bipartition.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ReportFile::from(self))?)
    }
}

/// JSON form of a [`PurityReport`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub n: usize,
    pub mean: f64,
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
    pub purities: Vec<ReportEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportEntry {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    pub pi: f64,
}

impl From<&PurityReport> for ReportFile {
    fn from(r: &PurityReport) -> Self {
        Self {
            n: r.n,
            mean: r.mean,
            stdev: r.stdev,
            min: r.min,
            max: r.max,
            purities: r
                .per_bipartition
                .iter()
                .map(|(b, p)| ReportEntry {
                    a: b.parties(),
                    pi: *p,
                })
                .collect(),
        }
    }
}

/// Outcome of classifying an optimized state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MmesClass {
    /// Every balanced purity sits at the lower bound.
    Perfect,
    /// All balanced purities coincide, above the bound.
    UniformlyOptimal,
    Frustrated,
}

/// Purities of `state` on all balanced bipartitions, with statistics and histogram.
pub fn purity_report(state: &PureState) -> Result<PurityReport> {
    let objective = PurityObjective::balanced(state.n())?;
    report_for(&objective, state, DEFAULT_BINS)
}

pub(crate) fn report_for(
    objective: &PurityObjective,
    state: &PureState,
    bins: usize,
) -> Result<PurityReport> {
    let purities = objective.purities(state.amplitudes(), &mut Scratch::default());
    let entries = objective
        .bipartitions()
        .iter()
        .copied()
        .zip(purities)
        .collect();
    PurityReport::from_entries(state.n(), entries, min_balanced_purity(state.n()), bins)
}

fn balanced_objective(state: &PureState) -> Result<PurityObjective> {
    let nrm = state.norm();
    if (nrm - 1.0).abs() > crate::state::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: nrm });
    }
    PurityObjective::balanced(state.n())
}

/// π_ME: mean purity over the canonical balanced bipartitions.
pub fn potential(state: &PureState) -> Result<f64> {
    let objective = balanced_objective(state)?;
    Ok(objective.value(state.amplitudes(), &mut Scratch::default()))
}

/// σ: population standard deviation of the balanced purities.
pub fn variance_sigma(state: &PureState) -> Result<f64> {
    let objective = balanced_objective(state)?;
    Ok(report_for(&objective, state, 1)?.stdev)
}

/// Mean balanced purity of Haar-random states, (N_A + N_Ā)/(N + 1).
pub fn typical_mean(n: usize) -> Result<f64> {
    if !(2..=62).contains(&n) {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "typical mean defined for 2..=62 qubits",
        });
    }
    let na = (1u64 << (n / 2)) as f64;
    let nb = (1u64 << (n - n / 2)) as f64;
    let dim = (1u64 << n) as f64;
    Ok((na + nb) / (dim + 1.0))
}

/// F = (E₀ − 2^{-floor(n/2)}) / E₀.
pub fn frustration_ratio(e0: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "frustration ratio needs at least 2 qubits",
        });
    }
    constrained_frustration_ratio(e0, min_balanced_purity(n))
}

/// F = (E₀ − bound) / E₀ for an arbitrary lower bound.
pub fn constrained_frustration_ratio(e0: f64, bound: f64) -> Result<f64> {
    if !e0.is_finite() || e0 < bound - 1e-9 || e0 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "E0 = {e0} lies below the lower bound {bound}"
        )));
    }
    Ok(((e0 - bound) / e0).max(0.0))
}

/// Perfect if the mean is within `tol` of the report's bound, else
/// uniformly optimal if σ ≤ `tol`, else frustrated.
pub fn classify(report: &PurityReport, tol: f64) -> Result<MmesClass> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "classification tolerance must be positive, got {tol}"
        )));
    }
    Ok(if report.mean <= report.lower_bound + tol {
        MmesClass::Perfect
    } else if report.stdev <= tol {
        MmesClass::UniformlyOptimal
    } else {
        MmesClass::Frustrated
    })
}

/// Histogram of balanced purities over `[2^{-floor(n/2)}, 1]`.
pub fn purity_histogram(state: &PureState, bins: usize) -> Result<Histogram> {
    let objective = balanced_objective(state)?;
    let purities = objective.purities(state.amplitudes(), &mut Scratch::default());
    Histogram::uniform(min_balanced_purity(state.n()), 1.0, bins, &purities)
}

/// Haar-ensemble estimate of the mean balanced purity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalStats {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Mean of π_A over samples and balanced bipartitions.
    pub mean: f64,
    /// Standard error of `mean`, from the spread of per-sample averages.
    pub std_error: f64,
    /// (N_A + N_Ā)/(N + 1).
    pub expected: f64,
}

impl TypicalStats {
    /// |mean − expected| in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected).abs() / self.std_error
    }
}

/// Samples `samples` Haar states and averages their balanced purities.
pub fn typical_statistics(
    n: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<TypicalStats> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let expected = typical_mean(n)?;
    let objective = PurityObjective::balanced(n)?;
    let root = SeedPath::new(seed);
    let per_sample = par::map_indexed(exec, samples, |i| -> Result<f64> {
        let state = haar_from_path(n, &root.child(i as u64))?;
        Ok(objective.value(state.amplitudes(), &mut Scratch::default()))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let count = samples as f64;
    let mean = stable_sum(per_sample.iter().copied()) / count;
    let var = stable_sum(per_sample.iter().map(|v| (v - mean) * (v - mean))) / (count - 1.0);
    Ok(TypicalStats {
        n,
        samples,
        seed,
        mean,
        std_error: (var / count).sqrt(),
        expected,
    })
}

/// All purities π_A for every (not only canonical) size-floor(n/2) subset.
/// Used to check that the canonical set gives the same average.
pub fn ordered_balanced_mean(state: &PureState) -> Result<f64> {
    let n = state.n();
    let half = n / 2;
    let mut values = Vec::new();
    for mask in 1u32..(1u32 << n) - 1 {
        if mask.count_ones() as usize == half {
            let b = Bipartition::new(n, mask)?;
            values.push(crate::state::purity(state, &b)?);
        }
    }
    Ok(stable_sum(values.iter().copied()) / values.len() as f64)
}

/// Number of canonical balanced bipartitions for `n` parties.
pub fn balanced_count(n: usize) -> Result<usize> {
    Ok(enumerate_balanced(n)?.k())
}

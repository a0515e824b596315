//! Constrained minimization of the balanced-bipartition Gaussian purity.
//!
//! The search runs on the symplectic group: each iterate is a symplectic S
//! with V = S·Sᵀ/2, and a step multiplies S on the left by exp(Ω·H(δ)), so
//! V ↦ e^X V e^{Xᵀ}. Left steps keep mode rotations and squeezing changes
//! well scaled even under strong squeezing. The gradient in δ is exact: for
//! G = ∂f/∂V, Q = 2·V·G·Ω gives ∂f/∂H_ij = Q_ij + Q_ji (i < j) and Q_ii on
//! the diagonal. The excitation cap
//! enters as a quadratic exterior penalty whose weight grows ×10 per stage.
//! The penalty targets a cap lowered by a relative 1e-7 and stops once the
//! excess over that inner cap is below the same margin, so accepted states
//! obey the true cap. Each stage is a dense BFGS run; the parameter count is
//! at most n(2n + 1) = 136.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bipartition::{enumerate_balanced, Bipartition};
use crate::error::{Error, Result};
use crate::metrics::{classify, constrained_frustration_ratio, MmesClass, PurityReport, DEFAULT_BINS};
use crate::optimizer::OptimizerConfig;
use crate::par;
use crate::rng::SeedPath;

use super::symplectic::{exp_generator, generator, param_count, symplectic_form};
use super::{gaussian_purity, thermal_bound, ExcitationConstraint, GaussianState};

/// Successive frustration ratios closer than this count as saturated.
pub const SATURATION_TOLERANCE: f64 = 1e-3;

/// Relative amount by which the penalized cap sits below the true cap.
const CAP_MARGIN: f64 = 1e-7;
const MAX_STAGES: usize = 14;
const INITIAL_WEIGHT: f64 = 1.0;
const ARMIJO: f64 = 1e-4;
const INITIAL_SPREAD: f64 = 0.3;
/// Largest accepted step generator, in Frobenius norm.
const MAX_STEP: f64 = 2.0;

struct Objective {
    n: usize,
    /// Phase-space rows of party A for each balanced bipartition.
    parts: Vec<Vec<usize>>,
    /// Penalized cap, slightly below the true one.
    cap: f64,
    /// Excess over `cap` still accepted as feasible.
    slack: f64,
    omega: DMatrix<f64>,
}

struct Eval {
    total: f64,
    purity: f64,
    violation: f64,
}

impl Objective {
    fn new(n: usize, cap: f64) -> Result<Self> {
        let set = enumerate_balanced(n)?;
        let parts = set
            .iter()
            .map(|b| {
                b.parties()
                    .iter()
                    .flat_map(|&k| [2 * (k - 1), 2 * (k - 1) + 1])
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            parts,
            cap: cap * (1.0 - CAP_MARGIN),
            slack: cap * CAP_MARGIN,
            omega: symplectic_form(n),
        })
    }

    /// Value at S and, when `grad` is given, the gradient in algebra coordinates.
    fn eval(&self, s: &DMatrix<f64>, weight: f64, grad: Option<&mut Vec<f64>>) -> Eval {
        let dim = 2 * self.n;
        let v = s * s.transpose() * 0.5;
        let want = grad.is_some();
        let mut g = DMatrix::<f64>::zeros(dim, dim);
        let w = 1.0 / self.parts.len() as f64;
        let mut purity = 0.0;
        for rows in &self.parts {
            let m = rows.len();
            let sub = DMatrix::from_fn(m, m, |i, j| v[(rows[i], rows[j])]);
            let Some(chol) = sub.clone().cholesky() else {
                return Eval {
                    total: f64::INFINITY,
                    purity: f64::INFINITY,
                    violation: f64::INFINITY,
                };
            };
            let sqrt_det: f64 = chol.l_dirty().diagonal().iter().take(m).product();
            let pi = 1.0 / (2f64.powi((m / 2) as i32) * sqrt_det);
            purity += w * pi;
            if want {
                let inv = chol.inverse();
                for i in 0..m {
                    for j in 0..m {
                        g[(rows[i], rows[j])] -= 0.5 * w * pi * inv[(i, j)];
                    }
                }
            }
        }
        let mut penalty = 0.0;
        let mut violation: f64 = 0.0;
        for k in 0..self.n {
            let (q, p) = (2 * k, 2 * k + 1);
            let excess = 0.5 * (v[(q, q)] + v[(p, p)]) - self.cap;
            violation = violation.max(excess);
            if excess > 0.0 {
                penalty += weight * excess * excess;
                g[(q, q)] += weight * excess;
                g[(p, p)] += weight * excess;
            }
        }
        if let Some(out) = grad {
            let q = (&v * &g * &self.omega) * 2.0;
            out.clear();
            for i in 0..dim {
                for j in i..dim {
                    out.push(if i == j { q[(i, i)] } else { q[(i, j)] + q[(j, i)] });
                }
            }
        }
        Eval {
            total: purity + penalty,
            purity,
            violation: violation.max(0.0),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct StageOutcome {
    s: DMatrix<f64>,
    eval: Eval,
    iterations: usize,
    gradient_norm: f64,
}

/// Dense BFGS on the group at fixed penalty weight. The coordinates are
/// re-centred at every iterate and curvature pairs are carried over unchanged.
fn polish_stage(
    obj: &Objective,
    start: DMatrix<f64>,
    weight: f64,
    max_iters: usize,
    tolerance: f64,
    trace: &mut Vec<(usize, f64)>,
    offset: usize,
) -> StageOutcome {
    let dim = param_count(obj.n);
    let mut s = start;
    let mut g = Vec::with_capacity(dim);
    let mut eval = obj.eval(&s, weight, Some(&mut g));
    let mut h_inv: Option<DMatrix<f64>> = None;
    let mut g_new = Vec::with_capacity(dim);
    let mut iterations = 0;
    let every = (max_iters / 25).max(1);
    let mut gnorm = dot(&g, &g).sqrt();

    while iterations < max_iters && gnorm > tolerance * eval.total {
        iterations += 1;
        let mut d: Vec<f64> = match &h_inv {
            Some(h) => {
                let gv = DVector::from_column_slice(&g);
                (-(h * gv)).iter().copied().collect()
            }
            None => g.iter().map(|x| -x * 0.1 / gnorm).collect(),
        };
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            h_inv = None;
            d = g.iter().map(|x| -x * 0.1 / gnorm).collect();
            slope = dot(&g, &d);
        }
        let dnorm = dot(&d, &d).sqrt();
        let mut t = if dnorm > MAX_STEP { MAX_STEP / dnorm } else { 1.0 };

        let mut accepted = None;
        for _ in 0..60 {
            let step: Vec<f64> = d.iter().map(|x| x * t).collect();
            if let Ok(e) = exp_generator(&generator(obj.n, &step)) {
                let s_try = e * &s;
                let trial = obj.eval(&s_try, weight, None);
                if trial.total <= eval.total + ARMIJO * t * slope {
                    accepted = Some((s_try, step));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((s_next, step)) = accepted else {
            break;
        };
        let e_next = obj.eval(&s_next, weight, Some(&mut g_new));
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &y);
        if sy > 1e-12 * dot(&step, &step).sqrt() * dot(&y, &y).sqrt() {
            let sv = DVector::from_column_slice(&step);
            let yv = DVector::from_column_slice(&y);
            let h = h_inv.take().unwrap_or_else(|| {
                DMatrix::identity(dim, dim) * (sy / dot(&y, &y))
            });
            // H⁺ = (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            let hy = &h * &yv;
            let yhy = yv.dot(&hy);
            let mut next = h;
            next -= (&hy * sv.transpose() + &sv * hy.transpose()) * rho;
            next += (&sv * sv.transpose()) * (rho * rho * yhy + rho);
            h_inv = Some(next);
        }
        s = s_next;
        std::mem::swap(&mut g, &mut g_new);
        eval = e_next;
        gnorm = dot(&g, &g).sqrt();
        if iterations % every == 0 {
            trace.push((offset + iterations, eval.purity));
        }
    }
    StageOutcome {
        s,
        eval,
        iterations,
        gradient_norm: gnorm,
    }
}

struct Run {
    s: DMatrix<f64>,
    purity: f64,
    violation: f64,
    weight: f64,
    gradient_norm: f64,
    converged: bool,
    trace: Vec<(usize, f64)>,
}

fn penalty_run(obj: &Objective, start: DMatrix<f64>, config: &OptimizerConfig) -> Run {
    let mut s = start;
    let mut weight = INITIAL_WEIGHT;
    let mut trace = Vec::new();
    let mut offset = 0;
    let mut last = None;
    for stage in 0..MAX_STAGES {
        let out = polish_stage(
            obj,
            s,
            weight,
            config.polish_max_iters,
            config.polish_tolerance,
            &mut trace,
            offset,
        );
        offset += out.iterations;
        trace.push((offset, out.eval.purity));
        s = out.s;
        let feasible = out.eval.violation <= obj.slack;
        let converged = out.gradient_norm <= config.polish_tolerance * out.eval.total;
        last = Some((out.eval, out.gradient_norm, converged));
        if feasible {
            break;
        }
        if stage + 1 < MAX_STAGES {
            weight *= 10.0;
        }
    }
    let (eval, gradient_norm, converged) = last.expect("at least one stage");
    Run {
        s,
        purity: eval.purity,
        violation: eval.violation,
        weight,
        gradient_norm,
        converged,
        trace,
    }
}

/// Outcome of [`minimize_gaussian_potential`].
#[derive(Clone, Debug)]
pub struct GaussianOptimizationResult {
    pub state: GaussianState,
    /// Symplectic matrix with V = S·Sᵀ/2.
    pub symplectic: DMatrix<f64>,
    pub nbar: f64,
    /// E₀ under the excitation cap.
    pub e0_estimate: f64,
    /// Thermal lower bound for the cap.
    pub bound: f64,
    pub frustration: f64,
    /// Report over balanced mode bipartitions; its lower bound is `bound`.
    pub report: PurityReport,
    pub classification: MmesClass,
    /// Largest per-mode excess over the cap; 0 once the penalty has converged.
    pub max_violation: f64,
    pub penalty_weight: f64,
    pub objective_trace: Vec<(usize, f64)>,
    pub seed: u64,
    pub restarts_used: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// JSON form of a [`GaussianOptimizationResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianResultFile {
    pub n: usize,
    pub nbar: f64,
    pub e0: f64,
    pub bound: f64,
    #[serde(rename = "F")]
    pub frustration: f64,
    pub stdev: f64,
    pub classification: MmesClass,
    pub max_violation: f64,
    pub seed: u64,
    pub restarts_used: usize,
    pub covariance: super::CovarianceFile,
}

impl GaussianOptimizationResult {
    pub fn to_json(&self) -> Result<String> {
        let file = GaussianResultFile {
            n: self.state.n(),
            nbar: self.nbar,
            e0: self.e0_estimate,
            bound: self.bound,
            frustration: self.frustration,
            stdev: self.report.stdev,
            classification: self.classification,
            max_violation: self.max_violation,
            seed: self.seed,
            restarts_used: self.restarts_used,
            covariance: super::CovarianceFile::from(&self.state),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

fn random_start<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let params: Vec<f64> = (0..param_count(n))
        .map(|_| INITIAL_SPREAD * rng.sample::<f64, _>(StandardNormal))
        .collect();
    exp_generator(&generator(n, &params))
}

fn check_inputs(n: usize, c: &ExcitationConstraint, config: &OptimizerConfig) -> Result<()> {
    if !(2..=8).contains(&n) {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "Gaussian minimization supports 2..=8 modes",
        });
    }
    if c.nbar() <= 0.0 {
        return Err(Error::Infeasible(
            "an excitation cap of 0 admits only the vacuum; the objective is constant 1".into(),
        ));
    }
    config.validate()
}

fn better(a: &Run, b: &Run, slack: f64) -> bool {
    let fa = a.violation <= slack;
    let fb = b.violation <= slack;
    match (fa, fb) {
        (true, false) => true,
        (false, true) => false,
        _ => a.purity < b.purity,
    }
}

fn search(
    n: usize,
    c: &ExcitationConstraint,
    config: &OptimizerConfig,
    path: &SeedPath,
    warm: Option<&DMatrix<f64>>,
) -> Result<(Run, usize)> {
    let obj = Objective::new(n, c.energy_cap())?;
    let runs = par::map_indexed(config.execution, config.restarts, |r| -> Result<Run> {
        let mut rng = path.child(r as u64).rng();
        let start = random_start(n, &mut rng)?;
        Ok(penalty_run(&obj, start, config))
    });
    let mut best: Option<Run> = warm.map(|s| penalty_run(&obj, s.clone(), config));
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| better(&run, b, obj.slack)) {
            best = Some(run);
        }
    }
    let used = config.restarts + usize::from(warm.is_some());
    Ok((best.expect("restarts >= 1"), used))
}

fn finish(
    n: usize,
    c: &ExcitationConstraint,
    config: &OptimizerConfig,
    run: Run,
    restarts_used: usize,
) -> Result<GaussianOptimizationResult> {
    if !run.purity.is_finite() {
        return Err(Error::NonFinite { value: run.purity });
    }
    let state = GaussianState::from_trusted(&run.s * run.s.transpose() * 0.5);
    let bound = thermal_bound(n, c.nbar())?;
    let set = enumerate_balanced(n)?;
    let entries: Vec<(Bipartition, f64)> = set
        .iter()
        .map(|b| Ok((*b, gaussian_purity(&state, &b.parties())?)))
        .collect::<Result<_>>()?;
    let report = PurityReport::from_entries(n, entries, bound, DEFAULT_BINS)?;
    let e0 = report.mean;
    // Penalty slack can leave E₀ a hair under the bound.
    let frustration = constrained_frustration_ratio(e0.max(bound), bound)?;
    let classification = classify_relative(&report, config.classify_tolerance)?;
    let max_violation = (1..=n)
        .map(|k| state.mode_energy(k) - c.energy_cap())
        .fold(0.0, f64::max);
    Ok(GaussianOptimizationResult {
        state,
        symplectic: run.s,
        nbar: c.nbar(),
        e0_estimate: e0,
        bound,
        frustration,
        report,
        classification,
        max_violation,
        penalty_weight: run.weight,
        objective_trace: run.trace,
        seed: config.seed,
        restarts_used,
        gradient_norm: run.gradient_norm,
        converged: run.converged,
    })
}

/// Purities shrink like 𝒩^{-n/2}, so the tolerance is applied relative to the bound.
fn classify_relative(report: &PurityReport, tol: f64) -> Result<MmesClass> {
    let scale = report.lower_bound;
    let scaled = PurityReport {
        mean: report.mean / scale,
        stdev: report.stdev / scale,
        lower_bound: 1.0,
        ..report.clone()
    };
    classify(&scaled, tol)
}

/// Minimizes the mean balanced-bipartition purity over pure Gaussian states
/// obeying the excitation cap.
pub fn minimize_gaussian_potential(
    n: usize,
    c: &ExcitationConstraint,
    config: &OptimizerConfig,
) -> Result<GaussianOptimizationResult> {
    check_inputs(n, c, config)?;
    let (run, used) = search(n, c, config, &SeedPath::new(config.seed), None)?;
    finish(n, c, config, run, used)
}

/// One schedule point of a frustration sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub nbar: f64,
    pub e0: f64,
    pub bound: f64,
    #[serde(rename = "F")]
    pub frustration: f64,
    pub stdev: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub n: usize,
    pub points: Vec<SweepPoint>,
    /// False when the schedule ran out before two successive ratios agreed.
    pub saturated: bool,
    /// F at the last evaluated point.
    pub plateau: f64,
    /// Minimizer at the last evaluated point.
    pub last: GaussianOptimizationResult,
}

/// Raises the cap along `nbar_schedule` until the frustration ratio settles.
///
/// Each point reuses the previous minimizer as an extra warm restart; it stays
/// feasible because the cap only grows.
pub fn frustration_sweep(
    n: usize,
    nbar_schedule: &[f64],
    config: &OptimizerConfig,
) -> Result<SweepResult> {
    if nbar_schedule.is_empty() {
        return Err(Error::InvalidArgument("empty nbar schedule".into()));
    }
    if nbar_schedule.iter().any(|&x| !(x > 0.0) || !x.is_finite())
        || nbar_schedule.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidArgument(
            "nbar schedule must be positive and strictly increasing".into(),
        ));
    }
    let root = SeedPath::new(config.seed);
    let mut points = Vec::new();
    let mut warm: Option<DMatrix<f64>> = None;
    let mut last = None;
    let mut saturated = false;
    for (i, &nbar) in nbar_schedule.iter().enumerate() {
        let c = ExcitationConstraint::new(nbar)?;
        check_inputs(n, &c, config)?;
        let (run, used) = search(n, &c, config, &root.child(i as u64), warm.as_ref())?;
        let result = finish(n, &c, config, run, used)?;
        log::info!(
            "sweep n={n} nbar={nbar}: e0={:.6e} bound={:.6e} F={:.5}",
            result.e0_estimate,
            result.bound,
            result.frustration
        );
        points.push(SweepPoint {
            n,
            nbar,
            e0: result.e0_estimate,
            bound: result.bound,
            frustration: result.frustration,
            stdev: result.report.stdev,
        });
        warm = Some(result.symplectic.clone());
        last = Some(result);
        if let [.., a, b] = points.as_slice() {
            if (b.frustration - a.frustration).abs() < SATURATION_TOLERANCE {
                saturated = true;
                break;
            }
        }
    }
    let last = last.expect("schedule is non-empty");
    Ok(SweepResult {
        n,
        plateau: last.frustration,
        points,
        saturated,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let n = 3;
        let obj = Objective::new(n, 0.8).unwrap();
        let mut rng = SeedPath::new(5).rng();
        let s = random_start(n, &mut rng).unwrap();
        let weight = 3.0;
        let mut g = Vec::new();
        obj.eval(&s, weight, Some(&mut g));
        let h = 1e-6;
        for p in 0..param_count(n) {
            let mut delta = vec![0.0; param_count(n)];
            delta[p] = h;
            let plus = exp_generator(&generator(n, &delta)).unwrap() * &s;
            delta[p] = -h;
            let minus = exp_generator(&generator(n, &delta)).unwrap() * &s;
            let fd = (obj.eval(&plus, weight, None).total - obj.eval(&minus, weight, None).total) / (2.0 * h);
            assert!((fd - g[p]).abs() < 1e-7 * (1.0 + g[p].abs()), "param {p}: fd {fd} vs {}", g[p]);
        }
    }

    #[test]
    fn zero_cap_is_infeasible() {
        let c = ExcitationConstraint::new(0.0).unwrap();
        assert!(matches!(
            minimize_gaussian_potential(2, &c, &OptimizerConfig::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn schedule_validation() {
        let cfg = OptimizerConfig::default();
        assert!(frustration_sweep(2, &[], &cfg).is_err());
        assert!(frustration_sweep(2, &[1.0, 1.0], &cfg).is_err());
        assert!(frustration_sweep(2, &[-1.0, 1.0], &cfg).is_err());
    }
}

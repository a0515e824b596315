//! Acceptance gate: one PASS/FAIL/SKIP line per criterion.
//!
//! Criteria with multi-minute to multi-hour budgets run only when
//! `MMES_ACCEPTANCE_NIGHTLY=1` is set; everything else runs on every
//! `cargo test`. The process exits non-zero if any criterion that ran failed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mmes::gaussian::{frustration_sweep, gaussian_purity, param_count, pure_gaussian_from_params, symplectic_from_params, thermal_bound, GaussianState};
use mmes::classical::{ising_min, CouplingMatrix};
use mmes::metrics::{min_balanced_purity, typical_statistics};
use mmes::optimizer::{critical_fraction, tangent_norm};
use mmes::{
    frustration_ratio, gradient, greedy_scan, minimize_potential, purity, purity_oracle,
    random_haar_state, random_scan, Bipartition, Execution, OptimizerConfig,
};
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

struct Criterion {
    id: u32,
    name: &'static str,
    nightly: bool,
    run: fn() -> Outcome,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn known_minima() -> Outcome {
    let cases: [(usize, f64, f64, Duration); 5] = [
        (2, 0.5, 1e-5, Duration::from_secs(1)),
        (3, 0.5, 1e-5, Duration::from_secs(5)),
        (4, 1.0 / 3.0, 1e-5, Duration::from_secs(60)),
        (5, 0.25, 1e-4, minutes(10)),
        (6, 0.125, 5e-4, minutes(30)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, expected, tol, budget) in cases {
        let start = Instant::now();
        let config = OptimizerConfig::default().with_restarts(32).with_seed(1);
        let r = minimize_potential(n, &config).expect("minimization");
        let elapsed = start.elapsed();
        let err = (r.e0_estimate - expected).abs();
        ok &= err <= tol && elapsed <= budget;
        parts.push(format!("n={n} e0={:.8} err={err:.1e} t={:.2?}", r.e0_estimate, elapsed));
    }
    check(ok, parts.join("; "))
}

fn seven_qubits() -> Outcome {
    let start = Instant::now();
    let config = OptimizerConfig::default().with_restarts(32).with_seed(1);
    let r = minimize_potential(7, &config).expect("minimization");
    let elapsed = start.elapsed();
    let f = frustration_ratio(r.e0_estimate, 7).expect("ratio");
    let e0_ok = r.e0_estimate <= 0.1344;
    let f_ok = (0.06..=0.08).contains(&f);
    check(
        e0_ok && f_ok && elapsed <= minutes(120),
        format!(
            "e0={:.7} (<= 0.1344: {e0_ok}) F={f:.4} (in [0.06, 0.08]: {f_ok}) t={elapsed:.1?}",
            r.e0_estimate
        ),
    )
}

/// Exact rational check of (1/3 − 1/4)/(1/3) = 1/4 alongside the float value.
fn frustration_exactness() -> Outcome {
    let (e_num, e_den) = (1i64, 3i64);
    let (b_num, b_den) = (1i64, 4i64);
    let num = (e_num * b_den - b_num * e_den) * e_den;
    let den = e_den * b_den * e_num;
    let rational = num * 4 == den;
    let float = frustration_ratio(1.0 / 3.0, 4).expect("ratio");
    check(
        rational && (float - 0.25).abs() <= 1e-12,
        format!("rational {num}/{den}, float {float:.17}"),
    )
}

fn typical_states() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 4..=8 {
        let s = typical_statistics(n, 1000, 100 + n as u64, Execution::default()).expect("sampling");
        ok &= s.z_score() < 3.0;
        parts.push(format!("n={n} z={:.2}", s.z_score()));
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= minutes(2);
    parts.push(format!("t={elapsed:.2?}"));
    check(ok, parts.join("; "))
}

fn greedy_milestones() -> Outcome {
    let config = OptimizerConfig::default().with_seed(3);
    let start = Instant::now();
    let seven = greedy_scan(7, &config).expect("greedy n=7");
    let s32 = &seven[31];
    let s33 = &seven[32];
    let high = s33.purity_multiset.iter().filter(|&&p| p >= 0.2).count();
    let eight = greedy_scan(8, &config).expect("greedy n=8");
    let s28 = &eight[27];
    let ok = s32.min_avg_purity <= 0.125 + 1e-3 && high == 1 && s28.min_avg_purity <= 0.0625 + 1e-3;
    check(
        ok,
        format!(
            "n=7 k=32 {:.6}, k=33 values >= 0.2: {high}; n=8 k=28 {:.6}; t={:.1?}",
            s32.min_avg_purity,
            s28.min_avg_purity,
            start.elapsed()
        ),
    )
}

fn random_scan_fraction() -> Outcome {
    let config = OptimizerConfig::default().with_restarts(8).with_seed(1);
    let start = Instant::now();
    let k_values: Vec<usize> = (1..=35).collect();
    let points = random_scan(7, &k_values, 40, &config).expect("random scan");
    let threshold = min_balanced_purity(7) + 1e-3;
    match critical_fraction(&points, threshold) {
        Some(alpha) => {
            let frustrated = 1.0 - alpha;
            check(
                (0.24..=0.44).contains(&frustrated),
                format!("alpha_c={alpha:.4} 1-alpha_c={frustrated:.4} t={:.1?}", start.elapsed()),
            )
        }
        None => Outcome::Fail("mean never rose above the bound".into()),
    }
}

fn gaussian_bounds() -> Outcome {
    let mut worst_bound: f64 = 0.0;
    for n in 1..=12 {
        let b = thermal_bound(n, 0.5).expect("bound");
        worst_bound = worst_bound.max((b - 0.5f64.powi((n / 2) as i32)).abs());
    }
    let mut worst_purity: f64 = 0.0;
    for n in 2..=8usize {
        for nbar in [0.0, 0.5, 1.0, 4.0, 20.0] {
            let state = GaussianState::thermal(n, nbar);
            let bound = thermal_bound(n, nbar).expect("bound");
            // Every floor(n/2)-mode subset, via bitmasks over the modes.
            for mask in 1u32..(1 << n) {
                if mask.count_ones() as usize != n / 2 {
                    continue;
                }
                let modes: Vec<usize> = (1..=n).filter(|k| mask >> (k - 1) & 1 == 1).collect();
                let p = gaussian_purity(&state, &modes).expect("purity");
                worst_purity = worst_purity.max((p - bound).abs());
            }
        }
    }
    check(
        worst_bound <= 1e-15 && worst_purity <= 1e-12,
        format!("bound err {worst_bound:.1e}, thermal purity err {worst_purity:.1e}"),
    )
}

fn gaussian_table() -> Outcome {
    let schedule = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let config = OptimizerConfig::default().with_restarts(8).with_seed(2);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        let start = Instant::now();
        let sweep = frustration_sweep(n, &schedule, &config).expect("sweep");
        let elapsed = start.elapsed();
        ok &= elapsed <= minutes(30) && sweep.saturated;
        let f = sweep.plateau;
        match n {
            2 | 3 => ok &= f <= 1e-3,
            4 => ok &= f >= 0.01,
            _ => {
                // Absolute thresholds at one excitation per mode, where purities are O(0.1).
                let at_one = &sweep.points[1];
                let gap = at_one.e0 - at_one.bound;
                ok &= at_one.stdev <= 1e-3 && gap > 1e-3;
                // The same statements scale-free at saturation.
                let last = sweep.points.last().expect("points");
                let rel_sigma = last.stdev / last.bound;
                ok &= rel_sigma <= 1e-3 && f > 1e-3;
                parts.push(format!(
                    "n=5 nbar=1 sigma={:.1e} gap={gap:.2e}; saturated nbar={} sigma/bound={rel_sigma:.1e}",
                    at_one.stdev, last.nbar
                ));
            }
        }
        parts.push(format!(
            "F({n})={f:.5} saturated={} t={elapsed:.1?}",
            sweep.saturated
        ));
    }
    check(ok, parts.join("; "))
}

fn property_suites() -> Outcome {
    let mut rng = common::rng(2024);
    let mut failures = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..=7usize);
        let state = random_haar_state(n, rng.random()).expect("state");
        let mask = rng.random_range(1..(1u32 << n) - 1);
        let b = Bipartition::new(n, mask).expect("bipartition");
        let d = (purity(&state, &b).unwrap() - purity(&state, &b.complement()).unwrap()).abs();
        worst = worst.max(d);
    }
    if worst > 1e-12 {
        failures.push(format!("complement {worst:.1e}"));
    }
    let complement = worst;

    worst = 0.0;
    for _ in 0..300 {
        let n = rng.random_range(2..=6usize);
        let state = random_haar_state(n, rng.random()).expect("state");
        let mask = rng.random_range(1..(1u32 << n) - 1);
        let b = Bipartition::new(n, mask).expect("bipartition");
        let p = purity(&state, &b).unwrap();
        worst = worst.max((p - purity_oracle(&state, &b).unwrap()).abs());
        worst = worst.max((p - common::reduced_purity(&state, &b)).abs());
    }
    if worst > 1e-10 {
        failures.push(format!("oracle {worst:.1e}"));
    }
    let oracle = worst;

    worst = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=5usize);
        let state = random_haar_state(n, rng.random()).expect("state");
        let g = gradient(&state).unwrap();
        let fd = common::fd_gradient(&state, 1e-5);
        let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = g.iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    if worst >= 1e-5 {
        failures.push(format!("gradient {worst:.1e}"));
    }
    let grad = worst;
    if tangent_norm(&gradient(&mmes::PureState::ghz(3).unwrap()).unwrap()) >= 1e-8 {
        failures.push("GHZ gradient".into());
    }

    let (mut defect, mut det_err) = (0.0f64, 0.0f64);
    for draw in 0..200 {
        let modes = 1 + draw % 5;
        let params = common::random_params(&mut rng, modes, 1.0);
        assert_eq!(params.len(), param_count(modes));
        defect = defect.max(common::symplectic_defect(&symplectic_from_params(modes, &params).unwrap()));
        let v = pure_gaussian_from_params(modes, &params).unwrap();
        det_err = det_err.max(((v.covariance() * 2.0).determinant() - 1.0).abs());
    }
    if defect >= 1e-8 || det_err > 1e-8 {
        failures.push(format!("symplectic {defect:.1e} / det {det_err:.1e}"));
    }

    let config = OptimizerConfig {
        anneal_steps: 200,
        batch_size: 3,
        ..OptimizerConfig::default()
    }
    .with_restarts(7)
    .with_seed(9);
    let sequential = minimize_potential(5, &OptimizerConfig { execution: Execution::Sequential, ..config.clone() }).unwrap();
    let mut deterministic = true;
    for threads in [1, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| minimize_potential(5, &config).unwrap());
        deterministic &= r.e0_estimate.to_bits() == sequential.e0_estimate.to_bits()
            && r.best_state.amplitudes() == sequential.best_state.amplitudes();
    }
    if !deterministic {
        failures.push("thread-count determinism".into());
    }

    let detail = format!(
        "complement {complement:.1e}, oracle {oracle:.1e}, gradient rel {grad:.1e}, symplectic {defect:.1e}, det(2V) {det_err:.1e}, deterministic {deterministic}"
    );
    if failures.is_empty() {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(format!("{detail}; failed: {}", failures.join(", ")))
    }
}

fn classical_demo() -> Outcome {
    let start = Instant::now();
    let three = ising_min(&CouplingMatrix::uniform(3, -1.0).unwrap()).unwrap().0;
    let four = ising_min(&CouplingMatrix::uniform(4, -1.0).unwrap()).unwrap().0;
    let elapsed = start.elapsed();
    check(
        three == -1.0 && four == -2.0 && elapsed < Duration::from_millis(100),
        format!("H_min(3)={three} H_min(4)={four} t={elapsed:.1?}"),
    )
}

fn main() -> ExitCode {
    let nightly = std::env::var("MMES_ACCEPTANCE_NIGHTLY").is_ok_and(|v| v == "1");
    let criteria = [
        Criterion { id: 1, name: "known minima n=2..6", nightly: false, run: known_minima },
        Criterion { id: 2, name: "n=7 best effort", nightly: true, run: seven_qubits },
        Criterion { id: 3, name: "frustration ratio exactness", nightly: false, run: frustration_exactness },
        Criterion { id: 4, name: "typical-state statistics", nightly: false, run: typical_states },
        Criterion { id: 5, name: "greedy scan milestones", nightly: true, run: greedy_milestones },
        Criterion { id: 6, name: "random-scan critical fraction", nightly: true, run: random_scan_fraction },
        Criterion { id: 7, name: "Gaussian bounds", nightly: false, run: gaussian_bounds },
        Criterion { id: 8, name: "Gaussian frustration table", nightly: false, run: gaussian_table },
        Criterion { id: 9, name: "property suites", nightly: false, run: property_suites },
        Criterion { id: 10, name: "classical demo", nightly: false, run: classical_demo },
    ];
    let mut failed = 0;
    for c in &criteria {
        let outcome = if c.nightly && !nightly {
            Outcome::Skip("nightly; set MMES_ACCEPTANCE_NIGHTLY=1".into())
        } else {
            (c.run)()
        };
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} criterion {:>2} ({}): {detail}", c.id, c.name);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

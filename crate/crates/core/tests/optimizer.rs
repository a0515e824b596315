use mmes::metrics::min_balanced_purity;
use mmes::optimizer::random_scan;
use mmes::{
    enumerate_balanced, greedy_scan, minimize_potential, minimize_subset, Bipartition, MmesClass,
    OptimizerConfig,
};

fn quick(restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        anneal_steps: 300,
        ..OptimizerConfig::default()
    }
    .with_restarts(restarts)
    .with_seed(5)
}

#[test]
fn bell_pair_subset() {
    let subset = [
        Bipartition::from_parties(4, &[1, 3]).unwrap(),
        Bipartition::from_parties(4, &[1, 4]).unwrap(),
    ];
    let result = minimize_subset(4, &subset, &quick(4)).unwrap();
    assert!((result.e0_estimate - 0.25).abs() < 1e-5);
    // The report still covers all three balanced bipartitions.
    assert_eq!(result.report.k(), 3);
}

#[test]
fn full_subset_equals_potential() {
    let all: Vec<Bipartition> = enumerate_balanced(4).unwrap().iter().copied().collect();
    let result = minimize_subset(4, &all, &quick(8)).unwrap();
    assert!((result.e0_estimate - 1.0 / 3.0).abs() < 1e-5);
    assert_eq!(result.classification, MmesClass::Frustrated);
}

#[test]
fn single_bipartition_reaches_its_bound() {
    let b = Bipartition::from_parties(7, &[2, 5, 6]).unwrap();
    let result = minimize_subset(7, &[b], &quick(1)).unwrap();
    assert!((result.e0_estimate - 0.125).abs() < 1e-6);
}

#[test]
fn small_minima() {
    let r3 = minimize_potential(3, &quick(4)).unwrap();
    assert!((r3.e0_estimate - 0.5).abs() < 1e-6);
    assert_eq!(r3.classification, MmesClass::Perfect);
    assert!((r3.e0_estimate - r3.report.mean).abs() < 1e-12);

    let r5 = minimize_potential(5, &quick(4)).unwrap();
    assert!((r5.e0_estimate - 0.25).abs() < 1e-4);
    assert_eq!(r5.classification, MmesClass::Perfect);
}

#[test]
fn greedy_four_qubits() {
    let steps = greedy_scan(4, &quick(4)).unwrap();
    let values: Vec<f64> = steps.iter().map(|s| s.min_avg_purity).collect();
    assert_eq!(values.len(), 3);
    assert!((values[0] - 0.25).abs() < 1e-5);
    assert!((values[1] - 0.25).abs() < 1e-5);
    assert!((values[2] - 1.0 / 3.0).abs() < 1e-5);
    assert!(steps[1].at_bound && !steps[2].at_bound);
}

#[test]
fn greedy_is_monotone() {
    for n in [5, 6] {
        let steps = greedy_scan(n, &quick(2)).unwrap();
        assert_eq!(steps.len(), enumerate_balanced(n).unwrap().k());
        for pair in steps.windows(2) {
            assert!(pair[1].min_avg_purity >= pair[0].min_avg_purity - 1e-4);
            assert_eq!(pair[1].chosen[..pair[0].k], pair[0].chosen[..]);
        }
        for s in &steps {
            assert!(s.min_avg_purity >= min_balanced_purity(n) - 1e-9);
            assert!(s.alpha > 0.0 && s.alpha <= 1.0);
        }
    }
}

#[test]
fn random_scan_single_bipartition() {
    let points = random_scan(7, &[1], 2, &quick(1)).unwrap();
    assert_eq!(points.len(), 1);
    assert!(points[0].samples.iter().all(|v| (v - 0.125).abs() < 1e-5));
    assert!(points[0].q16 <= points[0].q84);
}

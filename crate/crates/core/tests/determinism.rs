use mmes::metrics::typical_statistics;
use mmes::{minimize_potential, random_haar_state, Execution, OptimizerConfig};

fn config(execution: Execution) -> OptimizerConfig {
    OptimizerConfig {
        anneal_steps: 200,
        batch_size: 3,
        execution,
        ..OptimizerConfig::default()
    }
    .with_restarts(7)
    .with_seed(42)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn restarts_are_bitwise_reproducible_across_thread_counts() {
    let reference = minimize_potential(4, &config(Execution::Sequential)).unwrap();
    for threads in [1, 2, 4] {
        let r = in_pool(threads, || minimize_potential(4, &config(Execution::Parallel)).unwrap());
        assert_eq!(r.e0_estimate.to_bits(), reference.e0_estimate.to_bits());
        assert_eq!(r.best_state.amplitudes(), reference.best_state.amplitudes());
        assert_eq!(r.best_restart, reference.best_restart);
        assert_eq!(r.objective_trace, reference.objective_trace);
    }
}

#[test]
fn haar_sampling_is_reproducible() {
    let a = random_haar_state(6, 9).unwrap();
    let b = random_haar_state(6, 9).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, random_haar_state(6, 10).unwrap());
    let seq = typical_statistics(5, 50, 3, Execution::Sequential).unwrap();
    let par = in_pool(3, || typical_statistics(5, 50, 3, Execution::Parallel).unwrap());
    assert_eq!(seq, par);
}

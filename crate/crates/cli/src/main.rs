mod manifest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use mmes::classical::{ising_min, CouplingMatrix};
use mmes::export;
use mmes::gaussian::frustration_sweep;
use mmes::metrics::{min_balanced_purity, typical_statistics};
use mmes::optimizer::critical_fraction;
use mmes::{
    enumerate_balanced, greedy_scan, minimize_potential, purity_histogram, random_scan,
    OptimizerConfig,
};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "mmes", version, about = "Maximally multipartite entangled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimize the average balanced purity of n qubits.
    Optimize(OptimizeArgs),
    /// Greedy scan: add bipartitions one at a time.
    Scan(ScanArgs),
    /// Minimize over random k-subsets of bipartitions.
    RandomScan(RandomScanArgs),
    /// Mean balanced purity of Haar-random states.
    Typical(TypicalArgs),
    /// Gaussian frustration sweep over mean excitation numbers.
    Gaussian(GaussianArgs),
    /// Brute-force ground state of a uniform classical coupling.
    Classical(ClassicalArgs),
}

#[derive(Args, Debug, Serialize)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig::default()
            .with_seed(self.seed)
            .with_restarts(self.restarts)
    }
}

#[derive(Args, Debug, Serialize)]
struct OptimizeArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Stop early once reached; exit code 2 if missed.
    #[arg(long)]
    target: Option<f64>,
    /// Classification tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = mmes::metrics::DEFAULT_BINS)]
    bins: usize,
    /// Result JSON; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Band around the bound counted as unfrustrated.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Table `k,alpha,min_avg_purity,q16,q84`.
    #[arg(long)]
    out: PathBuf,
    /// Table `k,purity,count` of the purity multiset at each k.
    #[arg(long)]
    counts: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RandomScanArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Subset sizes, comma separated; every k from 1 to K when absent.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Band above the bound counted as unfrustrated when locating α_c.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct TypicalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Statistics JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GaussianArgs {
    #[arg(long)]
    modes: usize,
    /// Mean excitation numbers per mode, comma separated, visited in order.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4,8,16,32")]
    nbar: Vec<f64>,
    #[command(flatten)]
    common: Common,
    /// Table `n,nbar,e0,bound,F`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON of the minimizer at the last visited point.
    #[arg(long)]
    result: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ClassicalArgs {
    #[arg(long, default_value_t = 3)]
    agents: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    coupling: f64,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    TargetMissed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MMES_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::TargetMissed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Optimize(a) => with_threads(a.common.threads, || cmd_optimize(&a)),
        Command::Scan(a) => with_threads(a.common.threads, || cmd_scan(&a)),
        Command::RandomScan(a) => with_threads(a.common.threads, || cmd_random_scan(&a)),
        Command::Typical(a) => with_threads(a.threads, || cmd_typical(&a)),
        Command::Gaussian(a) => with_threads(a.common.threads, || cmd_gaussian(&a)),
        Command::Classical(a) => cmd_classical(&a),
    }
}

#[cfg(feature = "parallel")]
fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building thread pool")?
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    f()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn cmd_optimize(a: &OptimizeArgs) -> Result<Status> {
    let start = Instant::now();
    let mut config = a.common.config();
    config.target = a.target;
    if let Some(t) = a.tolerance {
        config.classify_tolerance = t;
    }
    let mut result = minimize_potential(a.n, &config)?;
    if a.bins != mmes::metrics::DEFAULT_BINS {
        result.report.histogram = purity_histogram(&result.best_state, a.bins)?;
    }
    info!(
        "n = {}: e0 = {:.10} ({:?}) after {} restarts",
        a.n, result.e0_estimate, result.classification, result.restarts_used
    );
    let json = result.to_json()?;
    match &a.out {
        Some(path) => {
            write_text(path, &json)?;
            println!(
                "e0 = {:.10}  classification = {:?}  restarts = {}",
                result.e0_estimate, result.classification, result.restarts_used
            );
            let mut m = RunManifest::new("optimize", a.common.seed, a);
            m.optimizer = Some(config.clone());
            m.outputs.push(path.clone());
            m.finish(start.elapsed())?;
        }
        None => println!("{json}"),
    }
    Ok(match a.target {
        Some(t) if result.e0_estimate > t => Status::TargetMissed,
        _ => Status::Ok,
    })
}

fn cmd_scan(a: &ScanArgs) -> Result<Status> {
    let start = Instant::now();
    let mut config = a.common.config();
    if let Some(t) = a.tolerance {
        config.feasibility_tolerance = t;
    }
    let steps = greedy_scan(a.n, &config)?;
    export::write_greedy_scan(create(&a.out)?, &steps)?;
    let mut m = RunManifest::new("scan", a.common.seed, a);
    m.optimizer = Some(config);
    m.outputs.push(a.out.clone());
    if let Some(path) = &a.counts {
        export::write_purity_counts(create(path)?, &steps, export::DEFAULT_GROUP_TOLERANCE)?;
        m.outputs.push(path.clone());
    }
    let unfrustrated = steps.iter().take_while(|s| s.at_bound).count();
    println!(
        "K = {}; all chosen bipartitions at the bound up to k = {unfrustrated}",
        steps.len()
    );
    m.finish(start.elapsed())?;
    Ok(Status::Ok)
}

fn cmd_random_scan(a: &RandomScanArgs) -> Result<Status> {
    let start = Instant::now();
    let mut config = a.common.config();
    if let Some(t) = a.tolerance {
        config.feasibility_tolerance = t;
    }
    let k_values = if a.k.is_empty() {
        (1..=enumerate_balanced(a.n)?.k()).collect()
    } else {
        a.k.clone()
    };
    let points = random_scan(a.n, &k_values, a.samples, &config)?;
    export::write_random_scan(create(&a.out)?, &points)?;
    let threshold = min_balanced_purity(a.n) + config.feasibility_tolerance;
    match critical_fraction(&points, threshold) {
        Some(alpha) => println!("alpha_c = {alpha:.4}  frustrated fraction = {:.4}", 1.0 - alpha),
        None => println!("no frustration within the scanned k values"),
    }
    let mut m = RunManifest::new("random-scan", a.common.seed, a);
    m.optimizer = Some(config);
    m.outputs.push(a.out.clone());
    m.finish(start.elapsed())?;
    Ok(Status::Ok)
}

fn cmd_typical(a: &TypicalArgs) -> Result<Status> {
    let start = Instant::now();
    let stats = typical_statistics(a.n, a.samples, a.seed, Default::default())?;
    println!(
        "n = {}  mean = {:.6}  std_error = {:.2e}  expected = {:.6}  z = {:.2}",
        stats.n,
        stats.mean,
        stats.std_error,
        stats.expected,
        stats.z_score()
    );
    if let Some(path) = &a.out {
        write_text(path, &serde_json::to_string_pretty(&stats)?)?;
        let mut m = RunManifest::new("typical", a.seed, a);
        m.outputs.push(path.clone());
        m.finish(start.elapsed())?;
    }
    Ok(Status::Ok)
}

fn cmd_gaussian(a: &GaussianArgs) -> Result<Status> {
    let start = Instant::now();
    let config = a.common.config();
    let sweep = frustration_sweep(a.modes, &a.nbar, &config)?;
    for p in &sweep.points {
        println!(
            "nbar = {:<6} e0 = {:.6e}  bound = {:.6e}  F = {:.5}",
            p.nbar, p.e0, p.bound, p.frustration
        );
    }
    println!(
        "{} at F = {:.5} ({:?})",
        if sweep.saturated { "saturated" } else { "not saturated" },
        sweep.plateau,
        sweep.last.classification
    );
    let mut m = RunManifest::new("gaussian", a.common.seed, a);
    m.optimizer = Some(config);
    if let Some(path) = &a.out {
        export::write_sweep(create(path)?, &sweep.points)?;
        m.outputs.push(path.clone());
    }
    if let Some(path) = &a.result {
        write_text(path, &sweep.last.to_json()?)?;
        m.outputs.push(path.clone());
    }
    m.finish(start.elapsed())?;
    Ok(Status::Ok)
}

fn cmd_classical(a: &ClassicalArgs) -> Result<Status> {
    let couplings = CouplingMatrix::uniform(a.agents, a.coupling)?;
    let (min, witness) = ising_min(&couplings)?;
    let spins: Vec<String> = witness.iter().map(|s| format!("{s:+}")).collect();
    println!("H_min = {min}");
    println!("S = ({})", spins.join(", "));
    println!("sum of pairwise minima = {}", couplings.lower_bound());
    Ok(Status::Ok)
}

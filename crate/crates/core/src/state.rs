//! Pure states of n qubits, Haar sampling, and single-bipartition purity.
//!
//! Basis convention: basis index `b` in `0..2^n` stores qubit `k` (1-based) in
//! bit `k - 1`, i.e. little-endian. `|q_n ... q_2 q_1>` therefore has index
//! `Σ q_k 2^(k-1)`.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bipartition::Bipartition;
use crate::error::{Error, Result};
use crate::kernel::{PartitionKernel, Scratch};
use crate::rng::SeedPath;

/// Largest qubit count a dense state may have.
pub const MAX_QUBITS: usize = 24;

/// Norm tolerance for states handed to the library.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Norm tolerance when reading state files.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;

/// A normalized pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "qubit count must be in 1..=24",
        });
    }
    Ok(())
}

pub(crate) fn norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl PureState {
    /// Wraps `amplitudes`, which must already have unit norm within 1e-9.
    /// The stored vector is rescaled to unit norm.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(n, amplitudes, NORM_TOLERANCE)
    }

    fn with_tolerance(n: usize, amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        check_n(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        let nrm = norm(&amplitudes);
        if !nrm.is_finite() || (nrm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(Self::renormalized(n, amplitudes, nrm))
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalize(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        let nrm = norm(&amplitudes);
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(Self::renormalized(n, amplitudes, nrm))
    }

    fn renormalized(n: usize, mut amplitudes: Vec<Complex64>, nrm: f64) -> Self {
        if nrm != 1.0 {
            let inv = 1.0 / nrm;
            amplitudes.iter_mut().for_each(|z| *z *= inv);
        }
        Self { n, amplitudes }
    }

    /// Internal constructor for vectors already known to be normalized.
    pub(crate) fn from_unit(n: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n);
        let nrm = norm(&amplitudes);
        Self::renormalized(n, amplitudes, nrm)
    }

    /// Computational basis state with the given index.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_n(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes: amps })
    }

    /// (|0...0> + |1...1>)/√2.
    pub fn ghz(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = Complex64::new(h, 0.0);
        amps[(1 << n) - 1] = Complex64::new(h, 0.0);
        Ok(Self { n, amplitudes: amps })
    }

    /// Tensor product of single-qubit states, qubit 1 first.
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        let n = factors.len();
        check_n(n)?;
        let amps = (0..1usize << n)
            .map(|b| {
                factors
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |acc, (k, f)| acc * f[(b >> k) & 1])
            })
            .collect();
        Self::normalize(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension 2^n.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Applies a 2x2 matrix (row-major) to one qubit and renormalizes.
    pub fn apply_single_qubit(&self, qubit: usize, u: [[Complex64; 2]; 2]) -> Result<Self> {
        if qubit == 0 || qubit > self.n {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} outside 1..={}",
                self.n
            )));
        }
        let bit = 1usize << (qubit - 1);
        let mut out = self.amplitudes.clone();
        for b in 0..self.dim() {
            if b & bit == 0 {
                let a0 = self.amplitudes[b];
                let a1 = self.amplitudes[b | bit];
                out[b] = u[0][0] * a0 + u[0][1] * a1;
                out[b | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Self::normalize(self.n, out)
    }

    /// Tensor product `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.n + other.n;
        check_n(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for hi in other.amplitudes() {
            for lo in self.amplitudes() {
                amps.push(lo * hi);
            }
        }
        Self::normalize(n, amps)
    }

    /// Writes the JSON state file `{"n": .., "amplitudes": [[re, im], ..]}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.into_state()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk representation of a [`PureState`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for StateFile {
    fn from(s: &PureState) -> Self {
        Self {
            n: s.n,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl StateFile {
    /// Validates length and norm (within 1e-6) and renormalizes.
    pub fn into_state(self) -> Result<PureState> {
        let amps = self
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PureState::with_tolerance(self.n, amps, FILE_NORM_TOLERANCE)
    }
}

fn check_pair(state: &PureState, bipartition: &Bipartition) -> Result<()> {
    if bipartition.n() != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            found: bipartition.n(),
        });
    }
    Ok(())
}

/// tr(ρ_A²) computed with the Gram-matrix kernel.
pub fn purity(state: &PureState, bipartition: &Bipartition) -> Result<f64> {
    check_pair(state, bipartition)?;
    let nrm = state.norm();
    if (nrm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: nrm });
    }
    let kernel = PartitionKernel::new(bipartition);
    Ok(kernel.purity(state.amplitudes(), &mut Scratch::default()))
}

/// tr(ρ_A²) from the full density matrix and an explicit partial trace.
///
/// Costs O(4^n); meant as an independent check for small systems.
pub fn purity_oracle(state: &PureState, bipartition: &Bipartition) -> Result<f64> {
    check_pair(state, bipartition)?;
    let dim = state.dim();
    let a_bits = bipartition.zero_based();
    let abar_mask = (!bipartition.mask() as usize) & (dim - 1);
    let da = 1usize << a_bits.len();
    let extract = |b: usize| -> usize {
        a_bits
            .iter()
            .enumerate()
            .map(|(j, &q)| ((b >> q) & 1) << j)
            .sum()
    };
    let psi = state.amplitudes();
    let rho: Vec<Complex64> = (0..dim * dim)
        .map(|ij| psi[ij / dim] * psi[ij % dim].conj())
        .collect();
    let mut rho_a = vec![Complex64::new(0.0, 0.0); da * da];
    for i in 0..dim {
        for j in 0..dim {
            if i & abar_mask == j & abar_mask {
                rho_a[extract(i) * da + extract(j)] += rho[i * dim + j];
            }
        }
    }
    let mut tr = Complex64::new(0.0, 0.0);
    for a in 0..da {
        for b in 0..da {
            tr += rho_a[a * da + b] * rho_a[b * da + a];
        }
    }
    Ok(tr.re)
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes, normalized.
pub fn random_haar_state(n: usize, seed: u64) -> Result<PureState> {
    haar_from_path(n, &SeedPath::new(seed))
}

pub fn haar_from_path(n: usize, path: &SeedPath) -> Result<PureState> {
    check_n(n)?;
    let mut rng = path.rng();
    Ok(haar_from_rng(n, &mut rng))
}

pub(crate) fn haar_from_rng<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    PureState::from_unit(n, amps)
}

//! Average purity over a set of bipartitions, with its gradient.

use num_complex::Complex64;

use crate::bipartition::{enumerate_balanced, Bipartition};
use crate::error::{Error, Result};
use crate::kernel::{PartitionKernel, Scratch};
use crate::state::PureState;

/// Neumaier-compensated sum.
pub(crate) fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean of tr(ρ_A²) over a fixed list of bipartitions of `n` qubits.
#[derive(Clone, Debug)]
pub struct PurityObjective {
    n: usize,
    bipartitions: Vec<Bipartition>,
    kernels: Vec<PartitionKernel>,
}

impl PurityObjective {
    /// The potential of multipartite entanglement: all balanced bipartitions.
    pub fn balanced(n: usize) -> Result<Self> {
        let set = enumerate_balanced(n)?;
        Self::build(n, set.members().to_vec())
    }

    /// Restricted to `subset`, which must hold distinct balanced bipartitions of `n` qubits.
    pub fn subset(n: usize, subset: &[Bipartition]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument("bipartition subset is empty".into()));
        }
        let mut seen = Vec::with_capacity(subset.len());
        for b in subset {
            if b.n() != n {
                return Err(Error::InvalidBipartition(format!(
                    "{b} belongs to {} qubits, expected {n}",
                    b.n()
                )));
            }
            if !b.is_balanced() {
                return Err(Error::InvalidBipartition(format!("{b} is not balanced")));
            }
            let c = b.canonical();
            if seen.contains(&c) {
                return Err(Error::InvalidBipartition(format!("{b} listed twice")));
            }
            seen.push(c);
        }
        Self::build(n, seen)
    }

    fn build(n: usize, bipartitions: Vec<Bipartition>) -> Result<Self> {
        if n > 16 {
            return Err(Error::InvalidQubitCount {
                n,
                reason: "purity objective limited to 16 qubits",
            });
        }
        let kernels = bipartitions.iter().map(PartitionKernel::new).collect();
        Ok(Self {
            n,
            bipartitions,
            kernels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bipartitions(&self) -> &[Bipartition] {
        &self.bipartitions
    }

    pub fn len(&self) -> usize {
        self.bipartitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bipartitions.is_empty()
    }

    /// Per-bipartition purities, in the objective's order.
    pub fn purities(&self, amplitudes: &[Complex64], scratch: &mut Scratch) -> Vec<f64> {
        self.kernels
            .iter()
            .map(|k| k.purity(amplitudes, scratch))
            .collect()
    }

    pub fn value(&self, amplitudes: &[Complex64], scratch: &mut Scratch) -> f64 {
        let sum = stable_sum(self.kernels.iter().map(|k| k.purity(amplitudes, scratch)));
        sum / self.len() as f64
    }

    /// Returns the mean purity and overwrites `grad` with its ambient
    /// gradient (∂/∂Re ψ + i ∂/∂Im ψ of the quartic extension).
    pub fn value_and_gradient(
        &self,
        amplitudes: &[Complex64],
        grad: &mut [Complex64],
        scratch: &mut Scratch,
    ) -> f64 {
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let w = 1.0 / self.len() as f64;
        let sum = stable_sum(
            self.kernels
                .iter()
                .map(|k| k.purity_and_gradient(amplitudes, w, grad, scratch)),
        );
        sum * w
    }

    /// Gradient on the unit sphere at a normalized state: the ambient
    /// gradient with its radial component removed.
    pub fn riemannian_gradient(&self, state: &PureState) -> Result<(f64, Vec<Complex64>)> {
        if state.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: state.n(),
            });
        }
        let psi = state.amplitudes();
        let mut grad = vec![Complex64::new(0.0, 0.0); psi.len()];
        let value = self.value_and_gradient(psi, &mut grad, &mut Scratch::default());
        project_tangent(psi, &mut grad);
        Ok((value, grad))
    }
}

/// Real inner product Re⟨a, b⟩.
pub(crate) fn real_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Removes the component of `v` along the unit vector `psi` (real inner product).
pub(crate) fn project_tangent(psi: &[Complex64], v: &mut [Complex64]) {
    let r = real_dot(psi, v);
    for (g, p) in v.iter_mut().zip(psi) {
        *g -= p * r;
    }
}

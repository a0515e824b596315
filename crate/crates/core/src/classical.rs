//! Classical frustration: agents with pairwise couplings that cannot all be
//! satisfied at once.
//!
//! The cost of a spin configuration is H = −½ Σ_{i≠k} J_ik S_i S_k. Three
//! agents that all want to disagree (J = −1 everywhere) cannot reach the sum
//! of the pairwise minima (−3); the best they can do is −1.

use crate::error::{Error, Result};

/// Largest agent count accepted by [`ising_min`].
pub const MAX_AGENTS: usize = 24;

/// Symmetric couplings with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    m: usize,
    j: Vec<f64>,
}

impl CouplingMatrix {
    pub fn new(m: usize, j: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one agent".into()));
        }
        if j.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: j.len(),
            });
        }
        for i in 0..m {
            if j[i * m + i] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "coupling diagonal must be zero, J[{i}][{i}] = {}",
                    j[i * m + i]
                )));
            }
            for k in 0..i {
                let v = j[i * m + k];
                if !v.is_finite() {
                    return Err(Error::NonFinite { value: v });
                }
                if v != j[k * m + i] {
                    return Err(Error::InvalidArgument(format!(
                        "couplings not symmetric at ({i}, {k})"
                    )));
                }
            }
        }
        Ok(Self { m, j })
    }

    /// Every pair coupled with the same constant.
    pub fn uniform(m: usize, value: f64) -> Result<Self> {
        let j = (0..m * m)
            .map(|idx| if idx / m == idx % m { 0.0 } else { value })
            .collect();
        Self::new(m, j)
    }

    pub fn agents(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.m + k]
    }

    /// −½ Σ_{i≠k} |J_ik|, reached only when no pair is frustrated.
    pub fn lower_bound(&self) -> f64 {
        -0.5 * self.j.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// H = −½ Σ_{i≠k} J_ik S_i S_k over ordered pairs.
pub fn ising_cost(couplings: &CouplingMatrix, spins: &[i8]) -> Result<f64> {
    let m = couplings.agents();
    if spins.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: spins.len(),
        });
    }
    if let Some(bad) = spins.iter().find(|s| s.abs() != 1) {
        return Err(Error::InvalidArgument(format!("spin {bad} is not ±1")));
    }
    Ok(cost_unchecked(couplings, spins))
}

fn cost_unchecked(couplings: &CouplingMatrix, spins: &[i8]) -> f64 {
    let m = couplings.agents();
    let mut sum = 0.0;
    for i in 0..m {
        for k in 0..m {
            if i != k {
                sum += couplings.get(i, k) * f64::from(spins[i] * spins[k]);
            }
        }
    }
    -0.5 * sum
}

/// Spin configuration read as an m-bit binary number, agent 1 most
/// significant, a set bit meaning −1.
fn decode(m: usize, code: u32, spins: &mut [i8]) {
    for (i, s) in spins.iter_mut().enumerate().take(m) {
        *s = if code >> (m - 1 - i) & 1 == 1 { -1 } else { 1 };
    }
}

/// Exhaustive minimum over all 2^m configurations. Among equal costs the
/// configuration with the smallest binary code wins; since H is invariant
/// under a global flip, the witness always has agent 1 at +1.
pub fn ising_min(couplings: &CouplingMatrix) -> Result<(f64, Vec<i8>)> {
    let m = couplings.agents();
    if m > MAX_AGENTS {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to {MAX_AGENTS} agents, got {m}"
        )));
    }
    let mut spins = vec![1i8; m];
    let mut best = (f64::INFINITY, 0u32);
    for code in 0..1u32 << m {
        decode(m, code, &mut spins);
        let cost = cost_unchecked(couplings, &spins);
        if cost < best.0 {
            best = (cost, code);
        }
    }
    decode(m, best.1, &mut spins);
    Ok((best.0, spins))
}

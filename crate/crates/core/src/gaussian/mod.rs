//! Pure zero-mean Gaussian states of n bosonic modes.
//!
//! Covariance matrices use the ordering (q₁, p₁, …, qₙ, pₙ) with ħ = 1, so the
//! vacuum is I/2. First moments are fixed at zero: displacements are local
//! and leave every reduced purity unchanged.

mod optimize;
mod symplectic;

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use optimize::{
    frustration_sweep, minimize_gaussian_potential, GaussianOptimizationResult, SweepPoint,
    SweepResult, SATURATION_TOLERANCE,
};
pub use symplectic::{
    param_count, pure_gaussian_from_params, symplectic_form, symplectic_from_params,
    MAX_GENERATOR_NORM,
};

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const UNCERTAINTY_TOLERANCE: f64 = 1e-9;
const PURITY_TOLERANCE: f64 = 1e-8;

/// Covariance matrix of a zero-mean Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    n: usize,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty relation V + iΩ/2 ≥ 0.
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::InvalidCovariance(format!(
                "expected a square matrix of even size, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE {
            return Err(Error::InvalidCovariance(format!("asymmetry {asym:e}")));
        }
        let state = Self { n: dim / 2, cov };
        let lowest = state.uncertainty_min_eigenvalue();
        if lowest < -UNCERTAINTY_TOLERANCE {
            return Err(Error::InvalidCovariance(format!(
                "violates the uncertainty relation (eigenvalue {lowest:e})"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_trusted(cov: DMatrix<f64>) -> Self {
        let n = cov.nrows() / 2;
        let sym = (&cov + cov.transpose()) * 0.5;
        Self { n, cov: sym }
    }

    pub fn vacuum(n: usize) -> Self {
        Self::thermal(n, 0.0)
    }

    /// V = (nbar + 1/2)·I.
    pub fn thermal(n: usize, nbar: f64) -> Self {
        Self {
            n,
            cov: DMatrix::identity(2 * n, 2 * n) * (nbar + 0.5),
        }
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        Self { n: 2, cov }
    }

    /// Number of modes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Smallest eigenvalue of the real form of V + iΩ/2.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let dim = 2 * self.n;
        let half_omega = symplectic_form(self.n) * 0.5;
        // Hermitian A + iB is PSD iff [[A, -B], [B, A]] is.
        let mut real = DMatrix::zeros(2 * dim, 2 * dim);
        real.view_mut((0, 0), (dim, dim)).copy_from(&self.cov);
        real.view_mut((dim, dim), (dim, dim)).copy_from(&self.cov);
        real.view_mut((0, dim), (dim, dim)).copy_from(&(-&half_omega));
        real.view_mut((dim, 0), (dim, dim)).copy_from(&half_omega);
        real.symmetric_eigenvalues().min()
    }

    /// 1 / (2ⁿ √det V).
    pub fn global_purity(&self) -> f64 {
        let det = self.cov.determinant();
        1.0 / (2f64.powi(self.n as i32) * det.sqrt())
    }

    /// det(2V) = 1 within 1e-8.
    pub fn is_pure(&self) -> bool {
        ((&self.cov * 2.0).determinant() - 1.0).abs() <= PURITY_TOLERANCE
    }

    /// Mean excitation of mode `k` (1-based) plus 1/2: (V_qq + V_pp)/2.
    pub fn mode_energy(&self, k: usize) -> f64 {
        let i = 2 * (k - 1);
        0.5 * (self.cov[(i, i)] + self.cov[(i + 1, i + 1)])
    }

    /// Principal submatrix over the (q, p) rows of the listed 1-based modes.
    pub fn reduced(&self, modes: &[usize]) -> Result<DMatrix<f64>> {
        check_modes(self.n, modes)?;
        let rows: Vec<usize> = modes.iter().flat_map(|&k| [2 * (k - 1), 2 * (k - 1) + 1]).collect();
        Ok(DMatrix::from_fn(rows.len(), rows.len(), |i, j| self.cov[(rows[i], rows[j])]))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CovarianceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CovarianceFile = serde_json::from_str(text)?;
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

/// Phase-space ordering label for `n` modes.
pub fn ordering_label(n: usize) -> String {
    (1..=n)
        .map(|k| format!("q{k},p{k}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// JSON form of a covariance matrix: rows in order, each a list of reals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CovarianceFile {
    pub n: usize,
    pub ordering: String,
    pub covariance: Vec<Vec<f64>>,
}

impl From<&GaussianState> for CovarianceFile {
    fn from(s: &GaussianState) -> Self {
        Self {
            n: s.n,
            ordering: ordering_label(s.n),
            covariance: s
                .cov
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

impl CovarianceFile {
    pub fn into_state(self) -> Result<GaussianState> {
        if self.ordering != ordering_label(self.n) {
            return Err(Error::InvalidCovariance(format!(
                "unsupported ordering {:?}",
                self.ordering
            )));
        }
        let dim = 2 * self.n;
        if self.covariance.len() != dim || self.covariance.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidCovariance(format!("expected {dim}x{dim} entries")));
        }
        let flat: Vec<f64> = self.covariance.into_iter().flatten().collect();
        GaussianState::new(DMatrix::from_row_slice(dim, dim, &flat))
    }
}

/// Average excitation cap 𝒩 per mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitationConstraint {
    nbar: f64,
}

impl ExcitationConstraint {
    pub fn new(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "excitation cap must be finite and non-negative, got {nbar}"
            )));
        }
        Ok(Self { nbar })
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Largest allowed (⟨q²⟩ + ⟨p²⟩)/2 for a mode.
    pub fn energy_cap(&self) -> f64 {
        self.nbar + 0.5
    }
}

fn check_modes(n: usize, modes: &[usize]) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::InvalidArgument("mode subset is empty".into()));
    }
    for (i, &k) in modes.iter().enumerate() {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("mode {k} outside 1..={n}")));
        }
        if modes[..i].contains(&k) {
            return Err(Error::InvalidArgument(format!("mode {k} listed twice")));
        }
    }
    Ok(())
}

/// π_A = 1 / (2^{n_A} √det V_A) for the listed 1-based modes.
pub fn gaussian_purity(state: &GaussianState, modes: &[usize]) -> Result<f64> {
    let sub = state.reduced(modes)?;
    let det = sub.determinant();
    if !(det > 0.0) {
        return Err(Error::InvalidCovariance(format!(
            "reduced covariance has non-positive determinant {det:e}"
        )));
    }
    Ok(1.0 / (2f64.powi(modes.len() as i32) * det.sqrt()))
}

/// 1 / (2^m (𝒩 + 1/2)^m) with m = floor(n/2): the purity of m thermal modes.
pub fn thermal_bound(n: usize, nbar: f64) -> Result<f64> {
    ExcitationConstraint::new(nbar)?;
    let m = (n / 2) as i32;
    Ok(1.0 / (2f64.powi(m) * (nbar + 0.5).powi(m)))
}

/// Every mode satisfies (V_qq + V_pp)/2 ≤ 𝒩 + 1/2 (with 1e-9 slack).
pub fn constraint_satisfied(state: &GaussianState, c: &ExcitationConstraint) -> bool {
    (1..=state.n()).all(|k| state.mode_energy(k) <= c.energy_cap() + 1e-9)
}

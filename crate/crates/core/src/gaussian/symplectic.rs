//! Pure Gaussian states from the symplectic Lie algebra.
//!
//! A parameter vector holds the upper triangle (row-major, diagonal included)
//! of a symmetric 2n×2n matrix H. The generator X = Ω·H satisfies ΩX
//! symmetric, so S = exp(X) is symplectic and V = S·Sᵀ/2 is a pure state.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::GaussianState;

/// Generators with a larger Frobenius norm are rejected before exponentiation.
pub const MAX_GENERATOR_NORM: f64 = 40.0;

/// n(2n + 1): the dimension of sp(2n, ℝ).
pub fn param_count(n: usize) -> usize {
    n * (2 * n + 1)
}

/// Ω = ⊕ₖ [[0, 1], [−1, 0]].
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// The symmetric matrix H encoded by `params`.
pub(crate) fn symmetric_from_params(n: usize, params: &[f64]) -> DMatrix<f64> {
    let dim = 2 * n;
    let mut h = DMatrix::zeros(dim, dim);
    let mut it = params.iter();
    for i in 0..dim {
        for j in i..dim {
            let v = *it.next().expect("parameter count checked by caller");
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Hamiltonian generator X = Ω·H.
pub(crate) fn generator(n: usize, params: &[f64]) -> DMatrix<f64> {
    symplectic_form(n) * symmetric_from_params(n, params)
}

fn check(n: usize, params: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if params.len() != param_count(n) {
        return Err(Error::DimensionMismatch {
            expected: param_count(n),
            found: params.len(),
        });
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("non-finite parameter".into()));
    }
    Ok(())
}

pub(crate) fn exp_generator(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let size = x.norm();
    if size > MAX_GENERATOR_NORM {
        return Err(Error::Exponential(format!(
            "generator norm {size:.3} exceeds {MAX_GENERATOR_NORM}"
        )));
    }
    let s = x.exp();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Exponential("non-finite result".into()));
    }
    Ok(s)
}

/// S = exp(Ω·H(params)).
pub fn symplectic_from_params(n: usize, params: &[f64]) -> Result<DMatrix<f64>> {
    check(n, params)?;
    exp_generator(&generator(n, params))
}

/// V = S·Sᵀ/2 with S = exp(Ω·H(params)).
pub fn pure_gaussian_from_params(n: usize, params: &[f64]) -> Result<GaussianState> {
    let s = symplectic_from_params(n, params)?;
    Ok(GaussianState::from_trusted(&s * s.transpose() * 0.5))
}

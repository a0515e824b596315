//! Independent reference computations shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use mmes::gaussian::{param_count, symplectic_form, GaussianState};
use mmes::{Bipartition, PureState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// tr(ρ_A²) from an explicitly assembled reduced density matrix, with the
/// basis index rebuilt bit by bit.
pub fn reduced_purity(state: &PureState, b: &Bipartition) -> f64 {
    let n = state.n();
    let a: Vec<usize> = b.parties().iter().map(|p| p - 1).collect();
    let rest: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
    let (da, dr) = (1usize << a.len(), 1usize << rest.len());
    let index = |ia: usize, ir: usize| {
        let mut idx = 0;
        for (bit, &q) in a.iter().enumerate() {
            idx |= (ia >> bit & 1) << q;
        }
        for (bit, &q) in rest.iter().enumerate() {
            idx |= (ir >> bit & 1) << q;
        }
        idx
    };
    let amps = state.amplitudes();
    let mut rho = vec![Complex64::new(0.0, 0.0); da * da];
    for i in 0..da {
        for j in 0..da {
            rho[i * da + j] = (0..dr).map(|r| amps[index(i, r)] * amps[index(j, r)].conj()).sum();
        }
    }
    let mut trace = 0.0;
    for i in 0..da {
        for j in 0..da {
            trace += (rho[i * da + j] * rho[j * da + i]).re;
        }
    }
    trace
}

/// Average balanced purity through [`reduced_purity`].
pub fn reference_potential(state: &PureState) -> f64 {
    let set = mmes::enumerate_balanced(state.n()).unwrap();
    set.iter().map(|b| reduced_purity(state, b)).sum::<f64>() / set.k() as f64
}

/// Central differences of ψ ↦ π_ME(ψ/‖ψ‖) along the real and imaginary part
/// of every amplitude.
pub fn fd_gradient(state: &PureState, h: f64) -> Vec<Complex64> {
    let n = state.n();
    let f = |amps: Vec<Complex64>| mmes::potential(&PureState::normalize(n, amps).unwrap()).unwrap();
    let base = state.amplitudes().to_vec();
    (0..base.len())
        .map(|j| {
            let mut d = [0.0; 2];
            for (part, dir) in [Complex64::new(h, 0.0), Complex64::new(0.0, h)].iter().enumerate() {
                let mut plus = base.clone();
                let mut minus = base.clone();
                plus[j] += dir;
                minus[j] -= dir;
                d[part] = (f(plus) - f(minus)) / (2.0 * h);
            }
            Complex64::new(d[0], d[1])
        })
        .collect()
}

/// Haar-random 2×2 unitary from Euler angles and a global phase.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
    use std::f64::consts::PI;
    let (a, b, c, d): (f64, f64, f64, f64) = (
        rng.random::<f64>() * 2.0 * PI,
        rng.random::<f64>() * 2.0 * PI,
        rng.random::<f64>() * 2.0 * PI,
        rng.random::<f64>(),
    );
    let theta = d.sqrt().asin();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (s, co) = theta.sin_cos();
    [
        [e(a + b) * co, e(a + c) * s],
        [-e(a - c) * s, e(a - b) * co],
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform parameters in [-scale, scale] for a pure Gaussian state.
pub fn random_params(rng: &mut ChaCha8Rng, modes: usize, scale: f64) -> Vec<f64> {
    (0..param_count(modes))
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale)
        .collect()
}

/// Frobenius norm of SᵀΩS − Ω.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    (s.transpose() * &omega * s - omega).norm()
}

/// 1 / (2^{|A|} √det V_A) computed from an LU determinant of the submatrix.
pub fn reference_gaussian_purity(state: &GaussianState, modes: &[usize]) -> f64 {
    let v = state.covariance();
    let rows: Vec<usize> = modes.iter().flat_map(|&k| [2 * k - 2, 2 * k - 1]).collect();
    let sub = DMatrix::from_fn(rows.len(), rows.len(), |i, j| v[(rows[i], rows[j])]);
    1.0 / (2f64.powi(modes.len() as i32) * sub.lu().determinant().sqrt())
}

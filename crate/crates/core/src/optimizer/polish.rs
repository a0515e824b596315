//! Riemannian L-BFGS on the unit sphere with Armijo backtracking.
//!
//! Iterates are retracted by normalization, stored curvature pairs are
//! transported by tangent projection, and every accepted step satisfies the
//! Armijo condition, so the objective never increases.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::kernel::Scratch;
use crate::objective::{project_tangent, real_dot, PurityObjective};
use crate::state::norm;

const MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;

pub(crate) struct PolishOutcome {
    pub state: Vec<Complex64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<(usize, f64)>,
}

struct Pair {
    s: Vec<Complex64>,
    y: Vec<Complex64>,
    rho: f64,
}

fn retract(x: &[Complex64], d: &[Complex64], t: f64, out: &mut [Complex64]) {
    for ((o, a), b) in out.iter_mut().zip(x).zip(d) {
        *o = a + b * t;
    }
    let inv = 1.0 / norm(out);
    out.iter_mut().for_each(|z| *z *= inv);
}

fn gradient_at(
    objective: &PurityObjective,
    x: &[Complex64],
    g: &mut [Complex64],
    scratch: &mut Scratch,
) -> f64 {
    let f = objective.value_and_gradient(x, g, scratch);
    project_tangent(x, g);
    f
}

pub(crate) fn polish(
    objective: &PurityObjective,
    start: Vec<Complex64>,
    max_iters: usize,
    tolerance: f64,
    scratch: &mut Scratch,
) -> PolishOutcome {
    let dim = start.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = start;
    let mut g = vec![zero; dim];
    let mut f = gradient_at(objective, &x, &mut g, scratch);
    let mut x_new = vec![zero; dim];
    let mut g_new = vec![zero; dim];
    let mut d = vec![zero; dim];
    let mut memory: VecDeque<Pair> = VecDeque::with_capacity(MEMORY);
    let mut alpha = [0.0; MEMORY];
    let mut trace = vec![(0, f)];
    let every = (max_iters / 50).max(1);
    let mut converged = false;
    let mut iterations = 0;
    let mut gnorm = real_dot(&g, &g).sqrt();

    while iterations < max_iters {
        if gnorm <= tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        // Two-loop recursion for d = -H g.
        d.copy_from_slice(&g);
        for (i, p) in memory.iter().enumerate().rev() {
            alpha[i] = p.rho * real_dot(&p.s, &d);
            for (di, yi) in d.iter_mut().zip(&p.y) {
                *di -= yi * alpha[i];
            }
        }
        let gamma = match memory.back() {
            Some(p) => real_dot(&p.s, &p.y) / real_dot(&p.y, &p.y),
            None => 0.1 / gnorm.max(1e-300),
        };
        d.iter_mut().for_each(|z| *z *= gamma);
        for (i, p) in memory.iter().enumerate() {
            let beta = p.rho * real_dot(&p.y, &d);
            for (di, si) in d.iter_mut().zip(&p.s) {
                *di += si * (alpha[i] - beta);
            }
        }
        d.iter_mut().for_each(|z| *z = -*z);
        project_tangent(&x, &mut d);
        let mut slope = real_dot(&g, &d);
        if !(slope < -1e-12 * gnorm * real_dot(&d, &d).sqrt()) {
            memory.clear();
            let scale = 0.1 / gnorm.max(1e-300);
            for (di, gi) in d.iter_mut().zip(&g) {
                *di = -gi * scale;
            }
            slope = real_dot(&g, &d);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            retract(&x, &d, t, &mut x_new);
            let f_try = objective.value(&x_new, scratch);
            if f_try <= f + ARMIJO * t * slope {
                accepted = Some(f_try);
                break;
            }
            t *= 0.5;
        }
        let Some(_) = accepted else {
            // No decrease along d at any tested step: numerically stationary.
            break;
        };

        let f_next = gradient_at(objective, &x_new, &mut g_new, scratch);
        // Curvature pair, both vectors living in the tangent space at x_new.
        let mut s: Vec<Complex64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        project_tangent(&x_new, &mut s);
        let mut g_old = g.clone();
        project_tangent(&x_new, &mut g_old);
        let y: Vec<Complex64> = g_new.iter().zip(&g_old).map(|(a, b)| a - b).collect();
        let sy = real_dot(&s, &y);
        for p in memory.iter_mut() {
            project_tangent(&x_new, &mut p.s);
            project_tangent(&x_new, &mut p.y);
        }
        if sy > 1e-18 {
            if memory.len() == MEMORY {
                memory.pop_front();
            }
            memory.push_back(Pair { s, y, rho: 1.0 / sy });
        }

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_next;
        gnorm = real_dot(&g, &g).sqrt();
        if iterations % every == 0 {
            trace.push((iterations, f));
        }
    }
    if gnorm <= tolerance {
        converged = true;
    }
    if trace.last().map(|&(i, _)| i) != Some(iterations) {
        trace.push((iterations, f));
    }
    PolishOutcome {
        state: x,
        value: f,
        gradient_norm: gnorm,
        iterations,
        converged,
        trace,
    }
}

//! Gram-matrix purity kernel.
//!
//! For a bipartition (A, Ā) with N_A <= N_Ā the amplitude vector is gathered
//! into an N_A x N_Ā row-major matrix M and tr(ρ_A²) = ‖M·M†‖²_F. The reduced
//! density matrix is the Gram matrix G = M·M†, so only its upper triangle is
//! formed.

use num_complex::Complex64;

use crate::bipartition::Bipartition;

/// Precomputed gather table for one bipartition.
#[derive(Clone, Debug)]
pub struct PartitionKernel {
    rows: usize,
    cols: usize,
    /// `index[r * cols + c]` is the basis index for row `r` (bits of the
    /// smaller party) and column `c` (bits of the larger party).
    index: Vec<u32>,
}

/// Spreads the low bits of `value` onto the bit positions listed in `positions`.
fn deposit(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &p)| acc | (((value >> j) & 1) << p))
}

impl PartitionKernel {
    pub fn new(bipartition: &Bipartition) -> Self {
        let small = bipartition.canonical();
        let row_bits = small.zero_based();
        let col_bits = small.complement().zero_based();
        let rows = 1usize << row_bits.len();
        let cols = 1usize << col_bits.len();
        let row_part: Vec<usize> = (0..rows).map(|r| deposit(r, &row_bits)).collect();
        let col_part: Vec<usize> = (0..cols).map(|c| deposit(c, &col_bits)).collect();
        let mut index = Vec::with_capacity(rows * cols);
        for &rp in &row_part {
            for &cp in &col_part {
                index.push((rp | cp) as u32);
            }
        }
        Self { rows, cols, index }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    fn gather(&self, amplitudes: &[Complex64], m: &mut [Complex64]) {
        for (dst, &i) in m.iter_mut().zip(&self.index) {
            *dst = amplitudes[i as usize];
        }
    }

    /// Fills the full Hermitian Gram matrix (rows x rows) and returns tr(G²).
    fn gram(&self, m: &[Complex64], g: &mut [Complex64]) -> f64 {
        let (rows, cols) = (self.rows, self.cols);
        let mut diag = 0.0;
        let mut off = 0.0;
        for i in 0..rows {
            let ri = &m[i * cols..(i + 1) * cols];
            let gii: f64 = ri.iter().map(|z| z.norm_sqr()).sum();
            g[i * rows + i] = Complex64::new(gii, 0.0);
            diag += gii * gii;
            for j in (i + 1)..rows {
                let rj = &m[j * cols..(j + 1) * cols];
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, b) in ri.iter().zip(rj) {
                    acc += a * b.conj();
                }
                g[i * rows + j] = acc;
                g[j * rows + i] = acc.conj();
                off += acc.norm_sqr();
            }
        }
        diag + 2.0 * off
    }

    /// tr(ρ_A²) of an unnormalized amplitude vector (a quartic form).
    pub fn purity(&self, amplitudes: &[Complex64], scratch: &mut Scratch) -> f64 {
        scratch.ensure(self.dim(), self.rows);
        self.gather(amplitudes, &mut scratch.m);
        self.gram(&scratch.m, &mut scratch.g)
    }

    /// Returns tr(ρ_A²) and adds `weight * ∇` to `grad`, where ∇ = 4·ρ_A·M
    /// scattered back to basis order is the gradient of the quartic form with
    /// respect to (Re ψ, Im ψ) packed as a complex vector.
    pub fn purity_and_gradient(
        &self,
        amplitudes: &[Complex64],
        weight: f64,
        grad: &mut [Complex64],
        scratch: &mut Scratch,
    ) -> f64 {
        scratch.ensure(self.dim(), self.rows);
        let (rows, cols) = (self.rows, self.cols);
        self.gather(amplitudes, &mut scratch.m);
        let value = self.gram(&scratch.m, &mut scratch.g);
        let scale = 4.0 * weight;
        let m = &scratch.m;
        let g = &scratch.g;
        let acc = &mut scratch.row;
        for i in 0..rows {
            acc.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for j in 0..rows {
                let gij = g[i * rows + j];
                let rj = &m[j * cols..(j + 1) * cols];
                for (a, b) in acc.iter_mut().zip(rj) {
                    *a += gij * b;
                }
            }
            let idx = &self.index[i * cols..(i + 1) * cols];
            for (a, &k) in acc.iter().zip(idx) {
                grad[k as usize] += a * scale;
            }
        }
        value
    }
}

/// Reusable buffers for the kernel.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    m: Vec<Complex64>,
    g: Vec<Complex64>,
    row: Vec<Complex64>,
}

impl Scratch {
    fn ensure(&mut self, dim: usize, rows: usize) {
        let zero = Complex64::new(0.0, 0.0);
        if self.m.len() != dim {
            self.m.resize(dim, zero);
            self.row.resize(dim / rows, zero);
        }
        if self.row.len() != dim / rows {
            self.row.resize(dim / rows, zero);
        }
        if self.g.len() != rows * rows {
            self.g.resize(rows * rows, zero);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_table_is_a_permutation() {
        for n in 2..=7 {
            for mask in 1..((1u32 << n) - 1) {
                let k = PartitionKernel::new(&Bipartition::new(n, mask).unwrap());
                let mut seen = vec![false; 1 << n];
                for &i in &k.index {
                    assert!(!seen[i as usize]);
                    seen[i as usize] = true;
                }
                assert!(k.rows <= k.cols);
            }
        }
    }

    #[test]
    fn deposit_spreads_bits() {
        assert_eq!(deposit(0b11, &[1, 3]), 0b1010);
        assert_eq!(deposit(0b10, &[0, 2]), 0b100);
    }
}

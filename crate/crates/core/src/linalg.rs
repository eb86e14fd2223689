//! Small dense linear algebra: complex matrices in floating point (Hermitian
//! spectra, operator norms, numerical rank) and exact rank over the Gaussian
//! rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::scalar::GaussQ;

/// Absolute tolerance used for every floating-point check.
pub const TOLERANCE: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        self.sub(rhs).data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// The `n×n` Hermitian `A + iB` is embedded as the real symmetric
    /// `[[A, -B], [B, A]]`, whose spectrum is that of `A + iB` with every
    /// eigenvalue doubled; the embedding is diagonalized by cyclic Jacobi.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert_eq!(self.rows, self.cols, "eigenvalues of a non-square matrix");
        let n = self.rows;
        let mut sym = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                // symmetrize so round-off asymmetry cannot leak in
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                sym[i][j] = z.re;
                sym[i + n][j + n] = z.re;
                sym[i][j + n] = -z.im;
                sym[i + n][j] = z.im;
            }
        }
        let eig = jacobi_eigenvalues(sym);
        // each eigenvalue appears twice in sorted order
        eig.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.iter().all(|z| z.is_zero()) {
            return 0.0;
        }
        let gram = self.adjoint().matmul(self);
        let top = gram.hermitian_eigenvalues().last().copied().unwrap_or(0.0);
        libm::sqrt(top.max(0.0))
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let (pivot, best) = (row..m.rows)
                .map(|r| (r, m[(r, col)].norm()))
                .fold((row, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best <= tol {
                continue;
            }
            for j in 0..m.cols {
                let tmp = m[(row, j)];
                m[(row, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            let p = m[(row, col)];
            for r in row + 1..m.rows {
                let factor = m[(r, col)] / p;
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m[(row, j)];
                    m[(r, j)] -= factor * v;
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>();
    let threshold = 1e-30 * scale.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

/// Exact rank of a matrix over the Gaussian rationals.
pub fn exact_rank(mut m: Vec<Vec<GaussQ>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].inv().expect("pivot is nonzero");
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for j in col..cols {
                let v = &factor * &m[rank][j];
                m[r][j] = &m[r][j] - &v;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.0, -1.0);
        m[(1, 0)] = c(0.0, 1.0);
        let e = m.hermitian_eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        // [[1, 1], [0, 0]] has norm sqrt 2
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(1.0, 0.0);
        assert!((m.spectral_norm() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.rank(TOLERANCE), 1);
    }

    #[test]
    fn eigenvalues_match_trace_and_det() {
        let mut m = CMatrix::zeros(3, 3);
        let entries = [(0, 0, 2.0, 0.0), (1, 1, 3.0, 0.0), (2, 2, -1.0, 0.0), (0, 1, 0.5, 0.25), (1, 2, -0.3, 0.7), (0, 2, 0.1, -0.2)];
        for (i, j, re, im) in entries {
            m[(i, j)] = c(re, im);
            m[(j, i)] = c(re, -im);
        }
        let e = m.hermitian_eigenvalues();
        assert!((e.iter().sum::<f64>() - 4.0).abs() < 1e-10);
        let sq: f64 = e.iter().map(|x| x * x).sum();
        let frob: f64 = m.data.iter().map(|z| z.norm_sqr()).sum();
        assert!((sq - frob).abs() < 1e-10);
    }

    #[test]
    fn exact_rank_examples() {
        let one = GaussQ::one();
        let i = GaussQ::i();
        let z = GaussQ::zero();
        // rows (1, i) and (i, -1) are dependent: second = i * first
        let m = vec![vec![one.clone(), i.clone()], vec![i.clone(), GaussQ::real(int(-1))]];
        assert_eq!(exact_rank(m), 1);
        let m = vec![vec![one.clone(), z.clone()], vec![z.clone(), i]];
        assert_eq!(exact_rank(m), 2);
        assert_eq!(exact_rank(vec![vec![z.clone(), z]]), 0);
    }
}

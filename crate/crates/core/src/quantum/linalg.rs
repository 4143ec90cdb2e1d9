//! Dense complex matrices and Hermitian eigenvalues.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
const JACOBI_TOLERANCE: f64 = 1e-12;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(CMatrix { dim, data })
    }

    /// Real matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, data)
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                if s == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + j * b + l] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other)?;
        Ok(CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add_assign(&mut self, other: &CMatrix) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.data {
            *a *= factor;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry of `|M - M^†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry of `|M^† M - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        let prod = self.adjoint().matmul(self).expect("same dimension");
        let id = Self::identity(self.dim);
        prod.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// `H = A + iB` is diagonalized through its real symmetric embedding
/// `[[A, -B], [B, A]]` with cyclic Jacobi rotations; the embedding carries
/// every eigenvalue of `H` twice.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.dim();
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            // symmetrize so round-off in the input cannot stall the iteration
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * size + j] = z.re;
            a[(i + n) * size + j + n] = z.re;
            a[i * size + j + n] = -z.im;
            a[(i + n) * size + j] = z.im;
        }
    }
    let mut doubled = symmetric_jacobi(&mut a, size);
    doubled.sort_by(f64::total_cmp);
    doubled.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

fn off_diagonal_norm(a: &[f64], size: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..size {
        for j in 0..size {
            if i != j {
                sum += a[i * size + j] * a[i * size + j];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi on a dense real symmetric matrix; returns its diagonal after
/// convergence.
fn symmetric_jacobi(a: &mut [f64], size: usize) -> Vec<f64> {
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(a, size) < JACOBI_TOLERANCE {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[p * size + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * size + q] - a[p * size + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k * size + p];
                    let akq = a[k * size + q];
                    a[k * size + p] = c * akp - s * akq;
                    a[k * size + q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p * size + k];
                    let aqk = a[q * size + k];
                    a[p * size + k] = c * apk - s * aqk;
                    a[q * size + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..size).map(|i| a[i * size + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = CMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 0.5]]).unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert_eq!(ev.len(), 3);
        for (got, want) in ev.iter().zip([-1.0, 0.5, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let y = CMatrix::from_row_major(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&y);
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // [[2, 1-i], [1+i, 3]]: trace 5, det 6 - 2 = 4 -> (5 ± sqrt(9)) / 2
        let m = CMatrix::from_row_major(2, vec![c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_preserve_trace_and_frobenius_norm() {
        let n = 6;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let re = ((i * 7 + j * 3) % 5) as f64 - 2.0;
                let im = if i == j { 0.0 } else { ((i + 2 * j) % 3) as f64 - 1.0 };
                m[(i, j)] = c(re, im);
                m[(j, i)] = c(re, -im);
            }
        }
        let ev = hermitian_eigenvalues(&m);
        let trace: f64 = ev.iter().sum();
        assert!((trace - m.trace().re).abs() < 1e-10);
        let frob2: f64 = m.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let ev2: f64 = ev.iter().map(|x| x * x).sum();
        assert!((frob2 - ev2).abs() < 1e-9);
    }

    #[test]
    fn kron_and_matmul() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let xx = x.kron(&x);
        assert_eq!(xx.matmul(&xx).unwrap(), CMatrix::identity(4));
        assert!(xx.unitary_deviation() < 1e-15);
        assert_eq!(xx[(0, 3)], c(1.0, 0.0));
        assert!(x.matmul(&CMatrix::identity(3)).is_err());
    }
}

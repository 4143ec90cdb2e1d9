use num_complex::Complex64;

use super::linalg::{hermitian_eigenvalues, CMatrix};
use crate::error::{Error, Result};

/// Tolerance used when validating Hermiticity, trace and positivity.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// A Hermitian, positive semidefinite, trace-one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let state = DensityMatrix { matrix };
        state.validate()?;
        Ok(state)
    }

    /// Wraps a matrix known to be a state (channel outputs and mixtures).
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn pure(v: &[Complex64]) -> Result<Self> {
        Self::new(CMatrix::outer(v))
    }

    /// `|i><i|` in dimension `dim`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        DensityMatrix { matrix: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = CMatrix::identity(dim);
        m.scale(1.0 / dim as f64);
        DensityMatrix { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Checks the state invariants at [`STATE_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        let dev = self.matrix.hermitian_deviation();
        if dev > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = self.matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let smallest = self.eigenvalues().first().copied().unwrap_or(0.0);
        if smallest < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {smallest:e}")));
        }
        Ok(())
    }
}

/// `(1/2) tr|a - b|`, clamped to `[0, 1]` against round-off.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.matrix.sub(&b.matrix)?;
    let norm: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum();
    Ok((0.5 * norm).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_distance_examples() {
        let plus = DensityMatrix::pure(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]).unwrap();
        assert!(trace_distance(&plus, &plus).unwrap() < 1e-12);
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&zero, &DensityMatrix::basis_state(3, 0)).is_err());
    }

    #[test]
    fn pure_state_trace_distance_matches_overlap_formula() {
        // For pure states: (1/2)tr| |a><a| - |b><b| | = sqrt(1 - |<a|b>|^2).
        let a = [c(0.6, 0.0), c(0.0, 0.8)];
        let b = [c(0.28, 0.96) * 0.5f64.sqrt(), c(0.5f64.sqrt(), 0.0)];
        let overlap: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        let expected = (1.0 - overlap.norm_sqr()).sqrt();
        let got = trace_distance(&DensityMatrix::pure(&a).unwrap(), &DensityMatrix::pure(&b).unwrap()).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn commuting_states_give_total_variation() {
        let mut p = CMatrix::zeros(3);
        let mut q = CMatrix::zeros(3);
        for (i, (x, y)) in [(0.5, 0.2), (0.3, 0.3), (0.2, 0.5)].into_iter().enumerate() {
            p[(i, i)] = c(x, 0.0);
            q[(i, i)] = c(y, 0.0);
        }
        let d = trace_distance(&DensityMatrix::new(p).unwrap(), &DensityMatrix::new(q).unwrap()).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_states() {
        let not_unit_trace = CMatrix::identity(2);
        assert!(DensityMatrix::new(not_unit_trace).is_err());
        let negative = CMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]).unwrap();
        assert!(DensityMatrix::new(negative).is_err());
        let mut skew = CMatrix::identity(2);
        skew.scale(0.5);
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(skew).is_err());
        assert!(DensityMatrix::maximally_mixed(4).validate().is_ok());
    }
}

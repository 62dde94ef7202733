use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::BasisMap;
use crate::error::{Error, Result};
use crate::steady::SteadyWeights;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// A density operator on the symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    basis: BasisMap,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(basis: BasisMap, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::unchecked(basis, matrix)?;
        rho.check()?;
        Ok(rho)
    }

    pub(crate) fn unchecked(basis: BasisMap, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = basis.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn from_diagonal(basis: BasisMap, diagonal: &[f64]) -> Result<Self> {
        let d = basis.len();
        if diagonal.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: diagonal.len(),
            });
        }
        let mut m = DMatrix::zeros(d, d);
        for (k, &p) in diagonal.iter().enumerate() {
            m[(k, k)] = Complex64::new(p, 0.0);
        }
        Self::new(basis, m)
    }

    /// `|N, 0, 0⟩⟨N, 0, 0|`, every atom in the ground level.
    pub fn ground_state(basis: BasisMap) -> Result<Self> {
        let mut diag = vec![0.0; basis.len()];
        diag[0] = 1.0;
        Self::from_diagonal(basis, &diag)
    }

    pub fn from_weights(w: &SteadyWeights) -> Result<Self> {
        Self::from_diagonal(w.basis().clone(), w.weights())
    }

    /// Row-major vector `ρ_ij → i d + j`.
    pub fn from_vectorized(basis: BasisMap, v: &[Complex64]) -> Result<Self> {
        let d = basis.len();
        if v.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: v.len(),
            });
        }
        Self::unchecked(basis, DMatrix::from_row_slice(d, d, v))
    }

    pub fn vectorized(&self) -> Vec<Complex64> {
        self.matrix.transpose().as_slice().to_vec()
    }

    pub fn basis(&self) -> &BasisMap {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Real parts of the diagonal (the symmetric-state populations).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.basis.len()).map(|k| self.matrix[(k, k)].re).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.basis.len();
        let mut max = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    max = max.max(self.matrix[(i, j)].norm());
                }
            }
        }
        max
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `tr(ρ O)` for a real operator matrix.
    pub fn expect(&self, op: &DMatrix<f64>) -> Complex64 {
        let d = self.basis.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    pub(crate) fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::SolverCheck(format!("not Hermitian: max |ρ - ρ†| = {herm:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::SolverCheck(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::SolverCheck(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;

    #[test]
    fn rejects_invalid_states() {
        let b = enumerate_basis(1).unwrap();
        assert!(DensityOperator::from_diagonal(b.clone(), &[0.5, 0.5, 0.5]).is_err());
        assert!(DensityOperator::from_diagonal(b.clone(), &[1.5, -0.5, 0.0]).is_err());
        assert!(DensityOperator::from_diagonal(b.clone(), &[1.0, 0.0]).is_err());
        let mut m = DMatrix::<Complex64>::identity(3, 3) / Complex64::new(3.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityOperator::new(b, m).is_err());
    }

    #[test]
    fn vectorization_is_row_major() {
        let b = enumerate_basis(1).unwrap();
        let v: Vec<Complex64> = (0..9).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let rho = DensityOperator::from_vectorized(b, &v).unwrap();
        assert_eq!(rho.matrix()[(0, 1)].re, 1.0);
        assert_eq!(rho.matrix()[(1, 0)].re, 3.0);
        assert_eq!(rho.vectorized(), v);
    }
}

// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, HermitianMatrix, C64, DEFAULT_PSD_TOL};

/// Positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("density matrix trace is {tr}, expected 1")));
        }
        linalg::herm_eig(&h)?.clamp_psd(DEFAULT_PSD_TOL)?;
        Ok(DensityMatrix(h))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix(HermitianMatrix::from_real_diagonal(&vec![1.0 / d as f64; d]))
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        DensityMatrix(HermitianMatrix::symmetrize(linalg::kron(a.as_matrix(), b.as_matrix())))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        self.0.as_matrix()
    }
}

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(DVector<C64>);

impl PureState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("pure state norm is {norm}, expected 1")));
        }
        Ok(PureState(amplitudes))
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(PureState(amplitudes / c64(norm, 0.0)))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = c64(1.0, 0.0);
        PureState(v)
    }

    pub fn product(a: &PureState, b: &PureState) -> Self {
        PureState(a.0.kronecker(&b.0))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::outer(&self.0)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.projector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(HermitianMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        let rho = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(rho.dim(), 2);
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(DVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)])).is_err());
        assert!(PureState::normalized(DVector::zeros(3)).is_err());
        let s = PureState::normalized(DVector::from_vec(vec![c64(3.0, 0.0), c64(0.0, 4.0)])).unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!((s.density().hermitian().trace() - 1.0).abs() < 1e-15);
    }
}

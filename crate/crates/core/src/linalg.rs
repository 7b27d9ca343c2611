// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix algebra.
//!
//! Everything downstream is built on a single Hermitian eigensolver: fractional
//! powers, Schatten norms and entropies are all evaluated in the eigenbasis after
//! clamping tiny negative eigenvalues produced by round-off.
//!
//! Kronecker products and block views share one index convention: the first
//! factor is the outer index, so entry `(i * k + r, j * k + c)` of a `kn x kn`
//! matrix sits in block `(i, j)` at position `(r, c)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix, row/column counts at least one.
pub type ComplexMatrix = DMatrix<C64>;

/// Default relative tolerance for treating slightly negative eigenvalues as zero.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Asymmetry accepted when loading a Hermitian matrix from external data.
pub const HERMITIAN_LOAD_TOL: f64 = 1e-12;

const EIG_MAX_ITERS: usize = 10_000;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// The all-ones matrix, the identity element of the Hadamard product.
pub fn ones(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_element(rows, cols, C64::new(1.0, 0.0))
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `||a - b||_F / max(1, ||b||_F)`.
pub fn rel_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).norm() / b.norm().max(1.0)
}

/// A square matrix whose stored entries satisfy `m[(i, j)] == conj(m[(j, i)])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Replaces `m` by `(m + m*) / 2`. Panics if `m` is not square.
    pub fn symmetrize(m: ComplexMatrix) -> Self {
        assert!(m.is_square(), "Hermitian matrix must be square");
        let mut out = m.clone();
        let n = m.nrows();
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        HermitianMatrix(out)
    }

    /// Accepts `m` if its asymmetry is at most `tol * max|m_ij|`, then symmetrizes.
    pub fn try_new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asymmetry = max_abs(&(&m - m.adjoint()));
        let threshold = tol * max_abs(&m);
        if asymmetry > threshold {
            return Err(Error::NotHermitian {
                asymmetry,
                threshold,
            });
        }
        Ok(Self::symmetrize(m))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(identity(n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        HermitianMatrix(m)
    }

    /// Rank-one projector `psi psi*` (not normalized).
    pub fn outer(psi: &nalgebra::DVector<C64>) -> Self {
        Self::symmetrize(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        trace(&self.0).re
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        herm_eig(self)
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// `H = U diag(eigenvalues) U*` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `U diag(f(lambda)) U*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        HermitianMatrix::symmetrize(scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }

    /// Largest eigenvalue modulus, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }

    /// Replaces eigenvalues in `[-tol * ||h||_2, 0)` by zero; anything lower is an error.
    pub fn clamp_psd(mut self, tol: f64) -> Result<Self> {
        let threshold = -tol * self.spectral_norm();
        for lambda in self.eigenvalues.iter_mut() {
            if *lambda < threshold {
                return Err(Error::NotPsd {
                    eigenvalue: *lambda,
                    threshold,
                });
            }
            if *lambda < 0.0 {
                *lambda = 0.0;
            }
        }
        Ok(self)
    }
}

pub fn hadamard(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::dim(format!(
            "Hadamard product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

/// Kronecker product; row index of the result is `i * rows(b) + r`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn herm_eig(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let eig = h
        .0
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITERS)
        .ok_or(Error::NonConvergence {
            iterations: EIG_MAX_ITERS,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues of `h` with small negative values clamped to zero.
pub fn psd_eigenvalues(h: &HermitianMatrix, tol: f64) -> Result<Vec<f64>> {
    Ok(herm_eig(h)?.clamp_psd(tol)?.eigenvalues)
}

/// `h^p` in the eigenbasis after PSD clamping; `p = 1/2` is the principal square root.
pub fn psd_power(h: &HermitianMatrix, p: f64, tol: f64) -> Result<HermitianMatrix> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::domain(format!("matrix power needs finite p >= 0, got {p}")));
    }
    let eig = herm_eig(h)?.clamp_psd(tol)?;
    Ok(eig.map(|x| x.powf(p)))
}

/// `Tr h^p` over clamped eigenvalues.
pub fn trace_power(h: &HermitianMatrix, p: f64) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::domain(format!("trace power needs finite p >= 0, got {p}")));
    }
    Ok(psd_eigenvalues(h, DEFAULT_PSD_TOL)?
        .iter()
        .map(|x| x.powf(p))
        .sum())
}

/// `(sum_i lambda_i^p)^(1/p)` for a PSD matrix.
pub fn schatten_pnorm(h: &HermitianMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("Schatten norm needs finite p >= 1, got {p}")));
    }
    Ok(trace_power(h, p)?.powf(1.0 / p))
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `n x n` grid of `k x k` blocks over a matrix of dimension `n * k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockIndex {
    pub n: usize,
    pub k: usize,
}

impl BlockIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::dim(format!("block index needs n, k >= 1, got n={n}, k={k}")));
        }
        Ok(BlockIndex { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::dim(format!(
                "matrix {:?} does not factor as {}x{} blocks of size {}",
                m.shape(),
                self.n,
                self.n,
                self.k
            )));
        }
        Ok(())
    }
}

/// The `k x k` block at block position `(i, j)`.
pub fn block(m: &ComplexMatrix, idx: BlockIndex, i: usize, j: usize) -> Result<ComplexMatrix> {
    idx.check(m)?;
    if i >= idx.n || j >= idx.n {
        return Err(Error::Index(format!("block ({i}, {j}) in a {0}x{0} grid", idx.n)));
    }
    Ok(m.view((i * idx.k, j * idx.k), (idx.k, idx.k)).into_owned())
}

/// The `n` horizontal slices of shape `k x kn`.
pub fn block_rows(m: &ComplexMatrix, idx: BlockIndex) -> Result<Vec<ComplexMatrix>> {
    idx.check(m)?;
    Ok((0..idx.n)
        .map(|i| m.rows(i * idx.k, idx.k).into_owned())
        .collect())
}

/// Natural-log von Neumann entropy with `0 log 0 = 0`.
pub fn von_neumann_entropy(h: &HermitianMatrix) -> Result<f64> {
    let tr = h.trace();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("entropy needs unit trace, got {tr}")));
    }
    Ok(entropy_of_spectrum(&psd_eigenvalues(h, DEFAULT_PSD_TOL)?))
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random matrices, states and streams.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, ComplexMatrix, HermitianMatrix, C64};

/// Independent stream `stream` of the generator seeded by `seed`.
///
/// Per-restart and per-instance generators come from here so results do not
/// depend on scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts independent `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_matrix(n, n, rng);
    HermitianMatrix::symmetrize(&g + g.adjoint())
}

/// `G G*` with `G` of shape `n x rank`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_matrix(n, rank, rng);
    HermitianMatrix::symmetrize(&g * g.adjoint())
}

/// Haar-distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / c64(norm, 0.0);
        }
    }
}

/// Random density matrix of rank at most `rank` (induced measure).
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    let m = random_psd(n, rank, rng);
    let tr = m.trace();
    HermitianMatrix::symmetrize(m.into_matrix() / c64(tr, 0.0))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    orthonormal_columns(gaussian_matrix(n, n, rng))
}

/// Orthonormalizes the columns of a tall matrix, fixing the phases of `R`'s diagonal
/// so the result is Haar distributed when the input is Gaussian.
pub fn orthonormal_columns(g: ComplexMatrix) -> ComplexMatrix {
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

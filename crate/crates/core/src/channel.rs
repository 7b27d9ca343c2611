// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Completely positive maps in Kraus, diagonal (Hadamard) and Choi form.
//!
//! A diagonal map acts as `rho -> C * rho` (entrywise product) for a PSD matrix
//! `C`. Writing `C = sum_m psi_m psi_m*` gives the equivalent Kraus form with
//! operators `Diag(psi_m)`. Channel equality is extensional: two channels are
//! the same map when they agree on a spanning set of inputs.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, HermitianMatrix, C64, DEFAULT_PSD_TOL};
use crate::random;
use crate::state::DensityMatrix;

/// Entry tolerance for `sum_i A_i* A_i = I`.
pub const TP_TOL: f64 = 1e-10;

/// Eigenvalues below this fraction of the largest are dropped when extracting Kraus operators.
const KRAUS_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(dim_in: usize, dim_out: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::dim("channel dimensions must be at least 1"));
        }
        if ops.is_empty() {
            return Err(Error::invalid("Kraus list is empty"));
        }
        if let Some((i, op)) = ops
            .iter()
            .enumerate()
            .find(|(_, op)| op.shape() != (dim_out, dim_in))
        {
            return Err(Error::dim(format!(
                "Kraus operator {i} has shape {:?}, expected ({dim_out}, {dim_in})",
                op.shape()
            )));
        }
        Ok(KrausChannel {
            dim_in,
            dim_out,
            ops,
        })
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel {
            dim_in: d,
            dim_out: d,
            ops: vec![linalg::identity(d)],
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    fn apply_raw(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.ops {
            out += a * x * a.adjoint();
        }
        out
    }

    fn apply_adjoint_raw(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.ops {
            out += a.adjoint() * y * a;
        }
        out
    }

    /// `sum_i A_i* A_i`.
    pub fn effect(&self) -> ComplexMatrix {
        self.ops.iter().map(|a| a.adjoint() * a).sum()
    }

    pub fn is_trace_preserving(&self) -> bool {
        linalg::max_abs(&(self.effect() - linalg::identity(self.dim_in))) <= TP_TOL
    }

    /// The Hilbert-Schmidt adjoint, with Kraus operators `A_i*`.
    pub fn adjoint(&self) -> KrausChannel {
        KrausChannel {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            ops: self.ops.iter().map(|a| a.adjoint()).collect(),
        }
    }
}

/// `rho -> C * rho` for a PSD `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalChannel {
    c: HermitianMatrix,
}

impl DiagonalChannel {
    pub fn new(c: HermitianMatrix) -> Result<Self> {
        linalg::herm_eig(&c)?.clamp_psd(DEFAULT_PSD_TOL)?;
        Ok(DiagonalChannel { c })
    }

    /// Completely dephasing channel, `C = I`.
    pub fn dephasing(n: usize) -> Self {
        DiagonalChannel {
            c: HermitianMatrix::identity(n),
        }
    }

    pub fn c(&self) -> &HermitianMatrix {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// Trace preservation is exactly `C_ii = 1`, since `(C * rho)_ii = C_ii rho_ii`.
    pub fn is_trace_preserving(&self) -> bool {
        let m = self.c.as_matrix();
        (0..self.dim()).all(|i| (m[(i, i)] - c64(1.0, 0.0)).norm() <= TP_TOL)
    }

    fn apply_raw(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.c.as_matrix().component_mul(x)
    }

    /// The adjoint of `X -> C * X` is `Y -> conj(C) * Y`.
    fn apply_adjoint_raw(&self, y: &ComplexMatrix) -> ComplexMatrix {
        self.c.as_matrix().conjugate().component_mul(y)
    }
}

/// Equivalent Kraus form `{Diag(psi_m)}` from the spectral decomposition of `C`.
///
/// Each `psi_m` is rephased so its largest entry is real and positive, which
/// turns `C = J_n` into the single operator `I_n`.
pub fn kraus_from_diagonal(ch: &DiagonalChannel) -> Result<KrausChannel> {
    let n = ch.dim();
    let eig = linalg::herm_eig(ch.c())?.clamp_psd(DEFAULT_PSD_TOL)?;
    let top = eig.spectral_norm();
    let mut ops = Vec::new();
    for (m, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
        if lambda <= KRAUS_RANK_TOL * top {
            continue;
        }
        let mut psi: DVector<C64> = eig.eigenvectors.column(m) * c64(lambda.sqrt(), 0.0);
        let pivot = psi.iter().fold(c64(0.0, 0.0), |best, z| if z.norm() > best.norm() + 1e-14 { *z } else { best });
        if pivot.norm() > 0.0 {
            psi *= pivot.conj() / pivot.norm();
        }
        ops.push(ComplexMatrix::from_diagonal(&psi));
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(n, n));
    }
    KrausChannel::new(n, n, ops)
}

/// A completely positive map in one of the concrete representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Kraus(KrausChannel),
    Diagonal(DiagonalChannel),
}

impl From<KrausChannel> for Channel {
    fn from(k: KrausChannel) -> Self {
        Channel::Kraus(k)
    }
}

impl From<DiagonalChannel> for Channel {
    fn from(d: DiagonalChannel) -> Self {
        Channel::Diagonal(d)
    }
}

impl Channel {
    pub fn identity(d: usize) -> Self {
        Channel::Kraus(KrausChannel::identity(d))
    }

    pub fn dim_in(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim_in,
            Channel::Diagonal(d) => d.dim(),
        }
    }

    pub fn dim_out(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim_out,
            Channel::Diagonal(d) => d.dim(),
        }
    }

    /// Applies the linear map to an arbitrary `dim_in x dim_in` matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim_in();
        if x.shape() != (d, d) {
            return Err(Error::dim(format!("channel input {:?}, expected ({d}, {d})", x.shape())));
        }
        Ok(match self {
            Channel::Kraus(k) => k.apply_raw(x),
            Channel::Diagonal(c) => c.apply_raw(x),
        })
    }

    /// Hermitian-preserving application; the output is re-symmetrized.
    pub fn apply_hermitian(&self, h: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::symmetrize(self.apply_matrix(h.as_matrix())?))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        self.apply_hermitian(rho.hermitian())
    }

    /// Applies the Hilbert-Schmidt adjoint to a `dim_out x dim_out` matrix.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim_out();
        if y.shape() != (d, d) {
            return Err(Error::dim(format!("adjoint input {:?}, expected ({d}, {d})", y.shape())));
        }
        Ok(match self {
            Channel::Kraus(k) => k.apply_adjoint_raw(y),
            Channel::Diagonal(c) => c.apply_adjoint_raw(y),
        })
    }

    pub fn is_trace_preserving(&self) -> bool {
        match self {
            Channel::Kraus(k) => k.is_trace_preserving(),
            Channel::Diagonal(d) => d.is_trace_preserving(),
        }
    }

    pub fn to_kraus(&self) -> Result<KrausChannel> {
        match self {
            Channel::Kraus(k) => Ok(k.clone()),
            Channel::Diagonal(d) => kraus_from_diagonal(d),
        }
    }

    pub fn as_diagonal(&self) -> Option<&DiagonalChannel> {
        match self {
            Channel::Diagonal(d) => Some(d),
            Channel::Kraus(_) => None,
        }
    }
}

/// Product map with Kraus operators `A_i (x) B_j`, `A_i` outer.
pub fn tensor(phi: &Channel, psi: &Channel) -> Result<KrausChannel> {
    let a = phi.to_kraus()?;
    let b = psi.to_kraus()?;
    let ops = a
        .ops
        .iter()
        .flat_map(|x| b.ops.iter().map(move |y| linalg::kron(x, y)))
        .collect();
    KrausChannel::new(a.dim_in * b.dim_in, a.dim_out * b.dim_out, ops)
}

/// `J = sum_ij E_ij (x) Phi(E_ij)`, the image of the unnormalized maximally entangled projector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: HermitianMatrix,
}

impl ChoiMatrix {
    /// Wraps an existing Choi matrix of dimension `dim_in * dim_out`.
    pub fn new(dim_in: usize, dim_out: usize, matrix: HermitianMatrix) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 || matrix.dim() != dim_in * dim_out {
            return Err(Error::dim(format!(
                "Choi matrix of dimension {} for a {dim_in} -> {dim_out} map",
                matrix.dim()
            )));
        }
        Ok(ChoiMatrix {
            dim_in,
            dim_out,
            matrix,
        })
    }

    /// Choi matrix of any linear map on `dim_in x dim_in` matrices.
    pub fn from_linear_map(
        dim_in: usize,
        dim_out: usize,
        map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut j = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for r in 0..dim_in {
            for c in 0..dim_in {
                let mut e = ComplexMatrix::zeros(dim_in, dim_in);
                e[(r, c)] = c64(1.0, 0.0);
                let out = map(&e);
                if out.shape() != (dim_out, dim_out) {
                    return Err(Error::dim(format!("map output {:?}", out.shape())));
                }
                j.view_mut((r * dim_out, c * dim_out), (dim_out, dim_out))
                    .copy_from(&out);
            }
        }
        // Hermitian-preserving maps give a Hermitian J; others are projected.
        ChoiMatrix::new(dim_in, dim_out, HermitianMatrix::symmetrize(j))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn is_cp(&self) -> bool {
        match linalg::herm_eig(&self.matrix) {
            Ok(e) => e.clamp_psd(DEFAULT_PSD_TOL).is_ok(),
            Err(_) => false,
        }
    }

    /// Kraus form from the eigendecomposition `J = sum_m lambda_m v_m v_m*`;
    /// `A_m[a, i] = sqrt(lambda_m) v_m[i * dim_out + a]`.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let eig = linalg::herm_eig(&self.matrix)?.clamp_psd(DEFAULT_PSD_TOL)?;
        let top = eig.spectral_norm();
        let mut ops = Vec::new();
        for (m, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
            if lambda <= KRAUS_RANK_TOL * top {
                continue;
            }
            let s = lambda.sqrt();
            let v = eig.eigenvectors.column(m);
            ops.push(ComplexMatrix::from_fn(self.dim_out, self.dim_in, |a, i| {
                v[i * self.dim_out + a] * s
            }));
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(self.dim_out, self.dim_in));
        }
        KrausChannel::new(self.dim_in, self.dim_out, ops)
    }
}

pub fn choi(ch: &Channel) -> ChoiMatrix {
    ChoiMatrix::from_linear_map(ch.dim_in(), ch.dim_out(), |x| {
        ch.apply_matrix(x).expect("basis input has the channel's input shape")
    })
    .expect("channel output has the declared shape")
}

pub fn channel_from_choi(j: &ChoiMatrix) -> Result<KrausChannel> {
    j.to_kraus()
}

pub fn is_cp(ch: &Channel) -> bool {
    choi(ch).is_cp()
}

pub fn is_trace_preserving(ch: &Channel) -> bool {
    ch.is_trace_preserving()
}

pub fn adjoint(ch: &KrausChannel) -> KrausChannel {
    ch.adjoint()
}

/// Trace-preserving channel from a Haar-random isometry: a Gaussian
/// `(kraus_rank * dim_out) x dim_in` matrix is orthonormalized and sliced into
/// `kraus_rank` blocks of `dim_out` rows.
pub fn random_channel(dim_in: usize, dim_out: usize, kraus_rank: usize, seed: u64) -> Result<KrausChannel> {
    random_channel_from_rng(dim_in, dim_out, kraus_rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_channel_from_rng<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    kraus_rank: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if kraus_rank == 0 || dim_in == 0 || dim_out == 0 {
        return Err(Error::domain("random channel needs kraus_rank, dim_in, dim_out >= 1"));
    }
    if kraus_rank * dim_out < dim_in {
        return Err(Error::domain(format!(
            "no isometry from dimension {dim_in} into {kraus_rank} x {dim_out}"
        )));
    }
    let iso = random::orthonormal_columns(random::gaussian_matrix(kraus_rank * dim_out, dim_in, rng));
    let ops = (0..kraus_rank)
        .map(|m| iso.rows(m * dim_out, dim_out).into_owned())
        .collect();
    KrausChannel::new(dim_in, dim_out, ops)
}

/// `C = G* G` with `G` Gaussian of shape `rank x n`; with `trace_preserving`
/// the rows and columns are rescaled so `diag(C) = 1`.
pub fn random_diagonal(n: usize, rank: usize, seed: u64, trace_preserving: bool) -> Result<DiagonalChannel> {
    random_diagonal_from_rng(n, rank, trace_preserving, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_diagonal_from_rng<R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    trace_preserving: bool,
    rng: &mut R,
) -> Result<DiagonalChannel> {
    if rank == 0 || rank > n {
        return Err(Error::domain(format!("diagonal channel rank {rank} outside 1..={n}")));
    }
    let g = random::gaussian_matrix(rank, n, rng);
    let mut c = g.adjoint() * &g;
    if trace_preserving {
        let scale: Vec<f64> = (0..n).map(|i| c[(i, i)].re.sqrt().recip()).collect();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] *= scale[i] * scale[j];
            }
        }
        for i in 0..n {
            c[(i, i)] = c64(1.0, 0.0);
        }
    }
    DiagonalChannel::new(HermitianMatrix::symmetrize(c))
}

/// Werner-Holevo channel `rho -> (I Tr rho - rho^T) / (d - 1)`, Kraus operators
/// `(|i><j| - |j><i|) / sqrt(d - 1)` for `i < j`.
pub fn werner_holevo(d: usize) -> Result<KrausChannel> {
    if d < 2 {
        return Err(Error::domain(format!("Werner-Holevo channel needs d >= 2, got {d}")));
    }
    let w = 1.0 / ((d - 1) as f64).sqrt();
    let mut ops = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = c64(w, 0.0);
            a[(j, i)] = c64(-w, 0.0);
            ops.push(a);
        }
    }
    KrausChannel::new(d, d, ops)
}

/// `rho -> I Tr(rho) / d` with Kraus operators `|i><j| / sqrt(d)`.
pub fn completely_depolarizing(d: usize) -> KrausChannel {
    let w = 1.0 / (d as f64).sqrt();
    let mut ops = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = c64(w, 0.0);
            ops.push(a);
        }
    }
    KrausChannel {
        dim_in: d,
        dim_out: d,
        ops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_residual;
    use crate::random::{random_density_matrix, random_hermitian, random_psd, random_unit_vector};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_state(d: usize, r: &mut ChaCha8Rng) -> DensityMatrix {
        DensityMatrix::new(random_density_matrix(d, d, r)).unwrap()
    }

    #[test]
    fn kraus_validation() {
        assert!(KrausChannel::new(2, 2, vec![]).is_err());
        assert!(KrausChannel::new(2, 2, vec![linalg::identity(3)]).is_err());
        assert!(KrausChannel::new(2, 3, vec![ComplexMatrix::zeros(3, 2)]).is_ok());
    }

    #[test]
    fn identity_and_named_diagonal_actions() {
        let mut r = rng(10);
        let rho = random_state(4, &mut r);
        let id = Channel::identity(4);
        assert!(rel_residual(id.apply(&rho).unwrap().as_matrix(), rho.as_matrix()) < 1e-15);

        let all_ones = Channel::from(DiagonalChannel::new(HermitianMatrix::symmetrize(linalg::ones(4, 4))).unwrap());
        assert_eq!(all_ones.apply(&rho).unwrap().as_matrix(), rho.as_matrix());

        let deph = Channel::from(DiagonalChannel::dephasing(4));
        let out = deph.apply(&rho).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { rho.as_matrix()[(i, j)] } else { c64(0.0, 0.0) };
                assert_eq!(out.as_matrix()[(i, j)], want);
            }
        }
        assert!(matches!(id.apply(&random_state(3, &mut r)), Err(Error::Dimension(_))));
    }

    #[test]
    fn kraus_from_all_ones_is_identity() {
        for n in [1, 2, 5] {
            let d = DiagonalChannel::new(HermitianMatrix::symmetrize(linalg::ones(n, n))).unwrap();
            let k = kraus_from_diagonal(&d).unwrap();
            assert_eq!(k.ops().len(), 1);
            assert!(rel_residual(&k.ops()[0], &linalg::identity(n)) < 1e-14);
        }
    }

    #[test]
    fn kraus_from_rank_one() {
        let psi = DVector::from_vec(vec![c64(2.0, 0.0), c64(0.5, -1.0), c64(0.0, 0.3)]);
        let d = DiagonalChannel::new(HermitianMatrix::outer(&psi)).unwrap();
        let k = kraus_from_diagonal(&d).unwrap();
        assert_eq!(k.ops().len(), 1);
        // psi already has a real positive largest entry, so no rephasing is visible.
        assert!(rel_residual(&k.ops()[0], &ComplexMatrix::from_diagonal(&psi)) < 1e-13);
    }

    #[test]
    fn kraus_from_random_diagonal_matches_hadamard_form() {
        let mut r = rng(11);
        for (n, rank) in [(3, 1), (4, 2), (5, 5), (6, 3)] {
            let g = random::gaussian_matrix(rank, n, &mut r);
            let d = DiagonalChannel::new(HermitianMatrix::symmetrize(g.adjoint() * g)).unwrap();
            let k = kraus_from_diagonal(&d).unwrap();
            assert_eq!(k.ops().len(), rank);
            for op in k.ops() {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            assert_eq!(op[(i, j)], c64(0.0, 0.0));
                        }
                    }
                }
            }
            let hadamard_form = Channel::from(d);
            let kraus_form = Channel::from(k);
            for _ in 0..20 {
                let rho = random_state(n, &mut r);
                let a = hadamard_form.apply(&rho).unwrap();
                let b = kraus_form.apply(&rho).unwrap();
                assert!(rel_residual(b.as_matrix(), a.as_matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_rejects_non_psd() {
        let c = HermitianMatrix::from_real_diagonal(&[1.0, -0.1]);
        assert!(matches!(DiagonalChannel::new(c), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn tensor_factorizes_on_products() {
        let mut r = rng(12);
        let phi = Channel::from(random_channel_from_rng(2, 3, 2, &mut r).unwrap());
        let psi = Channel::from(random_diagonal_from_rng(3, 2, false, &mut r).unwrap());
        let both = Channel::from(tensor(&phi, &psi).unwrap());
        assert_eq!((both.dim_in(), both.dim_out()), (6, 9));
        for _ in 0..5 {
            let a = random_state(2, &mut r);
            let b = random_state(3, &mut r);
            let lhs = both.apply(&DensityMatrix::product(&a, &b)).unwrap();
            let rhs = linalg::kron(phi.apply(&a).unwrap().as_matrix(), psi.apply(&b).unwrap().as_matrix());
            assert!(rel_residual(lhs.as_matrix(), &rhs) < 1e-12);
        }
        let id = tensor(&Channel::identity(2), &Channel::identity(3)).unwrap();
        assert_eq!(id.ops(), &[linalg::identity(6)]);
    }

    #[test]
    fn diagonal_tensor_identity_is_hadamard_with_c_kron_j() {
        let mut r = rng(13);
        let (n, k) = (3, 2);
        let d = random_diagonal_from_rng(n, 2, true, &mut r).unwrap();
        let cj = linalg::kron(d.c().as_matrix(), &linalg::ones(k, k));
        let prod = Channel::from(tensor(&Channel::from(d), &Channel::identity(k)).unwrap());
        for _ in 0..10 {
            let rho = random_state(n * k, &mut r);
            let want = linalg::hadamard(&cj, rho.as_matrix()).unwrap();
            assert!(rel_residual(prod.apply(&rho).unwrap().as_matrix(), &want) < 1e-12);
        }
    }

    #[test]
    fn tensor_is_associative() {
        let mut r = rng(14);
        let a = Channel::from(random_channel_from_rng(2, 2, 2, &mut r).unwrap());
        let b = Channel::from(random_diagonal_from_rng(2, 1, true, &mut r).unwrap());
        let c = Channel::from(random_channel_from_rng(2, 3, 1, &mut r).unwrap());
        let left = Channel::from(tensor(&Channel::from(tensor(&a, &b).unwrap()), &c).unwrap());
        let right = Channel::from(tensor(&a, &Channel::from(tensor(&b, &c).unwrap())).unwrap());
        for _ in 0..5 {
            let rho = random_state(8, &mut r);
            let x = left.apply(&rho).unwrap();
            let y = right.apply(&rho).unwrap();
            assert!(rel_residual(x.as_matrix(), y.as_matrix()) < 1e-12);
        }
    }

    #[test]
    fn choi_of_identity() {
        for d in [2, 3] {
            let j = choi(&Channel::identity(d));
            let e = linalg::herm_eig(j.matrix()).unwrap();
            assert!((j.matrix().trace() - d as f64).abs() < 1e-14);
            assert!((e.eigenvalues[d * d - 1] - d as f64).abs() < 1e-12);
            assert!(e.eigenvalues[..d * d - 1].iter().all(|x| x.abs() < 1e-12));
            assert!(j.is_cp());
        }
    }

    #[test]
    fn cp_and_tp_flags() {
        let mut r = rng(15);
        for seed in 0..5 {
            let ch = Channel::from(random_channel(3, 2, 3, seed).unwrap());
            assert!(is_cp(&ch));
            assert!(is_trace_preserving(&ch));
            let g = random::gaussian_matrix(2, 3, &mut r);
            let d = Channel::from(DiagonalChannel::new(HermitianMatrix::symmetrize(g.adjoint() * g)).unwrap());
            assert!(is_cp(&d));
        }
        // The transpose map is positive but not completely positive.
        for d in [2, 3] {
            let transpose = ChoiMatrix::from_linear_map(d, d, |x| x.transpose()).unwrap();
            assert!(!transpose.is_cp());
        }
    }

    #[test]
    fn choi_round_trip() {
        let mut r = rng(16);
        let chans = [
            Channel::from(random_channel_from_rng(3, 2, 2, &mut r).unwrap()),
            Channel::from(random_diagonal_from_rng(3, 2, false, &mut r).unwrap()),
            Channel::from(werner_holevo(3).unwrap()),
        ];
        for ch in &chans {
            let back = Channel::from(channel_from_choi(&choi(ch)).unwrap());
            for _ in 0..5 {
                let rho = random_state(ch.dim_in(), &mut r);
                let a = ch.apply(&rho).unwrap();
                let b = back.apply(&rho).unwrap();
                assert!(rel_residual(b.as_matrix(), a.as_matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn adjoint_pairing() {
        let mut r = rng(17);
        let k = random_channel_from_rng(3, 4, 2, &mut r).unwrap();
        let ch = Channel::from(k.clone());
        let adj = Channel::from(adjoint(&k));
        for _ in 0..10 {
            let x = random_hermitian(4, &mut r).into_matrix();
            let y = random_hermitian(3, &mut r).into_matrix();
            let lhs = linalg::trace(&(&x * ch.apply_matrix(&y).unwrap()));
            let rhs = linalg::trace(&(adj.apply_matrix(&x).unwrap() * &y));
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            // The built-in adjoint application agrees with the adjoint channel.
            assert!(rel_residual(&ch.apply_adjoint(&x).unwrap(), &adj.apply_matrix(&x).unwrap()) < 1e-14);
        }
        let twice = Channel::from(adjoint(&adjoint(&k)));
        for _ in 0..10 {
            let y = random_hermitian(3, &mut r).into_matrix();
            assert_eq!(twice.apply_matrix(&y).unwrap(), ch.apply_matrix(&y).unwrap());
        }
        assert_eq!(adjoint(&KrausChannel::identity(3)), KrausChannel::identity(3));

        let d = random_diagonal_from_rng(3, 2, false, &mut r).unwrap();
        let dc = Channel::from(d);
        for _ in 0..5 {
            let x = random_hermitian(3, &mut r).into_matrix();
            let y = random_hermitian(3, &mut r).into_matrix();
            let lhs = linalg::trace(&(&x * dc.apply_matrix(&y).unwrap()));
            let rhs = linalg::trace(&(dc.apply_adjoint(&x).unwrap() * &y));
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn random_channel_contract() {
        let a = random_channel(3, 3, 1, 7).unwrap();
        let b = random_channel(3, 3, 1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_trace_preserving());
        let ch = Channel::from(a);
        let mut r = rng(18);
        let psi = random_unit_vector(3, &mut r);
        let out = ch.apply_hermitian(&HermitianMatrix::outer(&psi)).unwrap();
        let e = linalg::herm_eig(&out).unwrap();
        assert!((e.eigenvalues[2] - 1.0).abs() < 1e-12);
        assert!(random_channel(4, 1, 2, 0).is_err());
        assert!(random_channel(2, 2, 0, 0).is_err());
    }

    #[test]
    fn random_diagonal_contract() {
        let d = random_diagonal(5, 5, 3, false).unwrap();
        assert!(linalg::herm_eig(d.c()).unwrap().eigenvalues[0] >= 0.0);
        assert_eq!(d, random_diagonal(5, 5, 3, false).unwrap());
        let tp = random_diagonal(4, 2, 9, true).unwrap();
        assert!(tp.is_trace_preserving());
        let ch = Channel::from(tp);
        let mut r = rng(19);
        for _ in 0..10 {
            let rho = random_state(4, &mut r);
            assert!((ch.apply(&rho).unwrap().trace() - 1.0).abs() < 1e-12);
        }
        assert!(random_diagonal(3, 0, 0, false).is_err());
        assert!(random_diagonal(3, 4, 0, false).is_err());
    }

    #[test]
    fn werner_holevo_closed_form() {
        let mut r = rng(20);
        for d in [2, 3, 4] {
            let wh = werner_holevo(d).unwrap();
            assert!(wh.is_trace_preserving());
            let ch = Channel::from(wh);
            for _ in 0..5 {
                let rho = random_state(d, &mut r);
                let want = (linalg::identity(d) - rho.as_matrix().transpose()) / c64((d - 1) as f64, 0.0);
                assert!(rel_residual(ch.apply(&rho).unwrap().as_matrix(), &want) < 1e-12);
            }
        }
        for (d, spectrum) in [(2, vec![0.0, 1.0]), (3, vec![0.0, 0.5, 0.5])] {
            let ch = Channel::from(werner_holevo(d).unwrap());
            for _ in 0..5 {
                let psi = random_unit_vector(d, &mut r);
                let out = ch.apply_hermitian(&HermitianMatrix::outer(&psi)).unwrap();
                let e = linalg::herm_eig(&out).unwrap();
                for (x, y) in e.eigenvalues.iter().zip(&spectrum) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
        assert!(werner_holevo(1).is_err());
    }

    #[test]
    fn outputs_are_psd() {
        let mut r = rng(21);
        let ch = Channel::from(random_channel_from_rng(3, 4, 3, &mut r).unwrap());
        for _ in 0..10 {
            let rho = DensityMatrix::new(random_density_matrix(3, 1, &mut r)).unwrap();
            let out = ch.apply(&rho).unwrap();
            assert!(linalg::herm_eig(&out).unwrap().clamp_psd(DEFAULT_PSD_TOL).is_ok());
        }
        let psd = random_psd(3, 1, &mut r);
        assert!(DiagonalChannel::new(psd).is_ok());
        let dep = Channel::from(completely_depolarizing(3));
        assert!(dep.is_trace_preserving());
    }
}

// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Diagonal (Hadamard-product) quantum channels, maximal output p-norm
//! estimation and a numerical certificate for the multiplicativity of
//! `nu_p(Phi (x) Psi)` when `Phi` is diagonal.

pub mod certificate;
pub mod channel;
pub mod error;
pub mod codec;
pub mod linalg;
pub mod optimize;
pub mod random;
pub mod state;

pub use certificate::{verify_certificate, CertificateInstance, CertificateReport};
pub use channel::{Channel, ChoiMatrix, DiagonalChannel, KrausChannel};
pub use error::{Error, Result};
pub use optimize::{EntropyEstimate, OptimizerConfig, PurityEstimate};
pub use linalg::{BlockIndex, ComplexMatrix, EigenDecomposition, HermitianMatrix, C64};
pub use state::{DensityMatrix, PureState};

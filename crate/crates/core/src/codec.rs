// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON encodings for matrices, states and channels.
//!
//! Matrices are `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order. Channels are `{"kind": "kraus" | "diagonal" | "choi", "dim_in": n,
//! "dim_out": m, "payload": ...}` where the payload is a list of matrices for
//! `kraus` and a single Hermitian matrix otherwise. Every loader validates the
//! invariants of the type it produces and names the one that failed.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{Channel, ChoiMatrix, DiagonalChannel, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, HermitianMatrix, HERMITIAN_LOAD_TOL};
use crate::state::DensityMatrix;

/// Non-finite floats as JSON `null`, read back as `NaN`.
pub mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_finite() {
            ser.serialize_f64(*x)
        } else {
            ser.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NAN))
    }
}

/// [`finite_or_null`] for sequences.
pub mod finite_or_null_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(xs.iter().map(|x| x.is_finite().then_some(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<f64>, D::Error> {
        let raw = Vec::<Option<f64>>::deserialize(de)?;
        Ok(raw.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
    }
}

/// Largest side length accepted from external input.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.rows == 0 || j.cols == 0 {
            return Err(Error::invalid(format!("matrix shape {}x{} is empty", j.rows, j.cols)));
        }
        if j.rows > MAX_DIM || j.cols > MAX_DIM {
            return Err(Error::invalid(format!("matrix shape {}x{} exceeds {MAX_DIM}", j.rows, j.cols)));
        }
        if j.data.len() != j.rows * j.cols {
            return Err(Error::invalid(format!(
                "matrix data has {} entries, expected rows x cols = {}",
                j.data.len(),
                j.rows * j.cols
            )));
        }
        if j.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("matrix data contains a non-finite value"));
        }
        Ok(ComplexMatrix::from_row_iterator(
            j.rows,
            j.cols,
            j.data.iter().map(|&[re, im]| c64(re, im)),
        ))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::invalid(format!("malformed {what}: {e}")))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix JSON serialization")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from(&parse_json::<MatrixJson>(s)?)
}

/// Loads a Hermitian matrix, symmetrizing if the asymmetry is within
/// `1e-12 * max|m_ij|` and rejecting it otherwise.
pub fn hermitian_from_json(s: &str) -> Result<HermitianMatrix> {
    hermitian_from_matrix_json(&parse_json(s)?)
}

fn hermitian_from_matrix_json(j: &MatrixJson) -> Result<HermitianMatrix> {
    HermitianMatrix::try_new(ComplexMatrix::try_from(j)?, HERMITIAN_LOAD_TOL)
}

pub fn density_from_json(s: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(hermitian_from_json(s)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Kraus,
    Diagonal,
    Choi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub kind: ChannelKind,
    pub dim_in: usize,
    pub dim_out: usize,
    pub payload: Value,
}

pub fn channel_to_json(ch: &Channel) -> String {
    let (kind, payload) = match ch {
        Channel::Kraus(k) => (
            ChannelKind::Kraus,
            serde_json::to_value(k.ops().iter().map(MatrixJson::from).collect::<Vec<_>>()),
        ),
        Channel::Diagonal(d) => (
            ChannelKind::Diagonal,
            serde_json::to_value(MatrixJson::from(d.c().as_matrix())),
        ),
    };
    let doc = ChannelJson {
        kind,
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        payload: payload.expect("matrix payload serialization"),
    };
    serde_json::to_string(&doc).expect("channel JSON serialization")
}

pub fn choi_to_json(j: &ChoiMatrix) -> String {
    let doc = ChannelJson {
        kind: ChannelKind::Choi,
        dim_in: j.dim_in(),
        dim_out: j.dim_out(),
        payload: serde_json::to_value(MatrixJson::from(j.matrix().as_matrix())).expect("matrix payload serialization"),
    };
    serde_json::to_string(&doc).expect("channel JSON serialization")
}

/// Parses and validates a channel document. Choi payloads are converted to Kraus form.
pub fn channel_from_json(s: &str) -> Result<Channel> {
    let doc: ChannelJson = parse_json(s)?;
    if doc.dim_in == 0 || doc.dim_out == 0 || doc.dim_in > MAX_DIM || doc.dim_out > MAX_DIM {
        return Err(Error::invalid(format!(
            "channel dimensions {} -> {} outside 1..={MAX_DIM}",
            doc.dim_in, doc.dim_out
        )));
    }
    match doc.kind {
        ChannelKind::Kraus => {
            let mats: Vec<MatrixJson> = from_value(doc.payload, "Kraus payload")?;
            let ops = mats
                .iter()
                .map(ComplexMatrix::try_from)
                .collect::<Result<Vec<_>>>()?;
            Ok(KrausChannel::new(doc.dim_in, doc.dim_out, ops)?.into())
        }
        ChannelKind::Diagonal => {
            if doc.dim_in != doc.dim_out {
                return Err(Error::invalid(format!(
                    "diagonal channel must be square, got {} -> {}",
                    doc.dim_in, doc.dim_out
                )));
            }
            let c = hermitian_from_matrix_json(&from_value(doc.payload, "diagonal payload")?)?;
            if c.dim() != doc.dim_in {
                return Err(Error::invalid(format!(
                    "diagonal matrix C has dimension {}, declared {}",
                    c.dim(),
                    doc.dim_in
                )));
            }
            Ok(DiagonalChannel::new(c)
                .map_err(|e| Error::invalid(format!("diagonal matrix C is not positive semidefinite: {e}")))?
                .into())
        }
        ChannelKind::Choi => {
            let m = hermitian_from_matrix_json(&from_value(doc.payload, "Choi payload")?)?;
            let choi = ChoiMatrix::new(doc.dim_in, doc.dim_out, m)?;
            if !choi.is_cp() {
                return Err(Error::invalid("Choi matrix is not positive semidefinite (map is not CP)"));
            }
            Ok(choi.to_kraus()?.into())
        }
    }
}

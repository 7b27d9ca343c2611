// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channels by name, so experiments need no hand-written files.
//!
//! | name            | channel                                             |
//! |-----------------|-----------------------------------------------------|
//! | `wh3`, `wh:d`   | Werner-Holevo channel on `C^d`                      |
//! | `dephase:n`     | diagonal channel with `C = I_n`                     |
//! | `ones:n`        | diagonal channel with `C = J_n` (the identity map)  |
//! | `identity:n`    | identity map in Kraus form                          |
//! | `depolarize:d`  | completely depolarizing channel                     |

use std::path::Path;

use hadamult::channel::{completely_depolarizing, werner_holevo};
use hadamult::{codec, linalg, Channel, DiagonalChannel, HermitianMatrix};

use crate::error::{validation, CliError, CliResult};

/// Where a channel comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelSource {
    Named(String),
    File(String),
}

impl ChannelSource {
    pub fn load(&self) -> CliResult<Channel> {
        match self {
            ChannelSource::Named(name) => named_channel(name),
            ChannelSource::File(path) => load_channel_file(path),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ChannelSource::Named(name) => format!("named:{name}"),
            ChannelSource::File(path) => format!("file:{path}"),
        }
    }
}

/// Caps generated dimensions so a typo cannot request a huge allocation.
const MAX_NAMED_DIM: usize = 64;

pub fn named_channel(name: &str) -> CliResult<Channel> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let dim = |default: Option<usize>| -> CliResult<usize> {
        let d = match (arg, default) {
            (Some(a), _) => a
                .trim()
                .parse::<usize>()
                .map_err(|_| validation(format!("channel `{name}`: `{a}` is not a dimension")))?,
            (None, Some(d)) => d,
            (None, None) => return Err(validation(format!("channel `{name}` needs a dimension, e.g. `{head}:3`"))),
        };
        if d == 0 || d > MAX_NAMED_DIM {
            return Err(validation(format!("channel `{name}`: dimension must lie in 1..={MAX_NAMED_DIM}")));
        }
        Ok(d)
    };
    let ch: Channel = match head {
        "wh3" if arg.is_none() => werner_holevo(3)?.into(),
        "wh" => werner_holevo(dim(None)?)?.into(),
        "dephase" => DiagonalChannel::dephasing(dim(None)?).into(),
        "ones" => {
            let n = dim(None)?;
            DiagonalChannel::new(HermitianMatrix::symmetrize(linalg::ones(n, n)))?.into()
        }
        "identity" => Channel::identity(dim(None)?),
        "depolarize" => completely_depolarizing(dim(None)?).into(),
        _ => {
            return Err(validation(format!(
                "unknown channel `{name}`; expected wh3, wh:d, dephase:n, ones:n, identity:n or depolarize:d"
            )))
        }
    };
    Ok(ch)
}

pub fn read_file(path: impl AsRef<Path>) -> CliResult<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_channel_file(path: &str) -> CliResult<Channel> {
    let text = read_file(path)?;
    codec::channel_from_json(&text).map_err(|e| validation(format!("{path}: {e}")))
}

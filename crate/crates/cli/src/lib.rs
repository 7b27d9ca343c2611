// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers behind the `hadamult` binary. Each `cmd_*` returns an
//! [`ExperimentReport`]; the binary only parses flags and writes output.

pub mod commands;
pub mod error;
pub mod named;
pub mod report;

pub use commands::{
    cmd_entropy_add, cmd_lt_fuzz, cmd_mult_test, cmd_nu, cmd_replay, cmd_wh, LtOpts, PairOpts, ReplayFiles, ReplayOpts,
};
pub use error::{CliError, CliResult};
pub use named::ChannelSource;
pub use report::{ExperimentReport, Summary};

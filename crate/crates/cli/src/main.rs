// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hadamult::OptimizerConfig;
use hadamult_cli::commands::{DEFAULT_CAP, DEFAULT_P_GRID};
use hadamult_cli::{
    cmd_entropy_add, cmd_lt_fuzz, cmd_mult_test, cmd_nu, cmd_replay, cmd_wh, ChannelSource, CliError, ExperimentReport,
    LtOpts, PairOpts, ReplayFiles, ReplayOpts,
};

#[derive(Parser)]
#[command(name = "hadamult", version, about = "Output purity experiments for diagonal quantum channels")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in the summary (makes reruns differ).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct Optim {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    /// Skip the computational basis starts.
    #[arg(long)]
    no_basis_starts: bool,
}

impl Optim {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            seed: self.seed,
            basis_starts: !self.no_basis_starts,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct PGrid {
    /// Comma-separated exponents, each >= 1.
    #[arg(long = "p", value_delimiter = ',', default_values_t = DEFAULT_P_GRID)]
    p: Vec<f64>,
}

/// `file:<path>` loads a channel JSON file; anything else is a generator name
/// (`wh3`, `wh:d`, `dephase:n`, `ones:n`, `identity:n`, `depolarize:d`).
fn source(arg: &str) -> ChannelSource {
    match arg.strip_prefix("file:") {
        Some(path) => ChannelSource::File(path.to_string()),
        None => ChannelSource::Named(arg.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate nu_p of one channel.
    Nu {
        #[arg(long, conflicts_with = "named", required_unless_present = "named")]
        channel: Option<String>,
        #[arg(long)]
        named: Option<String>,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        optim: Optim,
    },
    /// Compare nu_p(Phi (x) Psi) with nu_p(Phi) nu_p(Psi) for diagonal Phi.
    MultTest {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        optim: Optim,
    },
    /// Replay the factorization certificate on random or given instances.
    Replay {
        /// Block counts, cycled over instances.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        n: Vec<usize>,
        /// Block sizes, cycled over instances.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Largest accepted n and k.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Diagonal channel file for Phi; needs --psi and --rho as well.
        #[arg(long, requires_all = ["psi", "rho"])]
        channel: Option<String>,
        /// Psi as `file:<path>` or a generator name.
        #[arg(long, requires = "channel")]
        psi: Option<String>,
        /// Density matrix file.
        #[arg(long, requires = "channel")]
        rho: Option<String>,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        optim: Optim,
    },
    /// Werner-Holevo counterexample: product versus maximally entangled inputs.
    Wh {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        optim: Optim,
    },
    /// Compare S_min(Phi (x) Psi) with S_min(Phi) + S_min(Psi).
    EntropyAdd {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        optim: Optim,
    },
    /// Random checks of the Lieb-Thirring trace inequality.
    LtFuzz {
        /// Largest side of V and K.
        #[arg(long, default_value_t = 6)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: PGrid,
    },
}

#[derive(Args, Clone)]
struct Pair {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Fixed Phi as `file:<path>` or a generator name.
    #[arg(long)]
    phi: Option<String>,
    /// Fixed Psi as `file:<path>` or a generator name.
    #[arg(long)]
    psi: Option<String>,
}

impl Pair {
    fn opts(&self, p: Vec<f64>) -> PairOpts {
        PairOpts {
            n: self.n,
            k: self.k,
            p,
            instances: self.instances,
            phi: self.phi.as_deref().map(source),
            psi: self.psi.as_deref().map(source),
        }
    }
}

fn run(command: Command) -> Result<ExperimentReport, CliError> {
    match command {
        Command::Nu {
            channel,
            named,
            grid,
            optim,
        } => {
            let src = match (channel, named) {
                (Some(path), _) => ChannelSource::File(path),
                (None, Some(name)) => ChannelSource::Named(name),
                (None, None) => unreachable!("clap enforces one of --channel/--named"),
            };
            cmd_nu(&src, &grid.p, &optim.config())
        }
        Command::MultTest { pair, grid, optim } => cmd_mult_test(&pair.opts(grid.p), &optim.config()),
        Command::Replay {
            n,
            k,
            instances,
            cap,
            channel,
            psi,
            rho,
            grid,
            optim,
        } => {
            let files = match (channel, psi, rho) {
                (Some(phi), Some(psi), Some(rho)) => Some(ReplayFiles {
                    phi: ChannelSource::File(phi),
                    psi: source(&psi),
                    rho,
                }),
                _ => None,
            };
            let opts = ReplayOpts {
                n,
                k,
                p: grid.p,
                instances,
                cap,
                files,
            };
            cmd_replay(&opts, &optim.config())
        }
        Command::Wh { d, grid, optim } => cmd_wh(d, &grid.p, &optim.config()),
        Command::EntropyAdd { pair, optim } => cmd_entropy_add(&pair.opts(vec![1.0]), &optim.config()),
        Command::LtFuzz { d, instances, seed, grid } => cmd_lt_fuzz(
            &LtOpts {
                max_dim: d,
                p: grid.p,
                instances,
            },
            seed,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cli.timing {
        report.summary.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pclab_core::arith::is_prime;
use pclab_core::congruence::RAMANUJAN_PRIMES;
use pclab_core::{Delta, Epsilon};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "pclab", version, about = "Partition congruence search engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition tables mod ell
    #[command(subcommand)]
    Ptable(PtableCmd),
    /// Coefficient series f_{ell,delta}
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Direct congruence checks on a table
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Print the square-class set of beta modulo m
    Classes {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        beta: u64,
    },
    /// Rule out congruences for every prime Q in a range
    Exclude(ExcludeArgs),
    /// Character sums and survivor density curve
    Density(DensityArgs),
    /// Theta-pattern matching
    #[command(subcommand)]
    Theta(ThetaCmd),
}

#[derive(Debug, Subcommand)]
pub enum PtableCmd {
    /// Build p(n) mod ell for n <= max and write it to a file
    Build {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum SeriesCmd {
    /// Build f_{ell,delta} up to q^(max/24)
    Build {
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// p(ell n + beta) = 0 (mod ell) for ell in {5, 7, 11}
    Ramanujan {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        limit: u64,
    },
    /// Check every progression in the square class of beta modulo m
    Propagation {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        limit: u64,
    },
}

#[derive(Debug, Args)]
pub struct ExcludeArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: i64,
    #[arg(long)]
    pub qmin: u64,
    #[arg(long)]
    pub qmax: u64,
    #[arg(long)]
    pub bound: u64,
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: i64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub xmax: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ThetaCmd {
    /// Match f_{ell,delta} against the theta patterns
    Match {
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    PtableBuild,
    SeriesBuild,
    VerifyRamanujan,
    VerifyPropagation,
    Classes,
    Exclude,
    Density,
    ThetaMatch,
}

/// Validated parameters of one invocation. Fields a command does not use
/// stay `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub ell: Option<u64>,
    pub delta: Option<Delta>,
    pub epsilon: Option<Epsilon>,
    pub q_range: Option<(u64, u64)>,
    pub coeff_bound: Option<u64>,
    pub n_max: Option<u64>,
    pub modulus: Option<u64>,
    pub beta: Option<u64>,
    pub k: Option<usize>,
    pub table_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub thread_count: Option<usize>,
}

impl RunConfig {
    fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            ell: None,
            delta: None,
            epsilon: None,
            q_range: None,
            coeff_bound: None,
            n_max: None,
            modulus: None,
            beta: None,
            k: None,
            table_path: None,
            output_path: None,
            thread_count: None,
        }
    }
}

fn usage(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        flag,
        message: message.into(),
    }
}

fn ell(v: u64) -> Result<u64, CliError> {
    if v < 5 || v > u16::MAX as u64 || !is_prime(v) {
        return Err(usage("--ell", format!("{v} is not a prime in [5, 65535]")));
    }
    Ok(v)
}

fn delta(v: i64) -> Result<Delta, CliError> {
    Delta::from_i64(v).ok_or_else(|| usage("--delta", format!("{v} is not 0 or -1")))
}

fn positive(flag: &'static str, v: u64) -> Result<u64, CliError> {
    if v == 0 {
        return Err(usage(flag, "must be positive"));
    }
    Ok(v)
}

impl TryFrom<Command> for RunConfig {
    type Error = CliError;

    fn try_from(cmd: Command) -> Result<Self, CliError> {
        let cfg = match cmd {
            Command::Ptable(PtableCmd::Build { ell: l, max, out }) => RunConfig {
                ell: Some(ell(l)?),
                n_max: Some(max),
                output_path: Some(out),
                ..RunConfig::new(CommandKind::PtableBuild)
            },
            Command::Series(SeriesCmd::Build {
                ell: l,
                delta: d,
                max,
                dump,
            }) => RunConfig {
                ell: Some(ell(l)?),
                delta: Some(delta(d)?),
                n_max: Some(positive("--max", max)?),
                output_path: dump,
                ..RunConfig::new(CommandKind::SeriesBuild)
            },
            Command::Verify(VerifyCmd::Ramanujan { ell: l, limit }) => {
                if !RAMANUJAN_PRIMES.contains(&l) {
                    return Err(usage("--ell", format!("{l} is not one of 5, 7, 11")));
                }
                RunConfig {
                    ell: Some(l),
                    coeff_bound: Some(limit),
                    ..RunConfig::new(CommandKind::VerifyRamanujan)
                }
            }
            Command::Verify(VerifyCmd::Propagation {
                ell: l,
                m,
                beta,
                limit,
            }) => RunConfig {
                ell: Some(ell(l)?),
                modulus: Some(positive("--m", m)?),
                beta: Some(beta),
                coeff_bound: Some(limit),
                ..RunConfig::new(CommandKind::VerifyPropagation)
            },
            Command::Classes { m, beta } => RunConfig {
                modulus: Some(positive("--m", m)?),
                beta: Some(beta),
                ..RunConfig::new(CommandKind::Classes)
            },
            Command::Exclude(a) => {
                if a.qmin > a.qmax {
                    return Err(usage(
                        "--qmax",
                        format!("{} is below --qmin {}", a.qmax, a.qmin),
                    ));
                }
                if a.threads == Some(0) {
                    return Err(usage("--threads", "must be positive"));
                }
                RunConfig {
                    ell: Some(ell(a.ell)?),
                    delta: Some(delta(a.delta)?),
                    q_range: Some((a.qmin, a.qmax)),
                    coeff_bound: Some(positive("--bound", a.bound)?),
                    table_path: a.table,
                    output_path: a.out,
                    thread_count: a.threads,
                    ..RunConfig::new(CommandKind::Exclude)
                }
            }
            Command::Density(a) => {
                let epsilon = Epsilon::from_i64(a.epsilon)
                    .ok_or_else(|| usage("--epsilon", format!("{} is not 1 or -1", a.epsilon)))?;
                if a.k == 0 || a.k > 32 {
                    return Err(usage("--k", format!("{} is not in [1, 32]", a.k)));
                }
                if a.xmax < 5 {
                    return Err(usage("--xmax", "must be at least 5"));
                }
                RunConfig {
                    ell: Some(ell(a.ell)?),
                    delta: Some(delta(a.delta)?),
                    epsilon: Some(epsilon),
                    k: Some(a.k),
                    q_range: Some((5, a.xmax)),
                    output_path: a.out,
                    ..RunConfig::new(CommandKind::Density)
                }
            }
            Command::Theta(ThetaCmd::Match {
                ell: l,
                delta: d,
                bound,
            }) => RunConfig {
                ell: Some(ell(l)?),
                delta: Some(delta(d)?),
                coeff_bound: Some(positive("--bound", bound)?),
                ..RunConfig::new(CommandKind::ThetaMatch)
            },
        };
        Ok(cfg)
    }
}

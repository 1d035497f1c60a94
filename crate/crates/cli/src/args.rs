use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pairwise_core::{DeploymentSchedule, Gamma, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "pairwise", version, about = "Random pairwise key predistribution experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate P(connected) and P(no isolated node) over a grid of γ and K.
    Sweep(SweepArgs),
    /// Estimate the probability that every deployment phase is connected.
    Phased(PhasedArgs),
    /// Histogram key-ring sizes and per-table maxima.
    Census(CensusArgs),
    /// Evaluate thresholds, bounds and exact isolation probabilities.
    Theory(TheoryArgs),
    /// Dump one pairing table as JSON.
    Pairing(PairingArgs),
    /// Print the edge list of one key graph, optionally restricted to a phase.
    Edges(EdgesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Run {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads (defaults to one per core).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,

    /// Pairing sizes: `a..b` (inclusive), a single value, or a comma list of either.
    #[arg(long, value_parser = parse_k_list)]
    pub k: KList,

    /// Comma-separated increasing fractions in (0, 1].
    #[arg(long, value_parser = parse_gamma_list)]
    pub gamma: GammaList,

    #[arg(long, default_value_t = pairwise_core::montecarlo::DEFAULT_SWEEP_TRIALS)]
    pub trials: usize,

    #[command(flatten)]
    pub run: Run,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PhasedArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long)]
    pub k: usize,

    /// Comma-separated, strictly increasing fractions, e.g. `0.25,0.5,1.0`.
    #[arg(long, value_parser = parse_schedule)]
    pub schedule: DeploymentSchedule,

    #[arg(long, default_value_t = pairwise_core::montecarlo::DEFAULT_SWEEP_TRIALS)]
    pub trials: usize,

    #[command(flatten)]
    pub run: Run,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = pairwise_core::montecarlo::DEFAULT_CENSUS_TRIALS)]
    pub trials: usize,

    #[command(flatten)]
    pub run: Run,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// r(γ) for each listed γ in (0, 1).
    #[arg(long, value_delimiter = ',')]
    pub r_gamma: Vec<f64>,

    /// Print λ* = 1/(2 ln 2 − 1).
    #[arg(long)]
    pub lambda_star: bool,

    /// c(λ) and x(λ) for each listed λ > λ*.
    #[arg(long, value_delimiter = ',')]
    pub c_of_lambda: Vec<f64>,

    /// Tail coefficients a, b, h at `λ:c` pairs, comma-separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub tail: Vec<(f64, f64)>,

    /// Node count for the finite-n quantities below.
    #[arg(long)]
    pub n: Option<usize>,

    /// Pairing sizes for the finite-n quantities.
    #[arg(long, value_parser = parse_k_list, requires = "n")]
    pub k: Option<KList>,

    /// Fractions for the finite-n quantities.
    #[arg(long, value_parser = parse_gamma_list, requires = "n")]
    pub gamma: Option<GammaList>,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PairingArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EdgesArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KList(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct GammaList(pub Vec<Gamma>);

/// Parses `a..b` (inclusive), `k`, or a comma list of those.
pub fn parse_k_list(s: &str) -> Result<KList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("cannot parse K value {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("no K values given".into());
    }
    Ok(KList(out))
}

pub fn parse_gamma_list(s: &str) -> Result<GammaList, String> {
    let gammas = s
        .split(',')
        .map(|part| {
            let part = part.trim();
            let v: f64 = part.parse().map_err(|_| format!("cannot parse gamma {part:?}"))?;
            Gamma::new(v).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if gammas.windows(2).any(|w| w[0] >= w[1]) {
        return Err("gammas must be strictly increasing".into());
    }
    Ok(GammaList(gammas))
}

pub fn parse_schedule(s: &str) -> Result<DeploymentSchedule, String> {
    s.parse().map_err(|e: pairwise_core::Error| e.to_string())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `lambda:c`, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad lambda in {s:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad c in {s:?}"))?;
    Ok((a, b))
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "qdlab", version, about = "Discrepancy, determinantal-process and Haar-moment experiments")]
pub struct Cli {
    /// JSON file with parameters for the chosen subcommand
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed; required by every stochastic subcommand
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads (reports do not depend on this)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Combinatorial discrepancy of a set system
    Disc(DiscArgs),
    /// Upper estimate of the quantum discrepancy of a projection or set system
    Qdisc(QdiscArgs),
    /// Fraction of random colorings meeting every per-projection threshold
    Ubound(UboundArgs),
    /// Quantum discrepancy estimates of random projection systems over an (N, M) grid
    Lbound(LboundArgs),
    /// Sample a determinantal process or check the sampler against exact laws
    Dpp(DppArgs),
    /// Combinatorial against quantum discrepancy over a corpus of set systems
    Compare(CompareArgs),
    /// Monte Carlo gates for the exact Haar moment formulas
    Haar(HaarArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Generator {
    /// All arithmetic progressions in [N]
    Ap,
    /// M uniform random subsets of [N]
    Random,
    /// The N singletons of [N]
    Singletons,
    /// M random projections of rank ⌊N/2⌋ (qdisc only)
    RandomProjections,
    /// The single projection I_N (qdisc only)
    Identity,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscArgs {
    /// Set-system JSON: {"n": N, "sets": [[1, 3], ...]}
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Use random restarts with local search instead of exhaustive search
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub heuristic: Option<bool>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest N for exhaustive search
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdiscArgs {
    /// Set-system JSON, embedded as diagonal projections
    #[arg(long, conflicts_with = "projections")]
    pub input: Option<PathBuf>,
    /// Projection-system JSON: {"n": N, "projections": [[[re, im], ...], ...]}
    #[arg(long)]
    pub projections: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Plus counts k to scan (default: all of 0..=N)
    #[arg(long, value_delimiter = ',')]
    pub plus_counts: Option<Vec<usize>>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UboundArgs {
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    /// Concentration constant; fitted by the tail probe when omitted
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub probe_trials: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LboundArgs {
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Upper limit on M
    #[arg(long)]
    pub m_cap: Option<usize>,
    /// Constant in log M ≤ αN
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DppAction {
    Sample,
    Check,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// I/2: independent fair coins
    Half,
    Zero,
    Identity,
    /// Random projection of rank --rank
    Projection,
    /// Haar eigenbasis with uniform eigenvalues
    Random,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DppArgs {
    #[arg(value_enum, required = true)]
    #[serde(skip)]
    pub action: Option<DppAction>,
    /// Kernel JSON: 2-D array of [re, im] pairs
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KernelKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest accepted total-variation distance
    #[arg(long)]
    pub tv_gate: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareArgs {
    #[arg(long)]
    pub ap_min: Option<usize>,
    #[arg(long)]
    pub ap_max: Option<usize>,
    #[arg(long)]
    pub random_count: Option<usize>,
    #[arg(long)]
    pub random_n: Option<usize>,
    #[arg(long)]
    pub random_m: Option<usize>,
    /// Size of an added singleton system (0 to omit)
    #[arg(long)]
    pub singletons: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaarArgs {
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub z_max: Option<f64>,
}

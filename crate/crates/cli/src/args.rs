use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use onebit_core::{Boundary, EtaForm};

#[derive(Debug, Parser)]
#[command(name = "onebit", version, about = "Random one-bit maps from the sphere to the Hamming cube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form sample-size bounds and m-windows.
    Bounds(BoundsArgs),
    /// Embed a points CSV under a freshly sampled map.
    Embed(EmbedArgs),
    /// Check injectivity or the δ-RIP of stored codes (exit 2 on failure).
    Check(CheckArgs),
    /// Estimate one success probability by Monte Carlo.
    Simulate(SimulateArgs),
    /// Estimate success probabilities over a grid of m.
    Sweep(SweepArgs),
    /// Reproduce the δ-RIP phase-transition figure as CSV and SVG.
    Figure(FigureArgs),
    /// Exact probabilities for small instances.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed; drawn from system entropy when absent.
    #[arg(long, env = "ONEBIT_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ThreadsArg {
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of points.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Failure probability for the single-threshold bounds.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lower-tail level of the m-windows; requires --eps2.
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Separation parameter for the general injectivity bound.
    #[arg(long)]
    pub delta_sep: Option<f64>,
    /// Evaluate m-windows below their proven range of n.
    #[arg(long)]
    pub force: bool,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Points CSV, one unit vector per row.
    #[arg(long)]
    pub points: PathBuf,
    /// Code length.
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Rescale rows to unit norm instead of rejecting them.
    #[arg(long)]
    pub normalize: bool,
    /// Binary code set output.
    #[arg(long)]
    pub codes: PathBuf,
    /// Pairwise distance CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub codes: PathBuf,
    /// Check the δ-RIP; without it, check injectivity.
    #[arg(long)]
    pub delta: Option<f64>,
    /// `strict` fails a pair when |d_H − d_geo| > δ, `inclusive` when ≥ δ.
    #[arg(long, default_value = "strict", value_parser = parse_flag::<Boundary>)]
    pub boundary: Boundary,
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    /// Number of orthogonal points; taken from --points when given.
    #[arg(long)]
    pub n: Option<usize>,
    /// RIP mode; without it, injectivity mode.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Default: 100000 for n ≤ 100, 200 otherwise.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Embed these points through sampled maps instead of the orthogonal
    /// shortcut.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value = "strict", value_parser = parse_flag::<Boundary>)]
    pub boundary: Boundary,
    /// Default: pairwise for injectivity, general for RIP.
    #[arg(long, value_parser = parse_flag::<EtaForm>)]
    pub eta_form: Option<EtaForm>,
    /// Cap on C(n,2)·trials·m/64 word operations.
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub threads: ThreadsArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub trial: TrialArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `lo:hi:step`, inclusive of `hi` when on the step.
    #[arg(long, value_parser = parse_grid)]
    pub m_grid: MGrid,
    #[command(flatten)]
    pub trial: TrialArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, default_value_t = 800)]
    pub n: u64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps2: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Default: 20 points over [0.8·m_eps1, 1.1·m_eps2].
    #[arg(long, value_parser = parse_grid)]
    pub m_grid: Option<MGrid>,
    #[arg(long, default_value = "strict", value_parser = parse_flag::<Boundary>)]
    pub boundary: Boundary,
    #[arg(long, default_value = "general", value_parser = parse_flag::<EtaForm>)]
    pub eta_form: EtaForm,
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub threads: ThreadsArg,
    /// CSV output; the SVG goes next to it with extension `.svg`.
    #[arg(long, default_value = "figure.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub which: OracleCommand,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// P(all n orthogonal codes distinct).
    Birthday {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Exact δ-RIP probability for three orthogonal points.
    Rip3 {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        delta: f64,
        /// Both conventions when absent.
        #[arg(long, value_parser = parse_flag::<Boundary>)]
        boundary: Option<Boundary>,
    },
    /// Exact birthday deviation from e^{-λ} against both η.
    Eta {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// P(Bin(m, 1/2) ≥ a), or p^δ with --delta.
    Tail {
        #[arg(long)]
        m: u64,
        #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
        a: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MGrid(pub Vec<usize>);

fn parse_grid(s: &str) -> Result<MGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if lo == 0 || step == 0 || lo > hi {
        return Err(format!("need 1 <= lo <= hi and step >= 1, got {s:?}"));
    }
    Ok(MGrid((lo..=hi).step_by(step).collect()))
}

fn parse_flag<T: FromStr<Err = onebit_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: onebit_core::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("4:14:1").unwrap().0, (4..=14).collect::<Vec<_>>());
        assert_eq!(parse_grid("100:220:10").unwrap().0.last(), Some(&220));
        assert_eq!(parse_grid("1:10:4").unwrap().0, vec![1, 5, 9]);
        assert!(parse_grid("0:4:1").is_err());
        assert!(parse_grid("5:4:1").is_err());
        assert!(parse_grid("4:5").is_err());
        assert!(parse_grid("4:5:0").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

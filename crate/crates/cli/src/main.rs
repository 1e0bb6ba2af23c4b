mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "pst", version, about = "Design and analyse perfect state transfer spin chains")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a chain and write it as JSON
    #[command(subcommand)]
    Synth(Synth),
    /// Perfect-transfer verdict for a chain or a spectrum
    Check(CheckArgs),
    /// End-to-end evolution trace as CSV
    Evolve(EvolveArgs),
    /// Windowed transfer and expected fidelity
    Window(WindowArgs),
    #[command(subcommand)]
    Bounds(Bounds),
    /// Remove the extremal eigenvalue pair and resynthesize
    Prune(PruneArgs),
    #[command(subcommand)]
    Revival(Revival),
    /// Optimal or eigenvector-orthogonal encoding on the first m sites
    Encode(EncodeArgs),
    /// Monte-Carlo coupling disorder
    Perturb(PerturbArgs),
}

#[derive(Args)]
struct Output {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Synth {
    Krawtchouk {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        out: Output,
    },
    Trex {
        #[command(flatten)]
        params: TrexArgs,
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        out: Output,
    },
    TrexApprox {
        #[command(flatten)]
        params: TrexArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Spectrum {±1, ±(1+2γ), ±(1+4γ), ...}
    R2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        out: Output,
    },
    FromSpectrum {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct TrexArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    gamma: f64,
    /// Gap of the central eigenvalues
    #[arg(long, default_value_t = 1.0)]
    g: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, conflicts_with = "spectrum", required_unless_present = "spectrum")]
    chain: Option<PathBuf>,
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = 1001)]
    steps: usize,
    /// Encode over the first m sites
    #[arg(long)]
    encode: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Optimal)]
    method: Method,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Optimal,
    Orthogonal,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowKind {
    Delta,
    Box,
    Gaussian,
    Tabulated,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum)]
    kind: WindowKind,
    /// Box full width or gaussian sigma
    #[arg(long)]
    width: Option<f64>,
    /// CSV of `offset,density` rows for a tabulated window
    #[arg(long)]
    table: Option<PathBuf>,
    /// Centre of the window (default: the chain's transfer time)
    #[arg(long)]
    t0: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum Bounds {
    /// Rescaled J1 t0 of T-Rex chains over a list of gamma
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Speed limits for one chain
    Check {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, default_value_t = 4001)]
        steps: usize,
    },
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    chain: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum Revival {
    /// Replace the two central couplings of an odd chain
    Central {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Shift the antisymmetric part of a spectrum by a phase
    Shift {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        phi: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = Method::Optimal)]
    method: Method,
    /// Threshold for the reported arrival width
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct PerturbArgs {
    /// Chain files; each is evaluated at its own transfer time
    #[arg(long, required = true)]
    chain: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Perturb only this many central couplings
    #[arg(long, conflicts_with = "range")]
    central: Option<usize>,
    /// Perturb couplings start..end (zero-based, half-open)
    #[arg(long)]
    range: Option<String>,
    /// Evaluation time for every chain (default: each chain's transfer time)
    #[arg(long)]
    t0: Option<f64>,
    #[command(flatten)]
    out: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

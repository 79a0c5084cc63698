mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Annotated data-stream schemes: honest runs, attacks, cost sweeps and fixtures.
#[derive(Debug, Parser)]
#[command(name = "annostream", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scheme on an input stream and verify the help message.
    Run(RunArgs),
    /// Replay mutated transcripts and report accept-wrong rates.
    Attack(AttackArgs),
    /// Honest runs over a grid of shapes, emitted as cost CSV.
    Sweep(SweepArgs),
    /// Write a reproducible fixture stream.
    Gen(GenArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Scheme name, e.g. tri-laconic or sssp-unweighted.
    #[arg(long)]
    pub scheme: String,
    /// Stream file (text format; `.bin` files use the binary format).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Set family for the edge-count schemes.
    #[arg(long)]
    pub sets: Option<PathBuf>,
    /// Sample a random instance of this size instead of reading a file.
    #[arg(long)]
    pub n: Option<usize>,
    /// Prime modulus; overrides ANNOSTREAM_MODULUS and the automatic choice.
    #[arg(long)]
    pub modulus: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Copy, Default)]
pub struct Shape {
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Space parameter of an [h, v] scheme; sets s = floor(sqrt(v)).
    #[arg(long, conflicts_with_all = ["t", "s"])]
    pub v: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub shape: Shape,
    /// Verify this transcript instead of the honest one.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Apply a mutation policy to the honest transcript before verifying.
    #[arg(long, conflicts_with = "transcript")]
    pub mutate: Option<String>,
    /// Write the verified transcript here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub shape: Shape,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Policies to try; defaults to every policy the scheme supports.
    #[arg(long = "policy")]
    pub policies: Vec<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated t values; s is ceil(n / t). Empty means no grid points.
    #[arg(long, default_value = "1,2,4,8,16,32,64")]
    pub ts: String,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// SVG scatter of log hcost against log vcost.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// One of gnp, path, cycle, clique, dag, weighted-gnp, adjlist.
    pub kind: String,
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability for the random kinds.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub max_weight: u64,
    /// Stream destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::Attack(a) => commands::attack(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Gen(a) => commands::gen(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

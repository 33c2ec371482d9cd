mod commands;
mod input;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqgraph::Error;

use crate::manifest::RunManifest;

/// Point counts of graph hypersurfaces over finite fields.
///
/// Graph arguments accept a file in the edge-list or JSON format, a named
/// family (`K4`, `W5`, `C7(1,2)-v`, ...) or a pattern `Cn`, `Kn`, `Wn`, `Bn`
/// for cycles, complete graphs, wheels and banana graphs.
#[derive(Debug, Parser)]
#[command(name = "fqgraph", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the result to this file instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Record a manifest of the run that `rerun` can reproduce.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the graph polynomial Ψ, or the dual polynomial with --dual.
    Psi {
        graph: String,
        #[arg(long)]
        dual: bool,
    },
    /// Count the projective (or affine) complement of a polynomial system.
    Count(CountArgs),
    /// Combine shard records produced by `count --shard`.
    Merge {
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
    /// Reduce N̄(Ψ_Γ) symbolically to a polynomial in q plus residual terms.
    Reduce(ReduceArgs),
    /// Re-run a reduction report and check that it reproduces.
    Replay { report: PathBuf },
    /// Reconstruct a polynomial in q from sampled counts.
    Interp(InterpArgs),
    /// Evaluate the F_q Feynman amplitude and the vanishing criterion.
    Amplitude(AmplitudeArgs),
    /// Emit the graph corpus.
    Corpus(CorpusArgs),
    /// The c₂ invariant by enumeration and by denominator reduction.
    C2(C2Args),
    /// Scan N̄ of the quartic surface over P³(F_p) against 28k² mod p.
    Scan {
        /// Largest prime scanned.
        #[arg(long, default_value_t = 499)]
        p_max: u64,
        /// Scan every prime below 5000.
        #[arg(long, conflicts_with = "p_max")]
        extended: bool,
    },
    /// The zeta function of a variety whose complement count is a polynomial in q.
    Zeta(ZetaArgs),
    /// Repeat the run recorded in a manifest.
    Rerun { manifest: PathBuf },
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Polynomial system: one polynomial per line, or JSON.
    system: PathBuf,
    #[arg(long)]
    q: u64,
    /// Enumerate only shard `i` of `N`.
    #[arg(long, value_name = "i/N")]
    shard: Option<String>,
    /// Count by multilinear reduction instead of enumeration.
    #[arg(long, conflicts_with = "shard")]
    multilinear: bool,
    /// Largest number of points enumerated in one process.
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    /// A graph, or a polynomial system with --system.
    input: String,
    /// Treat the input as a polynomial system file.
    #[arg(long)]
    system: bool,
    /// Comma-separated elimination order.
    #[arg(long, value_delimiter = ',')]
    sequence: Option<Vec<u16>>,
    /// Field sizes at which the report is checked against enumeration.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    certify_q: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Entry::Auto)]
    entry: Entry,
    /// Fresh systems one entry term may visit before it is kept as a residual.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Entry {
    /// The vertex formula when it applies.
    Auto,
    /// Always N̄(Ψ_Γ).
    Direct,
}

#[derive(Debug, Args)]
struct InterpArgs {
    /// Lines `q N̄ [source]`.
    samples: PathBuf,
    /// Degree of the polynomial.
    #[arg(long, conflicts_with = "graph_edges")]
    degree: Option<usize>,
    /// Impose the shape of a graph with this many edges.
    #[arg(long)]
    graph_edges: Option<usize>,
    /// Ignore samples in this characteristic; repeatable.
    #[arg(long)]
    drop_prime: Vec<u64>,
    /// Reconstruct on the fields with q ≡ r mod m.
    #[arg(long, num_args = 2, value_names = ["m", "r"], allow_negative_numbers = true)]
    residue_class: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
struct AmplitudeArgs {
    graph: String,
    /// Space-time dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    d: Vec<usize>,
    /// Field sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<u64>,
    /// Mass squared as an encoded field element.
    #[arg(long, default_value_t = 1)]
    m2: u32,
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    metric: Metric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Euclidean,
    Minkowski,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// All connected simple graphs with at most this many edges.
    #[arg(long, default_value_t = 6)]
    max_edges: usize,
    /// Include the named families.
    #[arg(long)]
    named: bool,
    /// Add this many random graphs.
    #[arg(long, default_value_t = 0)]
    random: usize,
    #[arg(long, default_value_t = 0x5eed_2010)]
    seed: u64,
    /// Edge range of the random graphs.
    #[arg(long, default_value_t = 3)]
    random_min_edges: usize,
    #[arg(long, default_value_t = 12)]
    random_max_edges: usize,
}

#[derive(Debug, Args)]
struct C2Args {
    graph: String,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    q: Vec<u64>,
    /// Edge order for the denominator reduction; the heuristic when absent.
    #[arg(long, value_delimiter = ',')]
    sequence: Option<Vec<u16>>,
}

#[derive(Debug, Args)]
struct ZetaArgs {
    /// Coefficients c₀,c₁,... of N̄ = Σ cₖqᵏ.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "report"
    )]
    coeffs: Option<Vec<i64>>,
    /// A resolved reduction report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dimension n of the ambient P^{n−1}; the degree plus one by default.
    #[arg(long)]
    n: Option<usize>,
}

/// What a command produced: JSON, with an optional human rendering, or text.
pub enum Rendered {
    Json(serde_json::Value, Option<String>),
    Text(String),
}

fn execute(cli: &Cli, argv: &[String]) -> Result<(), Error> {
    let rendered = match &cli.command {
        Command::Rerun { manifest } => return manifest::rerun(manifest, run_again),
        command => commands::dispatch(command)?,
    };
    let text = match rendered {
        Rendered::Json(_, Some(table)) if cli.global.pretty => table,
        Rendered::Json(value, _) => serde_json::to_string_pretty(&value)? + "\n",
        Rendered::Text(text) => text,
    };
    match &cli.global.output {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let Some(path) = &cli.global.manifest {
        let manifest = RunManifest::record(argv, &cli.command)?;
        std::fs::write(path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(())
}

fn run_again(argv: &[String]) -> Result<(), Error> {
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::InvalidInput(e.to_string()))?;
    execute(&cli, argv)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match execute(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

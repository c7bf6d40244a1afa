mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Method;

/// Sparse encodings of cross-modal features, inverted indexing and Recall@K evaluation.
#[derive(Parser)]
#[command(name = "xmodal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic image/sentence feature pack pair.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Build a codebook from one or more feature packs.
    Codebook(CodebookArgs),
    /// Encode every item of a pack into a sparse vector file.
    Transform(TransformArgs),
    /// Build an inverted index from a sparse vector file.
    Index {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank indexed items for one query.
    Query(QueryArgs),
    /// Run a Recall@K evaluation described by a JSON run config.
    Evaluate(EvaluateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CodebookKind {
    Kmeans,
    Words,
}

#[derive(Args)]
struct CodebookArgs {
    #[arg(long, num_args = 1.., required = true)]
    packs: Vec<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, value_enum, default_value = "kmeans")]
    method: CodebookKind,
    #[arg(long)]
    exclude_stop_words: bool,
    #[arg(long, default_value_t = 100_000)]
    pool_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Word list (one per line) restricting the `words` method.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Extra stop words (one per line) for the `words` method.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Dp,
    Sq,
    BocHard,
    BocSoft,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    Max,
    Sum,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimilarityArg {
    Reciprocal,
    OneMinusDistance,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    pack: PathBuf,
    #[arg(long, value_enum)]
    method: TransformKind,
    #[arg(long, default_value_t = 1000.0)]
    scale: f64,
    /// Components kept per vector (dp/sq); defaults to all.
    #[arg(long, conflicts_with = "sparsity")]
    keep_z: Option<usize>,
    /// Fraction of components zeroed out, as an alternative to --keep-z.
    #[arg(long)]
    sparsity: Option<f64>,
    #[arg(long)]
    no_crelu: bool,
    #[arg(long)]
    codebook: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sum")]
    aggregation: AggregationArg,
    /// Similarities kept per concept (boc-soft); defaults to p.
    #[arg(long)]
    row_keep_z: Option<usize>,
    #[arg(long, value_enum, default_value = "reciprocal")]
    similarity: SimilarityArg,
    /// Drop stop-word concepts before encoding (BoC).
    #[arg(long)]
    exclude_stop_words: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Sparse vector file holding the query item.
    #[arg(long, requires = "id", conflicts_with = "vector_file")]
    vectors: Option<PathBuf>,
    #[arg(long, requires = "vectors")]
    id: Option<String>,
    /// JSON file `{"dim": n, "entries": [[component, weight], ...]}`.
    #[arg(long, required_unless_present = "vectors")]
    vector_file: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    images: Option<PathBuf>,
    #[arg(long)]
    sentences: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    sparsity: Option<f64>,
    /// Comma-separated sparsity factors; an empty value evaluates only `sparsity`.
    #[arg(long)]
    sparsity_list: Option<String>,
    /// Comma-separated re-ranking multipliers R_m.
    #[arg(long)]
    rm_list: Option<String>,
    #[arg(long)]
    rerank_k: Option<usize>,
    #[arg(long)]
    codebook: Option<PathBuf>,
    #[arg(long, value_enum)]
    aggregation: Option<AggregationArg>,
    #[arg(long, value_enum)]
    similarity: Option<SimilarityArg>,
    #[arg(long)]
    exact_baseline: bool,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

impl From<AggregationArg> for xmodal::boc::Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Max => Self::Max,
            AggregationArg::Sum => Self::Sum,
        }
    }
}

impl From<SimilarityArg> for xmodal::boc::SimilarityTransform {
    fn from(s: SimilarityArg) -> Self {
        match s {
            SimilarityArg::Reciprocal => Self::Reciprocal,
            SimilarityArg::OneMinusDistance => Self::OneMinusDistance,
        }
    }
}

/// Caps the global worker pool from `XMODAL_THREADS` (0 or unset: one per core).
fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("XMODAL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| xmodal::Error::Config(format!("XMODAL_THREADS: `{raw}` is not a number")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<xmodal::Error>().map(xmodal::Error::root) {
        Some(xmodal::Error::UnknownId(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Synth { config, out_dir } => commands::synth(&config, &out_dir),
        Command::Codebook(args) => commands::codebook(args),
        Command::Transform(args) => commands::transform(args),
        Command::Index { vectors, out } => commands::index(&vectors, &out),
        Command::Query(args) => commands::query(args),
        Command::Evaluate(args) => commands::evaluate(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

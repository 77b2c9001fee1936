//! Command-line front end: index a corpus, query a database, run the
//! retrieval benchmark, sweep quantization schemes, and generate a
//! synthetic corpus.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use mixhist::dbfile::{load_db, save_db, DbFileError};
use mixhist::harness::{run_benchmark_parallel, sweep, SweepError};
use mixhist::indexer::{build_index, IndexError};
use mixhist::loader::{load_image, LoadError};
use mixhist::manifest::{read_manifest, ManifestError};
use mixhist::report::{eval_report_csv, eval_report_text, ranked_csv, sweep_csv};
use mixhist::synth::{generate, SynthConfig, SynthError};
use mixhist_core::descriptor::extract;
use mixhist_core::eval::{EvalConfig, EvalError};
use mixhist_core::query::{rank, MetricMode, QueryError};
use mixhist_core::scheme::{QuantizationScheme, SchemeError};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mixhist",
    version,
    about = "Content-based image retrieval with a joint color/edge-orientation histogram"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SchemeArgs {
    /// Hue bin count.
    #[arg(long, default_value_t = 10)]
    nh: u16,
    /// Saturation bin count.
    #[arg(long, default_value_t = 4)]
    ns: u16,
    /// Value bin count.
    #[arg(long, default_value_t = 4)]
    nv: u16,
    /// Edge orientation bin count.
    #[arg(long, default_value_t = 4)]
    nq: u16,
}

impl SchemeArgs {
    fn scheme(&self) -> Result<QuantizationScheme, AppError> {
        QuantizationScheme::new(self.nh, self.ns, self.nv, self.nq)
            .map_err(|e: SchemeError| AppError::usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract features for every manifest image and save the database.
    Index {
        /// Corpus manifest (CSV: image_id,path,category).
        #[arg(long)]
        manifest: PathBuf,
        /// Output database file.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Rank database images against a query image.
    Query {
        /// Feature database produced by `index`.
        #[arg(long)]
        db: PathBuf,
        /// Query image (PNG or JPEG); features use the database's scheme.
        #[arg(long)]
        image: PathBuf,
        /// How many results to print.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Distance mode: canonical or literal.
        #[arg(long, default_value = "canonical")]
        metric: String,
    },
    /// Benchmark retrieval precision/recall over sampled queries.
    Eval {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Results retrieved per query (the N of precision at N).
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Query images sampled per category.
        #[arg(long, default_value_t = 20)]
        per_category: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "canonical")]
        metric: String,
        /// Report CSV path (image_id,precision,recall plus a mean row).
        #[arg(long)]
        out: PathBuf,
    },
    /// Benchmark every (orientation bins x color preset) combination.
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        /// Orientation bin counts, comma separated.
        #[arg(long = "nq-list", value_delimiter = ',', default_value = "3,4,5")]
        nq_list: Vec<u16>,
        /// Total color counts, comma separated (known presets: 72, 90, 160, 240).
        #[arg(long = "nc-presets", value_delimiter = ',', default_value = "72,90,160,240")]
        nc_presets: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        per_category: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "canonical")]
        metric: String,
        /// Grid CSV path (header of color counts, one row per nq).
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a striped synthetic corpus with a manifest.
    Synth {
        /// Corpus directory (created if absent).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        categories: usize,
        #[arg(long, default_value_t = 25)]
        per_category: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct AppError {
    message: String,
    exit: u8,
}

impl AppError {
    fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit: EXIT_USAGE }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit: EXIT_IO }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { message: message.into(), exit: EXIT_DATA }
    }
}

fn chain(err: &dyn std::error::Error) -> String {
    let mut out = err.to_string();
    let mut source = err.source();
    while let Some(cause) = source {
        out.push_str(&format!(": {cause}"));
        source = cause.source();
    }
    out
}

impl From<ManifestError> for AppError {
    fn from(e: ManifestError) -> Self {
        match e {
            ManifestError::Missing(_) | ManifestError::Io { .. } => AppError::io(chain(&e)),
            _ => AppError::data(chain(&e)),
        }
    }
}

impl From<LoadError> for AppError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::NotFound(_) | LoadError::Io { .. } => AppError::io(chain(&e)),
            _ => AppError::data(chain(&e)),
        }
    }
}

impl From<IndexError> for AppError {
    // Per-image failures are data errors: the manifest names content that
    // cannot be indexed, and the message carries the image id.
    fn from(e: IndexError) -> Self {
        AppError::data(chain(&e))
    }
}

impl From<DbFileError> for AppError {
    fn from(e: DbFileError) -> Self {
        match e {
            DbFileError::Io { .. } => AppError::io(chain(&e)),
            _ => AppError::data(chain(&e)),
        }
    }
}

impl From<EvalError> for AppError {
    fn from(e: EvalError) -> Self {
        AppError::data(chain(&e))
    }
}

impl From<QueryError> for AppError {
    fn from(e: QueryError) -> Self {
        AppError::data(chain(&e))
    }
}

impl From<SweepError> for AppError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::UnknownPreset(_) | SweepError::EmptyAxis => AppError::usage(chain(&e)),
            SweepError::Index(inner) => inner.into(),
            SweepError::Eval(inner) => inner.into(),
        }
    }
}

impl From<SynthError> for AppError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::EmptyCorpus => AppError::usage(chain(&e)),
            _ => AppError::io(chain(&e)),
        }
    }
}

fn parse_metric(s: &str) -> Result<MetricMode, AppError> {
    s.parse::<MetricMode>()
        .map_err(|_| AppError::usage(format!("unknown metric {s:?}; use canonical or literal")))
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), AppError> {
    std::fs::write(path, contents)
        .map_err(|e| AppError::io(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Index { manifest, out, scheme } => {
            let scheme = scheme.scheme()?;
            let entries = read_manifest(&manifest)?;
            let start = Instant::now();
            let db = build_index(&entries, &scheme)?;
            save_db(&db, &out)?;
            println!("indexed {} images in {:.2}s", db.len(), start.elapsed().as_secs_f64());
            Ok(())
        }
        Command::Query { db, image, n, metric } => {
            let mode = parse_metric(&metric)?;
            if n == 0 {
                return Err(AppError::usage("--n must be at least 1"));
            }
            let db = load_db(&db)?;
            let img = load_image(&image)?;
            let query = extract(&img, db.scheme());
            let result = rank(&db, &query, n, mode)?;
            print!("{}", ranked_csv(&result, &db));
            Ok(())
        }
        Command::Eval { db, manifest, n, per_category, seed, metric, out } => {
            let mode = parse_metric(&metric)?;
            if n == 0 || per_category == 0 {
                return Err(AppError::usage("--n and --per-category must be at least 1"));
            }
            let db = load_db(&db)?;
            let entries = read_manifest(&manifest)?;
            let config = EvalConfig {
                n_retrieved: n,
                queries_per_category: per_category,
                rng_seed: seed,
                metric_mode: mode,
            };
            let report = run_benchmark_parallel(&db, &entries, &config)?;
            write_output(&out, &eval_report_csv(&report))?;
            println!("{}", eval_report_text(&report));
            Ok(())
        }
        Command::Sweep { manifest, nq_list, nc_presets, n, per_category, seed, metric, out } => {
            let mode = parse_metric(&metric)?;
            if n == 0 || per_category == 0 {
                return Err(AppError::usage("--n and --per-category must be at least 1"));
            }
            let entries = read_manifest(&manifest)?;
            let config = EvalConfig {
                n_retrieved: n,
                queries_per_category: per_category,
                rng_seed: seed,
                metric_mode: mode,
            };
            let grid = sweep(&entries, &nq_list, &nc_presets, &config)?;
            write_output(&out, &sweep_csv(&grid))?;
            if let Some((nq, nc, precision)) = grid.best() {
                println!("best cell: nq={nq} nc={nc} precision={precision}");
            }
            Ok(())
        }
        Command::Synth { out, categories, per_category, seed } => {
            let config = SynthConfig { categories, per_category, seed };
            let entries = generate(&out, &config)?;
            println!(
                "wrote {} images in {} categories to {}",
                entries.len(),
                categories,
                out.display()
            );
            Ok(())
        }
    }
}

//! `semcep` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "semcep",
    version,
    about = "Semantic CEP pipeline: RDF conversion, querying, rules, streaming, metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a PPG CSV recording to RDF (format from the output extension).
    Convert(ConvertArgs),
    /// Parse an RDF file, report its size and optionally re-serialize it.
    Load(LoadArgs),
    /// Write the bundled knowledge base, or a generated one.
    Kb(KbArgs),
    /// Run a query over a store split into chunks.
    Query(QueryArgs),
    /// Time queries over chunk combinations.
    Bench(BenchArgs),
    /// Run rules over an event stream; optionally measure deployment latency under load.
    Cep(CepArgs),
    /// Classify a synthetic patient cohort.
    Cohort(CohortArgs),
    /// Stream records through a replicated broker set with a failure.
    StreamDemo(StreamDemoArgs),
    /// Schema metrics of an ontology.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    csv: PathBuf,
    #[arg(long, default_value = "P1")]
    patient: String,
    #[arg(long)]
    out: PathBuf,
    /// Keep decimal values instead of rounding to integers.
    #[arg(long)]
    decimal: bool,
    /// Fill interior gaps by carrying the last value forward.
    #[arg(long)]
    forward_fill: bool,
}

#[derive(Debug, Args)]
struct LoadArgs {
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept legacy spellings of the healthcare namespace.
    #[arg(long)]
    legacy_namespaces: bool,
}

#[derive(Debug, Args)]
struct KbArgs {
    #[arg(long)]
    out: PathBuf,
    /// Generate a synthetic KB instead of writing the bundled sample.
    #[arg(long)]
    generate: bool,
    #[arg(long, default_value_t = 81)]
    diseases: usize,
    #[arg(long, default_value_t = 200)]
    drugs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Store file; the bundled KB when omitted.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Query file.
    query: PathBuf,
    #[arg(long, default_value_t = 1)]
    chunks: usize,
    /// Worker threads; 0 means all cores.
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// `csv` or `tsv` (N-Triples terms).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Print rdfs:label values in place of IRIs (csv only).
    #[arg(long)]
    labels: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Store file; a generated clinical dataset when omitted.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Directory of `*.rq` files, labelled by file stem; built-in Q1..Q5 when omitted.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    chunks: usize,
    /// Chunk combinations, e.g. `1;2;3` or `1+2;2+3` (1-based).
    #[arg(long, default_value = "1;2;3;4;5")]
    combos: String,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// Patients in the generated dataset.
    #[arg(long, default_value_t = 2000)]
    patients: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also print a query-by-combo table to standard error.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct CepArgs {
    /// Rule file; the built-in rules when omitted.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Newline-delimited JSON events.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Derived events output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write derived events as N-Triples here.
    #[arg(long)]
    rdf: Option<PathBuf>,
    /// Deployment latency CSV (`rule,load_eps,deploy_seconds`).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Load tiers in events per second for the latency report.
    #[arg(long, value_delimiter = ',', default_value = "0,8000,16000,32000,48000")]
    loads: Vec<u64>,
    /// Window report over the events, e.g. `tumbling:10s` or `sliding:10s,5s`.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Debug, Args)]
struct CohortArgs {
    #[arg(long, default_value_t = 81)]
    patients: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    diseased: Option<usize>,
    #[arg(long)]
    undetected: Option<usize>,
    #[arg(long, default_value_t = 10)]
    events: usize,
    /// Risk distribution CSV (`label,moderate,high`).
    #[arg(long)]
    distribution: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StreamDemoArgs {
    #[arg(long, default_value_t = 3)]
    brokers: usize,
    #[arg(long, default_value_t = 3)]
    replication: usize,
    #[arg(long, default_value_t = 3)]
    partitions: usize,
    /// Broker to fail (letter or zero-based index), or `none`.
    #[arg(long, default_value = "A")]
    fail: String,
    #[arg(long, default_value_t = 1000)]
    events: usize,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Ontology file; the bundled one when omitted.
    ontology: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Command-line harness for the multilevel service index: dataset
//! generation, addition and retrieval benchmarks, retrieval stability,
//! closed-form expectations and oracle verification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

pub mod experiments;
pub mod report;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use mlix_core::{
    expected_addition, expected_retrieval, generate, AdditionMethod, Dataset, DatasetError, DatasetSpec, Deployment,
    ExpectationInputs, IndexError, KeyStrategy, StatsDump,
};
use thiserror::Error;

use crate::experiments::{bench_add, bench_retrieve, dataset_averages, fault_candidate, stability, verify};
use crate::report::write_csv;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "mlix", version, about = "Multilevel service index benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Generate(GenerateArgs),
    /// Measure the cost of building indexes.
    BenchAdd(BenchArgs),
    /// Measure traversal cost of retrieval requests.
    BenchRetrieve(BenchArgs),
    /// Spread of traversed services across requests, per key method.
    Stability(StabilityArgs),
    /// Evaluate a closed-form expectation.
    Expect(ExpectArgs),
    /// Check indexed retrieval against exhaustive search.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of distinct parameters |P|.
    #[arg(long)]
    pub params: usize,
    /// Number of services |S|.
    #[arg(long)]
    pub services: usize,
    /// Inputs per service.
    #[arg(long)]
    pub n: usize,
    /// Outputs per service.
    #[arg(long)]
    pub m: usize,
    /// Number of retrieval requests.
    #[arg(long)]
    pub requests: usize,
    /// Parameters per request.
    #[arg(long)]
    pub r: usize,
    #[arg(long, env = "MLIX_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset file, `-` for stdin.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated deployments.
    #[arg(long, value_delimiter = ',', required = true)]
    pub deployment: Vec<Deployment>,
    /// Comma-separated key methods.
    #[arg(long = "key-method", value_delimiter = ',', required = true)]
    pub key_method: Vec<KeyStrategy>,
    /// CSV output, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Timing repetitions; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Seed for the random key method.
    #[arg(long, env = "MLIX_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Value of the `dataset_id` column; defaults to the dataset's seed.
    #[arg(long)]
    pub dataset_id: Option<String>,
    /// Write the built index's statistics here (bench-add, single cell only).
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "primary")]
    pub deployment: Deployment,
    #[arg(
        long = "key-methods",
        value_delimiter = ',',
        default_value = "designated,original,random"
    )]
    pub key_methods: Vec<KeyStrategy>,
    /// Use the first N requests of the dataset (all by default).
    #[arg(long)]
    pub requests: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, env = "MLIX_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub dataset_id: Option<String>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["retrieval", "addition"])))]
pub struct ExpectArgs {
    /// Expected traversed entities per retrieval.
    #[arg(long)]
    pub retrieval: bool,
    /// Expected parameter comparisons per addition.
    #[arg(long)]
    pub addition: bool,
    #[arg(long)]
    pub deployment: Option<Deployment>,
    /// random | designated (addition only).
    #[arg(long, value_parser = parse_method)]
    pub method: Option<AdditionMethod>,
    /// Statistics dump written by `bench-add --stats-out`; explicit symbol
    /// flags override its values.
    #[arg(long)]
    pub from_stats: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long = "P")]
    pub p: Option<f64>,
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long = "R2")]
    pub r2: Option<f64>,
    #[arg(long = "R1")]
    pub r1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "primary,partial,full")]
    pub deployment: Vec<Deployment>,
    #[arg(
        long = "key-method",
        value_delimiter = ',',
        default_value = "original,random,maximum,minimum,designated"
    )]
    pub key_method: Vec<KeyStrategy>,
    #[arg(long, env = "MLIX_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Leave one retrievable service out of every build (negative control).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn parse_method(s: &str) -> Result<AdditionMethod, String> {
    match s {
        "random" => Ok(AdditionMethod::Random),
        "designated" => Ok(AdditionMethod::Designated),
        other => Err(format!("unknown method `{other}` (expected random | designated)")),
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    if is_stdio(path) {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(Dataset::parse(&text)?)
    } else {
        Ok(Dataset::read_from(BufReader::new(File::open(path)?))?)
    }
}

fn open_out(path: &Path) -> Result<Box<dyn Write>, CliError> {
    if is_stdio(path) {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn dataset_id(explicit: &Option<String>, data: &Dataset) -> String {
    explicit.clone().unwrap_or_else(|| data.spec.seed.to_string())
}

/// Runs one command, writing results and diagnostics to the given streams.
/// Returns the process exit code for non-error outcomes.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Generate(a) => {
            let spec = DatasetSpec {
                parameter_count: a.params,
                service_count: a.services,
                inputs_per_service: a.n,
                outputs_per_service: a.m,
                request_count: a.requests,
                request_size: a.r,
                seed: a.seed,
            };
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let data = generate(&spec)?;
            let mut out = open_out(&a.out)?;
            data.write_to(&mut out)?;
            out.flush()?;
            Ok(EXIT_OK)
        }
        Command::BenchAdd(a) => {
            let data = load_dataset(&a.dataset)?;
            if a.stats_out.is_some() && (a.deployment.len() != 1 || a.key_method.len() != 1) {
                return Err(usage("--stats-out needs exactly one deployment and one key method"));
            }
            let id = dataset_id(&a.dataset_id, &data);
            let (rows, cells) = bench_add(&data, &id, &a.deployment, &a.key_method, a.reps, a.seed)?;
            if let Some(path) = &a.stats_out {
                let (deployment, _, totals) = cells[0];
                let (n, m, r) = dataset_averages(&data);
                let dump = StatsDump {
                    deployment,
                    stats: totals.stats,
                    n: Some(n),
                    m: Some(m),
                    r: (!data.requests.is_empty()).then_some(r),
                };
                std::fs::write(path, dump.to_text())?;
            }
            write_csv(&rows, open_out(&a.out)?)?;
            Ok(EXIT_OK)
        }
        Command::BenchRetrieve(a) => {
            let data = load_dataset(&a.dataset)?;
            if data.requests.is_empty() {
                return Err(usage("dataset contains no retrieval requests"));
            }
            if a.stats_out.is_some() {
                return Err(usage("--stats-out is only supported by bench-add"));
            }
            let id = dataset_id(&a.dataset_id, &data);
            let rows = bench_retrieve(&data, &id, &a.deployment, &a.key_method, a.reps, a.seed)?;
            write_csv(&rows, open_out(&a.out)?)?;
            Ok(EXIT_OK)
        }
        Command::Stability(a) => {
            let data = load_dataset(&a.dataset)?;
            if data.requests.is_empty() {
                return Err(usage("dataset contains no retrieval requests"));
            }
            let limit = a.requests.unwrap_or(data.requests.len());
            if limit == 0 || limit > data.requests.len() {
                return Err(usage(format!(
                    "--requests {limit} outside 1..={} (requests in dataset)",
                    data.requests.len()
                )));
            }
            if a.key_methods.is_empty() {
                return Err(usage("at least one key method is required"));
            }
            let id = dataset_id(&a.dataset_id, &data);
            let (rows, _) = stability(&data, &id, a.deployment, &a.key_methods, limit, a.seed)?;
            write_csv(&rows, open_out(&a.out)?)?;
            Ok(EXIT_OK)
        }
        Command::Expect(a) => {
            let value = evaluate_expectation(&a)?;
            writeln!(stdout, "{value}")?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let data = load_dataset(&a.dataset)?;
            if data.requests.is_empty() {
                writeln!(stderr, "warning: dataset has no requests; nothing to verify")?;
            }
            let skip: Vec<_> = if a.inject_fault {
                match fault_candidate(&data) {
                    Some(id) => vec![id],
                    None => {
                        writeln!(stderr, "warning: no request retrieves any service; fault has no effect")?;
                        Vec::new()
                    }
                }
            } else {
                Vec::new()
            };
            let mut failed = false;
            for &d in &a.deployment {
                for &k in &a.key_method {
                    let outcome = verify(&data, d, k, a.seed, &skip)?;
                    match outcome.first_mismatch {
                        None => writeln!(stdout, "PASS {d} {k} ({} requests)", outcome.requests)?,
                        Some(m) => {
                            failed = true;
                            writeln!(
                                stdout,
                                "FAIL {d} {k} request #{} [{}]: expected {:?}, got {:?}",
                                m.request_index,
                                m.request.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                                m.expected,
                                m.actual
                            )?;
                        }
                    }
                }
            }
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
    }
}

/// Resolves the symbols a formula needs from explicit flags, falling back
/// to a statistics dump, and evaluates it.
pub fn evaluate_expectation(a: &ExpectArgs) -> Result<f64, CliError> {
    let dump = match &a.from_stats {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(StatsDump::parse(&text).map_err(|e| usage(e.to_string()))?)
        }
        None => None,
    };
    let deployment = a
        .deployment
        .or(dump.map(|d| d.deployment))
        .ok_or_else(|| usage("missing --deployment"))?;
    let from_dump = |pick: fn(&StatsDump) -> Option<f64>| dump.as_ref().and_then(pick);
    let symbols: [(&str, Option<f64>); 8] = [
        ("r", a.r.or(from_dump(|d| d.r))),
        ("n", a.n.or(from_dump(|d| d.n))),
        ("m", a.m.or(from_dump(|d| d.m))),
        ("P", a.p.or(from_dump(|d| Some(d.stats.parameter_count as f64)))),
        ("S", a.s.or(from_dump(|d| Some(d.stats.service_count as f64)))),
        ("K", a.k.or(from_dump(|d| Some(d.stats.key_count as f64)))),
        ("R2", a.r2.or(from_dump(|d| Some(d.stats.input_similar_count as f64)))),
        ("R1", a.r1.or(from_dump(|d| Some(d.stats.similar_count as f64)))),
    ];
    let get = |name: &str| -> Result<f64, CliError> {
        symbols
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, v)| *v)
            .ok_or_else(|| usage(format!("missing required symbol `{name}` (pass --{name})")))
    };

    let mut x = ExpectationInputs::default();
    let result = if a.retrieval {
        x.r = get("r")?;
        x.parameters = get("P")?;
        match deployment {
            Deployment::Primary => x.services = get("S")?,
            _ => x.input_similar = get("R2")?,
        }
        expected_retrieval(deployment, &x)
    } else {
        let method = a
            .method
            .ok_or_else(|| usage("missing --method (random | designated)"))?;
        x.keys = get("K")?;
        if deployment != Deployment::Primary {
            x.parameters = get("P")?;
            x.n = get("n")?;
            x.input_similar = get("R2")?;
        }
        if deployment == Deployment::Full {
            x.similar = get("R1")?;
            x.m = get("m")?;
        }
        expected_addition(deployment, method, &x)
    };
    result.map_err(|e| usage(e.to_string()))
}

/// Parses arguments, runs, and maps every outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    match run(cli, &mut stdout, &mut stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

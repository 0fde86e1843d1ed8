//! `betagrowth` command-line front end.

mod commands;
mod parse;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use betagrowth::{ErrorKind, Exec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Directory used for reports when `--out` is not given.
pub const OUT_DIR_ENV: &str = "BETAGROWTH_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "betagrowth", version, about = "Growth of beta-expansions and Bernoulli convolution dimensions")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file; defaults to $BETAGROWTH_OUT_DIR/<command>.<ext> or stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Number of length-n prefixes of expansions of x.
    Count(CountArgs),
    /// Branching tree of admissible prefixes.
    Tree(TreeArgs),
    /// κ(β) for β below the golden ratio.
    Kappa(BetaArgs),
    /// Check 𝒩ₙ(x) ≥ 2^{κn−1}.
    Bound(BoundArgs),
    /// Distinct digit sums and their gaps.
    Sums(SumsArgs),
    /// Counts for x = 10^{2m₁}10^{2m₂}… in the golden base.
    Sparse(SparseArgs),
    /// Run the random β-transformation.
    Simulate(SimulateArgs),
    /// Net-interval automaton as JSON or DOT.
    Automaton(AutomatonArgs),
    /// Growth exponent γ and the dimension D.
    Gamma(GammaArgs),
    /// γ and D for the multinacci family as CSV.
    Table1(Table1Args),
    /// Local-dimension slopes.
    Dims(DimsArgs),
    /// Moment spectrum estimates as CSV.
    Tau(TauArgs),
    /// Fast invariant checks.
    Selftest,
}

#[derive(Args, Debug, Serialize, Clone)]
struct BetaArgs {
    /// golden, multinacci:n, int:k, poly:c0,…,cd or a rational.
    #[arg(long)]
    beta: String,
    #[arg(long, default_value_t = 2)]
    m: u32,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long)]
    x: String,
    #[arg(long)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
struct TreeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long)]
    x: String,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 24)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
struct SumsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long, default_value_t = 20)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
struct SparseArgs {
    /// Strictly increasing block sizes, comma separated.
    #[arg(long, default_value = "1,2,3")]
    blocks: String,
    /// Also report #𝔛ₘ for m = 1..=this.
    #[arg(long, default_value_t = 6)]
    x_m: u32,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 64)]
    steps: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Args, Debug, Serialize)]
struct AutomatonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    format: GraphFormat,
    #[arg(long, default_value_t = betagrowth::netautomaton::DEFAULT_STATE_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Mc,
    Series,
    Integer,
}

#[derive(Args, Debug, Serialize)]
struct GammaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long, value_enum, default_value_t = Method::Mc)]
    method: Method,
    /// Path length per chain.
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 32)]
    chains: usize,
    /// Exactly summed series levels (series method).
    #[arg(long)]
    k_exact: Option<usize>,
    #[arg(long, default_value_t = betagrowth::netautomaton::DEFAULT_STATE_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct Table1Args {
    #[arg(long, default_value = "2..10")]
    n_range: String,
    /// Exactly summed series levels; n = 2 keeps its sampled tail.
    #[arg(long)]
    k_exact: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct DimsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    /// Comma-separated rational points, or `random:N` for N uniform points.
    #[arg(long)]
    x: String,
    #[arg(long, default_value = "10..30:2")]
    levels: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args, Debug, Serialize)]
struct TauArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: BetaArgs,
    #[arg(long, default_value = "-1,0,1,2")]
    q_list: String,
    #[arg(long, default_value = "12..18")]
    levels: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

/// Fully resolved configuration, echoed in every report.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a> {
    version: &'static str,
    seed: u64,
    threads: usize,
    exec: Exec,
    command: &'a Command,
}

pub struct Ctx {
    pub seed: u64,
    pub exec: Exec,
}

pub enum Report {
    Json(serde_json::Value),
    Csv(String),
    Dot(String),
}

impl Report {
    fn extension(&self) -> &'static str {
        match self {
            Report::Json(_) => "json",
            Report::Csv(_) => "csv",
            Report::Dot(_) => "dot",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(betagrowth::Error),
    Usage(String),
    Io(std::io::Error),
    Selftest(String),
}

impl From<betagrowth::Error> for CliError {
    fn from(e: betagrowth::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::BadInput => 2,
                ErrorKind::CapExceeded => 3,
                ErrorKind::Hypothesis => 4,
                ErrorKind::Invariant => 5,
            },
            CliError::Selftest(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Selftest(s) => write!(f, "selftest failed: {s}"),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Count(_) => "count",
        Command::Tree(_) => "tree",
        Command::Kappa(_) => "kappa",
        Command::Bound(_) => "bound",
        Command::Sums(_) => "sums",
        Command::Sparse(_) => "sparse",
        Command::Simulate(_) => "simulate",
        Command::Automaton(_) => "automaton",
        Command::Gamma(_) => "gamma",
        Command::Table1(_) => "table1",
        Command::Dims(_) => "dims",
        Command::Tau(_) => "tau",
        Command::Selftest => "selftest",
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    // Ignored if the pool is already initialized.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let ctx = Ctx { seed: cli.seed, exec };
    let config = RunConfig { version: env!("CARGO_PKG_VERSION"), seed: cli.seed, threads, exec, command: &cli.command };
    let config_json = serde_json::to_value(&config).expect("config serializes");

    let report = match &cli.command {
        Command::Count(a) => commands::count(&ctx, a)?,
        Command::Tree(a) => commands::tree(&ctx, a)?,
        Command::Kappa(a) => commands::kappa(&ctx, a)?,
        Command::Bound(a) => commands::bound(&ctx, a)?,
        Command::Sums(a) => commands::sums(&ctx, a)?,
        Command::Sparse(a) => commands::sparse(&ctx, a)?,
        Command::Simulate(a) => commands::simulate(&ctx, a)?,
        Command::Automaton(a) => commands::automaton(&ctx, a)?,
        Command::Gamma(a) => commands::gamma(&ctx, a)?,
        Command::Table1(a) => commands::table1(&ctx, a)?,
        Command::Dims(a) => commands::dims(&ctx, a)?,
        Command::Tau(a) => commands::tau(&ctx, a)?,
        Command::Selftest => selftest::run(&ctx)?,
    };
    let text = render(&config_json, &report);
    let path = cli.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|d| PathBuf::from(d).join(format!("{}.{}", command_name(&cli.command), report.extension())))
    });
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// JSON reports embed the config; CSV and DOT carry it in leading comments.
fn render(config: &serde_json::Value, report: &Report) -> String {
    match report {
        Report::Json(v) => {
            let doc = serde_json::json!({ "config": config, "result": v });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Report::Csv(body) => format!("# config: {config}\n{body}"),
        Report::Dot(body) => format!("// config: {config}\n{body}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

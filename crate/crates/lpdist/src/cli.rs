//! Argument parsing and subcommands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{bench_case, render_csv as bench_csv};
use crate::error::{CliError, Result};
use crate::format::{self, emit, floats, read_string, write_string, Float17, OutputFormat};
use crate::gen::{generate, Distribution};
use crate::run::{backend_name, configure_threads, run, Algorithm, BackendChoice, Outcome, RunConfig, ValueKind};
use crate::verify::verify;

#[derive(Debug, Parser)]
#[command(
    name = "lpdist",
    version,
    about = "Exact and approximate l_p text-to-pattern distances"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random text and pattern.
    Gen(GenArgs),
    /// Compute the distance array with any algorithm.
    Dist(DistArgs),
    /// Approximate distances; the engine is chosen from p.
    Approx(ApproxArgs),
    /// Compare an algorithm with the brute-force oracle.
    Verify(VerifyArgs),
    /// Time algorithms over a grid of text lengths, as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Alphabet size U, a power of two.
    #[arg(long = "universe", short = 'U', default_value_t = 256)]
    pub universe: u64,
    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    pub mode: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Text file: `n U` then n symbols.
    #[arg(long)]
    pub text: PathBuf,
    /// Pattern file, same format.
    #[arg(long)]
    pub pattern: PathBuf,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long)]
    pub p: f64,
    /// Target relative error of the approximate algorithms.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, short, value_enum, default_value_t = Algorithm::Auto)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs combined by median (randomized algorithms, odd).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Replace the default eta of the approximate algorithms.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Auto)]
    pub backend: BackendChoice,
    /// Transform length of the blocked correlations (power of two).
    #[arg(long)]
    pub fft_len: Option<usize>,
}

impl EngineArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            algorithm: self.algorithm,
            p: self.p,
            eps: self.eps,
            seed: self.seed,
            reps: self.reps,
            eta: self.eta,
            backend: self.backend,
            fft_len: self.fft_len,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// 0 selects the Hamming engine.
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub eps: f64,
    /// Use the randomized engine (requires 0 < p < 1).
    #[arg(long)]
    pub randomized: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Auto)]
    pub backend: BackendChoice,
    #[arg(long)]
    pub fft_len: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl ApproxArgs {
    fn config(&self) -> Result<RunConfig> {
        let algorithm = if self.p == 0.0 {
            Algorithm::ApproxHamming
        } else if self.randomized {
            if self.p >= 1.0 {
                return Err(CliError::usage(format!(
                    "--randomized needs 0 < p < 1, got {}; p >= 1 uses the deterministic engine",
                    self.p
                )));
            }
            Algorithm::ApproxRand
        } else {
            Algorithm::Auto
        };
        Ok(RunConfig {
            algorithm,
            p: self.p,
            eps: Some(self.eps),
            seed: self.seed,
            reps: self.reps,
            eta: self.eta,
            backend: self.backend,
            fft_len: self.fft_len,
        })
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Report file (JSON); stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub corrupt_index: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Text lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [4096usize, 8192, 16384])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    #[arg(long = "universe", short = 'U', default_value_t = 16)]
    pub universe: u64,
    /// Algorithms to time.
    #[arg(long, short, value_enum, value_delimiter = ',', default_values_t = [Algorithm::ApproxDet])]
    pub algorithm: Vec<Algorithm>,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Convolution)]
    pub backend: BackendChoice,
    #[arg(long)]
    pub fft_len: Option<usize>,
    /// Timed repetitions per case; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct JsonParams<'a> {
    n: usize,
    m: usize,
    universe: u64,
    p: f64,
    eps: Option<f64>,
    algorithm: &'a str,
    backend: Option<&'a str>,
    seed: Option<u64>,
    reps: Option<usize>,
    eta: Option<Float17>,
    levels: usize,
    alphabet: usize,
    kind: ValueKind,
}

#[derive(Serialize)]
struct JsonSummary {
    seconds: Float17,
    correlations: u64,
    block_ffts: u64,
    pattern_ffts: u64,
    min: Float17,
    max: Float17,
    mean: Float17,
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    params: JsonParams<'a>,
    values: Vec<Float17>,
    summary: JsonSummary,
}

fn summary_line(n: usize, m: usize, config: &RunConfig, out: &Outcome) -> String {
    let eps = config.eps.map_or_else(|| "-".to_string(), |e| e.to_string());
    format!(
        "n={n} m={m} p={} eps={eps} algorithm={} backend={} seconds={:.6} correlations={}",
        config.p,
        out.algorithm.name(),
        out.backend.map_or("none", backend_name),
        out.seconds,
        out.stats.correlations
    )
}

fn render_outcome(
    text: &format::StringFile,
    m: usize,
    config: &RunConfig,
    out: &Outcome,
    fmt: OutputFormat,
) -> Result<String> {
    if fmt == OutputFormat::Csv {
        return Ok(format::render_csv(&out.values));
    }
    let values = &out.values;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let doc = JsonOutput {
        params: JsonParams {
            n: text.string.len(),
            m,
            universe: text.universe,
            p: config.p,
            eps: config.eps,
            algorithm: out.algorithm.name(),
            backend: out.backend.map(backend_name),
            seed: out.algorithm.is_randomized().then_some(config.seed),
            reps: out.reps,
            eta: out.params.map(|p| Float17(p.eta())),
            levels: out.levels(),
            alphabet: out.alphabet(),
            kind: out.kind,
        },
        values: floats(values),
        summary: JsonSummary {
            seconds: Float17(out.seconds),
            correlations: out.stats.correlations,
            block_ffts: out.stats.block_ffts,
            pattern_ffts: out.stats.pattern_ffts,
            min: Float17(min),
            max: Float17(max),
            mean: Float17(mean),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    s.push('\n');
    Ok(s)
}

fn compute(input: &InputArgs, config: &RunConfig, output: &OutputArgs) -> Result<()> {
    let text = read_string(&input.text)?;
    let pattern = read_string(&input.pattern)?;
    let out = run(&text.string, &pattern.string, config)?;
    let m = pattern.string.len();
    let rendered = render_outcome(&text, m, config, &out, output.format)?;
    emit(output.output.as_deref(), &rendered)?;
    eprintln!("{}", summary_line(text.string.len(), m, config, &out));
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let (text, pattern) = generate(args.n, args.m, args.universe, args.mode, args.seed)?;
    write_string(&args.text, &text)?;
    write_string(&args.pattern, &pattern)
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let text = read_string(&args.input.text)?;
    let pattern = read_string(&args.input.pattern)?;
    let report = verify(&text.string, &pattern.string, &args.engine.config(), args.corrupt_index)?;
    let mut s = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
    s.push('\n');
    emit(args.output.as_deref(), &s)?;
    eprintln!(
        "{}: max relative error {} (tolerance {}), {} of {} positions over",
        if report.pass { "pass" } else { "FAIL" },
        format::format_float(report.max_rel_error.0),
        report.tolerance,
        report.failures,
        report.positions.len()
    );
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "{} positions exceed the tolerance",
            report.failures
        )))
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    if !args.universe.is_power_of_two() || args.universe < 2 {
        return Err(CliError::usage(format!(
            "U must be a power of two >= 2, got {}",
            args.universe
        )));
    }
    let bits = args.universe.trailing_zeros();
    let mut rows = Vec::new();
    for &algorithm in &args.algorithm {
        let mut config = RunConfig {
            algorithm,
            p: args.p,
            eps: Some(args.eps),
            seed: args.seed,
            reps: args.reps,
            eta: args.eta,
            backend: args.backend,
            fft_len: args.fft_len,
        };
        if algorithm.is_exact() {
            config.eps = None;
        }
        for &n in &args.sizes {
            let row = bench_case(n, args.m, bits, &config, args.repeats, args.seed)?;
            eprintln!("{}", row.csv());
            rows.push(row);
        }
    }
    emit(args.output.as_deref(), &bench_csv(&rows))
}

pub fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Dist(args) => compute(&args.input, &args.engine.config(), &args.output),
        Command::Approx(args) => compute(&args.input, &args.config()?, &args.output),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lpdist: {e}");
            e.exit_code()
        }
    }
}

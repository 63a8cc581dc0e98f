//! `pcm`: batch access to completion, weighting, inconsistency indices,
//! structured matrices, elicitation and the HTTP service.
//!
//! Exit status: 0 on success, 2 for usage and I/O errors, 3 for domain
//! errors (the message names the error case).

mod elicit;
mod output;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcm_core::analysis::{analyze, AnalysisOptions};
use pcm_core::elicitation::{pattern_experiment_with, DistanceMetric, PatternOptions};
use pcm_core::inconsistency::{random_sample, MissingPatternPolicy, RiTable};
use pcm_core::structures::{
    bwm_enumerate_violations, bwm_guarantee, bwm_matrix, cdag_matrix, head_to_head_ingest,
    parse_win_counts, random_cdag, Adjustment, CdagDocument, EnumerationMode, HeadToHeadOptions,
};
use pcm_core::weighting::{Bounds, CompletionMethod};
use pcm_core::{
    parse_pcm_detect, ri_approx, simulate_ri, DocumentFormat, Gauge, IncompletePcm, PcmError,
    RiQueryPolicy, Scale, WeightMethod,
};

use output::{sig, write_matrix};

#[derive(Parser)]
#[command(
    name = "pcm",
    version,
    about = "Incomplete pairwise comparison matrices"
)]
struct Cli {
    /// Seed for every randomized subcommand; PCM_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Structured,
}

impl From<FormatArg> for DocumentFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => DocumentFormat::Csv,
            FormatArg::Structured => DocumentFormat::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RiPolicyArg {
    Table,
    Approx,
    Simulate,
}

#[derive(Args)]
struct MatrixInput {
    /// Matrix file (CSV grid or structured JSON); `-` reads standard input.
    file: PathBuf,
    /// Output format for matrices; defaults to the input's format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Comparison graph, known triads, inconsistency ratio, weights and ordinal violations.
    Analyze {
        #[command(flatten)]
        input: MatrixInput,
        /// Weighting used for the violation check.
        #[arg(long, default_value = "llsm")]
        method: WeightMethod,
        /// Use the unbounded eigenvalue-optimal completion for the ratio.
        #[arg(long)]
        unbounded: bool,
        /// Random-index lookup for shapes outside the table.
        #[arg(long, value_enum, default_value = "approx")]
        ri_policy: RiPolicyArg,
        /// Emit the full JSON document.
        #[arg(long)]
        json: bool,
    },
    /// Priority weights.
    Weights {
        #[command(flatten)]
        input: MatrixInput,
        /// llsm, em, harker or tree-gm.
        #[arg(long, default_value = "llsm")]
        method: WeightMethod,
        /// sum-one, sum-hundred, last-one or geom-mean-one.
        #[arg(long, default_value = "sum-one")]
        gauge: Gauge,
        #[arg(long)]
        json: bool,
    },
    /// Fill the missing comparisons.
    Complete {
        #[command(flatten)]
        input: MatrixInput,
        /// llsm, em or lex.
        #[arg(long)]
        method: CompletionMethod,
        /// Box constraint `lo:hi` for the em completion, e.g. `1/9:9`.
        #[arg(long)]
        bounds: Option<String>,
        /// Emit the completion document (filled entries, diagnostics, stages).
        #[arg(long)]
        json: bool,
    },
    /// Random index lookup, approximation or simulation.
    Ri {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, value_enum, default_value = "table")]
        policy: RiPolicyArg,
        /// Sample count for `--policy simulate`.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Missing-entry placement for simulation.
        #[arg(long, default_value = "uniform-connected")]
        pattern: MissingPatternPolicy,
    },
    /// Generate structured or random matrices.
    #[command(subcommand)]
    Generate(Generate),
    /// Convert external data into a matrix.
    #[command(subcommand)]
    Ingest(Ingest),
    /// Check the sufficient conditions for violation-free LLSM weights of a best-worst matrix.
    BwmCheck {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        json: bool,
    },
    /// Count LLSM ordinal violations over integer best-worst matrices; prints `total theorem1 violations`.
    BwmEnumerate {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Visit all 8^(2n-3) matrices instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Sample count when not exhaustive.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Ask comparisons one by one on the terminal, with the inconsistency ratio after each answer.
    Elicit(elicit::ElicitArgs),
    /// Numerical experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        addr: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory holding the session store.
        #[arg(long, default_value = "pcm-data")]
        data_dir: PathBuf,
        /// Allowed cross-origin caller, e.g. the web UI; repeatable.
        #[arg(long)]
        cors_origin: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Random complete directed acyclic graph with its matrix.
    Cdag {
        #[arg(long)]
        n: usize,
        /// Probability of each pair being compared.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Dominance value on every arc.
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Print the matrix instead of the arc document.
        #[arg(long)]
        matrix: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Best-worst matrix from given judgments, or random integer ones.
    Bwm {
        #[arg(long)]
        n: usize,
        /// `a_12,...,a_1n`.
        #[arg(long, value_delimiter = ',')]
        best: Option<Vec<f64>>,
        /// `a_2n,...,a_(n-1)n`.
        #[arg(long, value_delimiter = ',')]
        worst: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Random connected Saaty-scale matrix with `m` missing comparisons.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum Ingest {
    /// Matrix from a CSV of head-to-head win counts.
    H2h {
        file: PathBuf,
        /// 1: ceil(wins/5) for one-sided pairs; 2: wins+2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        adjustment: u8,
        /// Raise each comparison to (matches/T).
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Rank connected filling patterns by the distance of their weights from the complete ones.
    Patterns {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// euclidean, chebyshev or cosine.
        #[arg(long, default_value = "euclidean")]
        metric: DistanceMetric,
        /// Log-normal noise level.
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        /// Round perturbed entries to the Saaty scale.
        #[arg(long)]
        round: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Domain(PcmError),
}

impl From<PcmError> for CliError {
    fn from(e: PcmError) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn read_input(path: &PathBuf) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load(input: &MatrixInput) -> CliResult<(IncompletePcm, DocumentFormat)> {
    let text = read_input(&input.file)?;
    let (pcm, detected) = parse_pcm_detect(&text)?;
    Ok((pcm, input.format.map(Into::into).unwrap_or(detected)))
}

fn json(out: &mut dyn Write, value: &impl serde::Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn effective_seed(flag: u64) -> CliResult<u64> {
    match std::env::var("PCM_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!("PCM_SEED must be an unsigned integer, got {v:?}"))
        }),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    let seed = effective_seed(cli.seed)?;
    match cli.command {
        Command::Analyze {
            input,
            method,
            unbounded,
            ri_policy,
            json: as_json,
        } => {
            let (pcm, _) = load(&input)?;
            let policy = match ri_policy {
                RiPolicyArg::Table => RiQueryPolicy::TableOnly,
                RiPolicyArg::Approx => RiQueryPolicy::TableThenApprox,
                RiPolicyArg::Simulate => RiQueryPolicy::SimulateIfMissing {
                    samples: 10_000,
                    seed,
                },
            };
            let a = analyze(
                &pcm,
                &AnalysisOptions {
                    method,
                    bounded: !unbounded,
                    ri_policy: policy,
                },
            )?;
            if as_json {
                json(out, &a)?;
            } else {
                output::write_analysis(out, &a)?;
            }
        }
        Command::Weights {
            input,
            method,
            gauge,
            json: as_json,
        } => {
            let (pcm, _) = load(&input)?;
            let w = method.weigh(&pcm)?.regauge(gauge);
            if as_json {
                json(out, &w.to_document())?;
            } else {
                for (k, v) in w.weights().iter().enumerate() {
                    writeln!(out, "{}\t{}", k + 1, sig(*v))?;
                }
            }
        }
        Command::Complete {
            input,
            method,
            bounds,
            json: as_json,
        } => {
            let (pcm, format) = load(&input)?;
            let bounds = bounds.as_deref().map(Bounds::parse).transpose()?;
            let c = method.complete(&pcm, bounds)?;
            if as_json {
                json(out, &c.to_document())?;
            } else {
                write_matrix(out, &c.matrix, format)?;
            }
        }
        Command::Ri {
            n,
            m,
            policy,
            samples,
            pattern,
        } => {
            let table = RiTable::builtin();
            let (mean, stdev, source) = match policy {
                RiPolicyArg::Table => {
                    let cell = table.cell(n, m).ok_or(
                        if n < 3 || m > pcm_core::inconsistency::max_missing(n) {
                            PcmError::OutOfRange { n, m }
                        } else {
                            PcmError::NotInTable { n, m }
                        },
                    )?;
                    (cell.mean, cell.stdev, "table")
                }
                RiPolicyArg::Approx => (ri_approx(n, m)?, None, "approx"),
                RiPolicyArg::Simulate => {
                    let (mean, sd) = simulate_ri(n, m, samples, seed, &pattern)?;
                    (mean, Some(sd), "simulated")
                }
            };
            let sd = stdev.map(sig).unwrap_or_else(|| "-".into());
            writeln!(out, "{n}\t{m}\t{}\t{sd}\t{source}", sig(mean))?;
        }
        Command::Generate(g) => generate(g, seed, out)?,
        Command::Ingest(Ingest::H2h {
            file,
            adjustment,
            cap,
            format,
        }) => {
            let wins = parse_win_counts(&read_input(&file)?)?;
            let mut opts = HeadToHeadOptions::new(if adjustment == 1 {
                Adjustment::Ceiling
            } else {
                Adjustment::Additive
            });
            opts.exponent_cap = cap;
            write_matrix(out, &head_to_head_ingest(&wins, &opts)?, format.into())?;
        }
        Command::BwmCheck {
            input,
            json: as_json,
        } => {
            let (pcm, _) = load(&input)?;
            let r = bwm_guarantee(&pcm)?;
            if as_json {
                json(out, &r)?;
            } else {
                output::write_bwm_report(out, &r)?;
            }
        }
        Command::BwmEnumerate {
            n,
            exhaustive,
            samples,
        } => {
            let mode = if exhaustive {
                EnumerationMode::Exhaustive
            } else {
                EnumerationMode::Sampled {
                    count: samples,
                    seed,
                }
            };
            let c = bwm_enumerate_violations(n, Scale::Saaty, mode)?;
            writeln!(out, "{} {} {}", c.total, c.theorem1, c.violations)?;
        }
        Command::Elicit(args) => elicit::run(args, &mut io::stdin().lock(), out)?,
        Command::Experiment(Experiment::Patterns {
            n,
            samples,
            metric,
            sigma,
            round,
            json: as_json,
        }) => {
            let mut opts = PatternOptions::new(samples, seed, metric);
            opts.sigma = sigma;
            opts.round_to_saaty = round;
            let e = pattern_experiment_with(n, &opts)?;
            if as_json {
                json(out, &e)?;
            } else {
                write!(out, "{}", e.to_table())?;
            }
        }
        Command::Serve {
            addr,
            port,
            data_dir,
            cors_origin,
        } => {
            let config = pcm_service::ServeConfig {
                addr,
                port,
                data_dir,
                cors_origins: cors_origin,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(pcm_service::serve(config))?;
        }
    }
    Ok(())
}

fn generate(g: Generate, seed: u64, out: &mut dyn Write) -> CliResult {
    match g {
        Generate::Cdag {
            n,
            density,
            alpha,
            matrix,
            format,
        } => {
            let spec = random_cdag(n, density, alpha, seed)?;
            if matrix {
                write_matrix(out, &cdag_matrix(&spec)?, format.into())?;
            } else {
                json(out, &CdagDocument::from_spec(&spec))?;
            }
        }
        Generate::Bwm {
            n,
            best,
            worst,
            format,
        } => {
            let (best, worst) = match (best, worst) {
                (Some(b), Some(w)) => (b, w),
                (None, None) => output::random_bwm(n, seed),
                _ => {
                    return Err(CliError::Usage(
                        "give both --best and --worst, or neither".into(),
                    ))
                }
            };
            write_matrix(out, &bwm_matrix(n, &best, &worst)?, format.into())?;
        }
        Generate::Random { n, m, format } => {
            let pcm = random_sample(n, m, seed, 0, &MissingPatternPolicy::UniformConnected)?;
            write_matrix(out, &pcm, format.into())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use btkit::estimators::Method;
use btkit::Normalization;
use btkit_cli::app::{self, exit, Command, FitMethod, Format, RunConfig, ScenarioArgs};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "btkit",
    version,
    about = "Paired-comparison ratings and Bradley-Terry simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Convergence tolerance
    #[arg(long, default_value_t = app::DEFAULT_TOL)]
    tol: f64,
    /// Iteration cap for iterative methods
    #[arg(long, default_value_t = app::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Rating scale: ref:<label>, ref:last, sum1, geomean1 or natural
    #[arg(long, default_value = "ref:last")]
    normalize: Normalization,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutFormat::Tsv)]
    format: OutFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Poisson,
    SuddenDeath,
    Accumulated,
    TwoState,
    Barker,
    Exponential,
    Gumbel,
    Weibull,
    Frechet,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit one rating method to a comparison file
    Fit {
        /// Matrix CSV or winner,loser[,count] results CSV
        input: PathBuf,
        /// bt, pagerank, scroogefactor, fair-bets, cesaro, wei-kendall or rpi
        #[arg(long, default_value = "bt")]
        method: FitMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Fit several methods and tabulate their ratings and ranks
    Compare {
        input: PathBuf,
        /// Comma-separated method names
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "bt,pagerank,scroogefactor,fair-bets,cesaro,wei-kendall"
        )]
        methods: Vec<Method>,
        #[command(flatten)]
        common: Common,
    },
    /// Report irreducibility and quasi-symmetry of a comparison file
    Check {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo check of a generative scenario against its closed form
    Simulate {
        #[arg(long, value_enum)]
        scenario: ScenarioName,
        /// Two rates (poisson, two-state)
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// Per-round success probabilities of both sides (sudden-death)
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Lead needed to win (sudden-death)
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Strengths (accumulated: two, barker: any number)
        #[arg(long, value_delimiter = ',')]
        strengths: Option<Vec<f64>>,
        /// Matches per series (accumulated)
        #[arg(long, default_value_t = 10)]
        matches: u32,
        /// Observation horizon (two-state)
        #[arg(long)]
        horizon: Option<f64>,
        /// Games per chain (barker)
        #[arg(long)]
        games: Option<u64>,
        /// Shape parameter (gumbel, weibull, frechet)
        #[arg(long)]
        shape: Option<f64>,
        /// Per-item parameters (discriminal families)
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        /// Items compared, as i,j (discriminal families)
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0usize, 1])]
        pair: Vec<usize>,
        /// Number of trials [default: 100000, or 1 chain for barker]
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output format
        #[arg(long, value_enum, default_value_t = OutFormat::Tsv)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric rating from race_id,competitor,rank records
    Race {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn format_of(f: OutFormat) -> Format {
    match f {
        OutFormat::Tsv => Format::Tsv,
        OutFormat::Json => Format::Json,
    }
}

fn with_common(command: Command, input: PathBuf, c: Common) -> RunConfig {
    RunConfig {
        input: Some(input),
        tol: c.tol,
        max_iter: c.max_iter,
        normalization: c.normalize,
        format: format_of(c.format),
        out: c.out,
        ..RunConfig::new(command)
    }
}

fn config(cli: Cli) -> RunConfig {
    match cli.command {
        Cmd::Fit {
            input,
            method,
            common,
        } => with_common(Command::Fit { method }, input, common),
        Cmd::Compare {
            input,
            methods,
            common,
        } => with_common(Command::Compare { methods }, input, common),
        Cmd::Check { input, common } => with_common(Command::Check, input, common),
        Cmd::Race { input, common } => with_common(Command::Race, input, common),
        Cmd::Simulate {
            scenario,
            rates,
            p,
            r,
            strengths,
            matches,
            horizon,
            games,
            shape,
            params,
            pair,
            n,
            seed,
            format,
            out,
        } => {
            let name = scenario
                .to_possible_value()
                .expect("no skipped variants")
                .get_name()
                .to_string();
            let scenario = ScenarioArgs {
                name,
                rates,
                p,
                r: Some(r),
                strengths,
                matches: Some(matches),
                horizon,
                games,
                shape,
                params,
                pair: Some((pair[0], pair[1])),
            };
            RunConfig {
                seed,
                trials: n,
                format: format_of(format),
                out,
                ..RunConfig::new(Command::Simulate { scenario })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT as u8 } else { 0 });
        }
    };
    let cfg = config(cli);
    match app::run(&cfg) {
        Ok(report) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &report)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(report.as_bytes())
                        .map_err(|e| e.to_string())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(exit::INPUT as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

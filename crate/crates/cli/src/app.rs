//! Command dispatch and report rendering.

use std::fmt::Write as _;
use std::path::PathBuf;

use btkit::estimators::{
    self, compare_estimators, fit_bt, rpi_classic, CompareOptions, FitOptions, Method, RpiWeights,
    SpectralOptions,
};
use btkit::geometric::{geometric_rating, rank_to_sphere};
use btkit::ratings::rank_labels;
use btkit::simulators::{self, DiscriminalSpec, Family, GameSpec, Scenario, SimResult};
use btkit::{ComparisonMatrix, Error, Normalization};
use serde_json::{json, Value};

use crate::io;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const SIGMA_BAND: f64 = 4.0;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const NO_CONVERGENCE: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

/// `fit` accepts every rating method plus RPI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Rating(Method),
    Rpi,
}

impl std::str::FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim().eq_ignore_ascii_case("rpi") {
            Ok(FitMethod::Rpi)
        } else {
            s.parse().map(FitMethod::Rating)
        }
    }
}

/// Scenario parameters as given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioArgs {
    pub name: String,
    pub rates: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub r: Option<u32>,
    pub strengths: Option<Vec<f64>>,
    pub matches: Option<u32>,
    pub horizon: Option<f64>,
    pub games: Option<u64>,
    pub shape: Option<f64>,
    pub params: Option<Vec<f64>>,
    pub pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Fit { method: FitMethod },
    Compare { methods: Vec<Method> },
    Check,
    Simulate { scenario: ScenarioArgs },
    Race,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub tol: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    pub seed: u64,
    pub trials: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            normalization: Normalization::LastItem,
            seed: 0,
            trials: None,
            format: Format::Tsv,
            out: None,
        }
    }
}

/// Failure with the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let code = if e.is_precondition() {
            exit::PRECONDITION
        } else {
            exit::INPUT
        };
        RunError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::ParseError> for RunError {
    fn from(e: io::ParseError) -> Self {
        RunError {
            code: exit::INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> RunError {
    RunError {
        code: exit::INPUT,
        message: message.into(),
    }
}

fn not_converged(what: &str, iterations: usize) -> RunError {
    RunError {
        code: exit::NO_CONVERGENCE,
        message: format!("{what} did not converge within {iterations} iterations"),
    }
}

/// Fixed six decimals, never printing a negative zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn read_input(cfg: &RunConfig) -> Result<String, RunError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| input_error("an input file is required"))?;
    std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn validate(cfg: &RunConfig) -> Result<(), RunError> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(input_error("--tol must be positive"));
    }
    if cfg.trials == Some(0) {
        return Err(input_error("--n must be at least 1"));
    }
    Ok(())
}

/// Executes `cfg` and returns the complete report text. Nothing is written
/// here, so a failure never leaves partial output behind.
pub fn run(cfg: &RunConfig) -> Result<String, RunError> {
    validate(cfg)?;
    match &cfg.command {
        Command::Fit { method } => {
            let c = io::parse_comparisons(&read_input(cfg)?)?;
            fit(cfg, &c, *method)
        }
        Command::Compare { methods } => {
            let c = io::parse_comparisons(&read_input(cfg)?)?;
            compare(cfg, &c, methods)
        }
        Command::Check => {
            let c = io::parse_comparisons(&read_input(cfg)?)?;
            check(cfg, &c)
        }
        Command::Simulate { scenario } => simulate(cfg, scenario),
        Command::Race => race(cfg, &read_input(cfg)?),
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn fit(cfg: &RunConfig, c: &ComparisonMatrix, method: FitMethod) -> Result<String, RunError> {
    let tie_tol = 10.0 * cfg.tol;
    match method {
        FitMethod::Rating(Method::BradleyTerry) => {
            let r = fit_bt(
                c,
                &FitOptions {
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    normalization: cfg.normalization.clone(),
                    init: None,
                },
            )?;
            if !r.converged {
                return Err(not_converged("bt", r.iterations));
            }
            let ranks = r.ratings.ranks(tie_tol);
            Ok(match cfg.format {
                Format::Json => render_json(&json!({
                    "command": "fit",
                    "method": "bt",
                    "items": r.ratings.items,
                    "ratings": r.ratings.values,
                    "ranks": ranks,
                    "normalization": r.ratings.normalization,
                    "diagnostics": {
                        "tol": cfg.tol,
                        "max_iter": cfg.max_iter,
                        "iterations": r.iterations,
                        "converged": r.converged,
                        "log_likelihood": r.log_likelihood,
                        "entropy": r.entropy,
                        "residuals": r.residuals,
                    },
                })),
                Format::Tsv => {
                    let mut out = header_lines(&[
                        ("method", "bt".into()),
                        ("normalization", r.ratings.normalization.to_string()),
                        ("tol", format!("{:e}", cfg.tol)),
                        ("max_iter", cfg.max_iter.to_string()),
                        ("iterations", r.iterations.to_string()),
                        ("converged", r.converged.to_string()),
                        ("log_likelihood", fmt6(r.log_likelihood)),
                        ("entropy", fmt6(r.entropy)),
                    ]);
                    out.push_str("item\trating\trank\tresidual\n");
                    for (k, item) in r.ratings.items.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{item}\t{}\t{}\t{}",
                            fmt6(r.ratings.values[k]),
                            ranks[k],
                            fmt6(r.residuals[k])
                        );
                    }
                    out
                }
            })
        }
        FitMethod::Rating(m) => {
            let opts = SpectralOptions {
                tol: cfg.tol,
                max_iter: cfg.max_iter,
                normalization: cfg.normalization.clone(),
                history: if m == Method::WeiKendall { 10 } else { 0 },
            };
            let f = match m {
                Method::PageRank => estimators::pagerank_undamped,
                Method::Scroogefactor => estimators::scroogefactor,
                Method::FairBets => estimators::fair_bets,
                Method::Cesaro => estimators::cesaro_rating,
                Method::WeiKendall => estimators::wei_kendall,
                Method::BradleyTerry => unreachable!("handled above"),
            };
            let r = f(c, &opts)?;
            if !r.converged {
                return Err(not_converged(m.name(), r.iterations));
            }
            let ranks = r.ratings.ranks(tie_tol);
            Ok(match cfg.format {
                Format::Json => {
                    let mut diagnostics = json!({
                        "tol": cfg.tol,
                        "max_iter": cfg.max_iter,
                        "iterations": r.iterations,
                        "converged": r.converged,
                        "dominant_eigenvalue": r.dominant_eigenvalue,
                        "residual": r.residual,
                    });
                    if let Some(h) = &r.iterate_history {
                        diagnostics["iterate_history"] = json!(h);
                    }
                    render_json(&json!({
                        "command": "fit",
                        "method": m.name(),
                        "items": r.ratings.items,
                        "ratings": r.ratings.values,
                        "ranks": ranks,
                        "normalization": r.ratings.normalization,
                        "diagnostics": diagnostics,
                    }))
                }
                Format::Tsv => {
                    let mut out = header_lines(&[
                        ("method", m.name().into()),
                        ("normalization", r.ratings.normalization.to_string()),
                        ("tol", format!("{:e}", cfg.tol)),
                        ("max_iter", cfg.max_iter.to_string()),
                        ("iterations", r.iterations.to_string()),
                        ("converged", r.converged.to_string()),
                        ("dominant_eigenvalue", fmt6(r.dominant_eigenvalue)),
                    ]);
                    out.push_str("item\trating\trank\n");
                    for (k, item) in r.ratings.items.iter().enumerate() {
                        let _ =
                            writeln!(out, "{item}\t{}\t{}", fmt6(r.ratings.values[k]), ranks[k]);
                    }
                    out
                }
            })
        }
        FitMethod::Rpi => {
            let values = rpi_classic(c, RpiWeights::default())?;
            let ranks = rank_labels(&values, tie_tol);
            Ok(match cfg.format {
                Format::Json => render_json(&json!({
                    "command": "fit",
                    "method": "rpi",
                    "items": c.items(),
                    "ratings": values,
                    "ranks": ranks,
                    "normalization": Normalization::Natural,
                    "diagnostics": { "weights": RpiWeights::default() },
                })),
                Format::Tsv => {
                    let mut out = header_lines(&[
                        ("method", "rpi".into()),
                        ("normalization", "natural".into()),
                    ]);
                    out.push_str("item\trating\trank\n");
                    for (k, item) in c.items().iter().enumerate() {
                        let _ = writeln!(out, "{item}\t{}\t{}", fmt6(values[k]), ranks[k]);
                    }
                    out
                }
            })
        }
    }
}

fn header_lines(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}

fn compare(cfg: &RunConfig, c: &ComparisonMatrix, methods: &[Method]) -> Result<String, RunError> {
    let cmp = compare_estimators(
        c,
        methods,
        &CompareOptions {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            normalization: cfg.normalization.clone(),
        },
    )?;
    if let Some(row) = cmp.rows.iter().find(|r| !r.converged) {
        return Err(not_converged(row.method.name(), row.iterations));
    }
    Ok(match cfg.format {
        Format::Json => render_json(&json!({
            "command": "compare",
            "items": cmp.items,
            "normalization": cmp.normalization,
            "methods": cmp.rows.iter().map(|r| json!({
                "method": r.method,
                "ratings": r.ratings.values,
                "ranks": r.ranks,
                "iterations": r.iterations,
                "converged": r.converged,
            })).collect::<Vec<_>>(),
            "diagnostics": { "tol": cfg.tol, "max_iter": cfg.max_iter },
        })),
        Format::Tsv => {
            let mut out = header_lines(&[("normalization", cmp.normalization.to_string())]);
            out.push_str("method");
            for item in &cmp.items {
                let _ = write!(out, "\t{item}");
            }
            out.push('\n');
            for row in &cmp.rows {
                out.push_str(row.method.name());
                for v in &row.ratings.values {
                    let _ = write!(out, "\t{}", fmt6(*v));
                }
                out.push('\n');
                let _ = write!(out, "{}.rank", row.method.name());
                for r in &row.ranks {
                    let _ = write!(out, "\t{r}");
                }
                out.push('\n');
            }
            out
        }
    })
}

fn check(cfg: &RunConfig, c: &ComparisonMatrix) -> Result<String, RunError> {
    let irreducible = c.is_irreducible();
    let (qs, residual, a) = if irreducible {
        match c.quasi_symmetry(cfg.tol.max(1e-9)) {
            Ok(q) => (Some(true), Some(q.max_residual), Some(q.a)),
            Err(Error::NotQuasiSymmetric { residual }) => (Some(false), Some(residual), None),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, None, None)
    };
    let wins = c.wins().values;
    let losses = c.losses();
    Ok(match cfg.format {
        Format::Json => render_json(&json!({
            "command": "check",
            "items": c.items(),
            "wins": wins,
            "losses": losses,
            "irreducible": irreducible,
            "quasi_symmetric": qs,
            "quasi_symmetry_residual": residual,
            "quasi_symmetry_a": a,
            "diagnostics": { "tol": cfg.tol.max(1e-9) },
        })),
        Format::Tsv => {
            let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".into());
            let mut out = header_lines(&[
                ("items", c.len().to_string()),
                ("comparisons", fmt6(c.total())),
                ("irreducible", irreducible.to_string()),
                ("quasi_symmetric", opt(qs.map(|b| b.to_string()))),
                (
                    "quasi_symmetry_residual",
                    opt(residual.map(|r| format!("{r:e}"))),
                ),
            ]);
            out.push_str("item\twins\tlosses\ta\n");
            for (k, item) in c.items().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{item}\t{}\t{}\t{}",
                    fmt6(wins[k]),
                    fmt6(losses[k]),
                    opt(a.as_ref().map(|a| fmt6(a[k])))
                );
            }
            out
        }
    })
}

fn need<T: Clone>(v: &Option<T>, flag: &str, scenario: &str) -> Result<T, RunError> {
    v.clone()
        .ok_or_else(|| input_error(format!("--scenario {scenario} requires {flag}")))
}

fn pair_of(v: Vec<f64>, flag: &str) -> Result<[f64; 2], RunError> {
    <[f64; 2]>::try_from(v).map_err(|_| input_error(format!("{flag} takes exactly two values")))
}

/// Turns command-line scenario flags into a [`Scenario`].
pub fn build_scenario(a: &ScenarioArgs) -> Result<Scenario, RunError> {
    let name = a.name.as_str();
    let scenario = match name {
        "poisson" => Scenario::Game(GameSpec::PoissonRace {
            rates: pair_of(need(&a.rates, "--rates", name)?, "--rates")?,
        }),
        "sudden-death" => Scenario::Game(GameSpec::SuddenDeath {
            p: pair_of(need(&a.p, "--p", name)?, "--p")?,
            r: a.r.unwrap_or(1),
        }),
        "accumulated" => Scenario::Game(GameSpec::AccumulatedWinRatio {
            strengths: pair_of(need(&a.strengths, "--strengths", name)?, "--strengths")?,
            n_matches: a.matches.unwrap_or(10),
        }),
        "two-state" => Scenario::Game(GameSpec::TwoStateChain {
            rates: pair_of(need(&a.rates, "--rates", name)?, "--rates")?,
            horizon: need(&a.horizon, "--horizon", name)?,
        }),
        "barker" => Scenario::Game(GameSpec::barker_uniform(
            need(&a.strengths, "--strengths", name)?,
            need(&a.games, "--games", name)?,
        )),
        "exponential" | "gumbel" | "weibull" | "frechet" => {
            let family = match name {
                "exponential" => Family::Exponential,
                "gumbel" => Family::Gumbel,
                "weibull" => Family::Weibull,
                _ => Family::Frechet,
            };
            let shape = if family == Family::Exponential {
                a.shape.unwrap_or(1.0)
            } else {
                need(&a.shape, "--shape", name)?
            };
            let (i, j) = a.pair.unwrap_or((0, 1));
            Scenario::Discriminal {
                spec: DiscriminalSpec::new(family, shape, need(&a.params, "--params", name)?)?,
                i,
                j,
            }
        }
        other => return Err(input_error(format!("unknown scenario {other:?}"))),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn simulate(cfg: &RunConfig, args: &ScenarioArgs) -> Result<String, RunError> {
    let scenario = build_scenario(args)?;
    let is_barker = matches!(scenario, Scenario::Game(GameSpec::Barker { .. }));
    let trials = cfg
        .trials
        .unwrap_or(if is_barker { 1 } else { DEFAULT_TRIALS });
    let res = simulators::simulate(&scenario, trials, cfg.seed)?;
    Ok(render_sim(cfg, &res, is_barker))
}

fn render_sim(cfg: &RunConfig, res: &SimResult, is_barker: bool) -> String {
    let z = res.z_scores();
    let deviation = res
        .empirical_frequencies
        .iter()
        .zip(&res.theoretical)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max);
    let labels: Vec<String> = if is_barker {
        (0..res.counts.len()).map(|k| format!("item{k}")).collect()
    } else {
        vec!["first".into(), "second".into()]
    };
    let within = (!is_barker).then(|| res.within_sigma(SIGMA_BAND));
    match cfg.format {
        Format::Json => {
            let mut v = json!({
                "command": "simulate",
                "scenario": res.scenario.name(),
                "spec": res.scenario,
                "seed": res.seed,
                "n_trials": res.n_trials,
                "shard_size": res.shard_size,
                "n_shards": res.n_shards,
                "outcomes": labels,
                "counts": res.counts,
                "theoretical": res.theoretical,
                "empirical": res.empirical_frequencies,
                "z_scores": z,
                "max_abs_deviation": deviation,
            });
            if let Some(w) = within {
                v["within_4sigma"] = json!(w);
            }
            if let Some(per) = &res.per_match_wins {
                v["per_match_wins"] = json!(per);
            }
            render_json(&v)
        }
        Format::Tsv => {
            let mut out = header_lines(&[
                ("scenario", res.scenario.name().into()),
                ("seed", res.seed.to_string()),
                ("n_trials", res.n_trials.to_string()),
                ("shard_size", res.shard_size.to_string()),
                ("n_shards", res.n_shards.to_string()),
            ]);
            out.push_str("outcome\ttheoretical\tempirical\tcount\tz\n");
            for k in 0..res.counts.len() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    labels[k],
                    fmt6(res.theoretical[k]),
                    fmt6(res.empirical_frequencies[k]),
                    res.counts[k],
                    fmt6(z[k])
                );
            }
            let _ = writeln!(out, "max_abs_deviation\t{}", fmt6(deviation));
            if let Some(w) = within {
                let _ = writeln!(out, "within_4sigma\t{w}");
            }
            out
        }
    }
}

fn race(cfg: &RunConfig, text: &str) -> Result<String, RunError> {
    let (labels, races) = io::parse_races(text)?;
    let n = labels.len();
    let vectors = races
        .iter()
        .map(|r| rank_to_sphere(r, n))
        .collect::<Result<Vec<_>, _>>()?;
    let rating = geometric_rating(&vectors)?;
    let ranks = rank_labels(&rating, 10.0 * cfg.tol);
    Ok(match cfg.format {
        Format::Json => render_json(&json!({
            "command": "race",
            "method": "geometric",
            "items": labels,
            "ratings": rating,
            "ranks": ranks,
            "normalization": "unit-sphere",
            "diagnostics": { "races": races.len() },
        })),
        Format::Tsv => {
            let mut out = header_lines(&[
                ("method", "geometric".into()),
                ("races", races.len().to_string()),
            ]);
            out.push_str("item\trating\trank\n");
            for (k, item) in labels.iter().enumerate() {
                let _ = writeln!(out, "{item}\t{}\t{}", fmt6(rating[k]), ranks[k]);
            }
            out
        }
    })
}

//! Command-line front end: `fit`, `simulate`, `benchmark` and `oracle`.
//!
//! Exit codes: 0 on success, 1 when some benchmark cells failed, 2 on usage
//! or input errors.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{io, Pdag};
use crate::metrics::{evaluate, EvalReport};
use crate::operators::PairSet;
use crate::scoring::{DataSet, Scorer};
use crate::search::{exhaustive_oracle, ges, xges, xges0, SearchOptions, SearchResult};
use crate::simulate::{sample_data, sample_ground_truth, SimConfig, TruthJson};

#[derive(Debug, Parser)]
#[command(name = "xges", version, about = "Greedy equivalence search for causal discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a CPDAG from a CSV data file.
    Fit(FitArgs),
    /// Simulate a random linear-Gaussian model and data from it.
    Simulate(SimulateArgs),
    /// Run simulate + fit + evaluate over a grid and write one CSV row per cell.
    Benchmark(BenchmarkArgs),
    /// Exhaustively score every DAG (at most 5 variables).
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ges,
    #[value(name = "ges-r")]
    #[serde(rename = "ges-r")]
    GesR,
    Ops,
    Xges0,
    Xges,
}

impl Method {
    pub fn run(self, scorer: &mut Scorer, options: SearchOptions) -> SearchResult {
        match self {
            Method::Ges => ges(scorer, false, false, options),
            Method::GesR => ges(scorer, true, false, options),
            Method::Ops => ges(scorer, false, true, options),
            Method::Xges0 => xges0(scorer, &Pdag::new(scorer.d()), &PairSet::new(), options),
            Method::Xges => xges(scorer, options),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Ges => "ges",
            Method::GesR => "ges-r",
            Method::Ops => "ops",
            Method::Xges0 => "xges0",
            Method::Xges => "xges",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Method as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "xges")]
    method: Method,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Graph output; `.json` selects JSON, anything else the text format.
    /// Printed to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write one JSON line per applied operator.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Ground truth written by `simulate`; adds metrics to the stats.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Re-enumerate all operators after every step.
    #[arg(long)]
    naive: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps_max: f64,
    #[arg(long)]
    negative_weights: bool,
    #[arg(long, default_value_t = 1.0)]
    weight_low: f64,
    #[arg(long, default_value_t = 3.0)]
    weight_high: f64,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Comma-separated node counts.
    #[arg(long, default_value = "10")]
    d: String,
    #[arg(long, default_value = "2")]
    rho: String,
    #[arg(long, default_value = "1000")]
    n: String,
    #[arg(long, default_value = "2")]
    alpha: String,
    /// Comma-separated seeds; `a..b` (half-open) and `a..=b` ranges allowed.
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long, default_value = "ges,xges0,xges")]
    methods: String,
    /// JSON file whose keys (d, rho, n, alpha, seeds, methods) override the flags.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let res = match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
        Command::Oracle(a) => cmd_oracle(&a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn write_graph(g: &Pdag, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p.extension().is_some_and(|e| e == "json") => fs::write(p, io::to_json(g) + "\n")?,
        Some(p) => fs::write(p, io::to_text(g))?,
        None => print!("{}", io::to_text(g)),
    }
    Ok(())
}

fn read_truth(path: &Path) -> Result<TruthJson> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Serialize)]
struct FitStats<'a> {
    method: &'static str,
    d: usize,
    n: usize,
    alpha: f64,
    score: f64,
    edges: usize,
    operators_applied: u64,
    score_calls: u64,
    #[serde(flatten)]
    search: &'a crate::search::SearchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    eval: Option<EvalReport>,
}

fn cmd_fit(a: &FitArgs) -> Result<i32> {
    let data = DataSet::read_csv(&a.input)?;
    let mut scorer = Scorer::new(&data, a.alpha)?;
    let truth = a.truth.as_deref().map(read_truth).transpose()?;
    let options = SearchOptions { trace: a.trace.is_some(), naive: a.naive, ..Default::default() };
    let result = a.method.run(&mut scorer, options);
    write_graph(&result.cpdag, a.output.as_deref())?;
    if let Some(path) = &a.trace {
        let mut f = fs::File::create(path)?;
        for step in &result.trace {
            writeln!(f, "{step}")?;
        }
    }
    let eval = match truth {
        Some(t) => {
            let dag = t.dag()?;
            if dag.d() != data.d() {
                return Err(Error::DimensionMismatch(dag.d(), data.d()));
            }
            Some(evaluate(&mut scorer, &result.cpdag, &dag)?)
        }
        None => None,
    };
    if let Some(path) = &a.stats {
        let stats = FitStats {
            method: a.method.name(),
            d: data.d(),
            n: data.n(),
            alpha: a.alpha,
            score: result.score,
            edges: result.cpdag.num_edges(),
            operators_applied: result.stats.operators_applied(),
            score_calls: result.stats.score_evaluations,
            search: &result.stats,
            eval,
        };
        fs::write(path, serde_json::to_string_pretty(&stats)? + "\n")?;
    }
    Ok(0)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    let cfg = SimConfig {
        d: a.d,
        rho: a.rho,
        weight_low: a.weight_low,
        weight_high: a.weight_high,
        allow_negative: a.negative_weights,
        eps_max: a.eps_max,
        seed: a.seed,
    };
    let gt = sample_ground_truth(&cfg)?;
    let data = sample_data(&gt, a.n, a.seed)?;
    let prefix = a.out_prefix.to_string_lossy();
    data.write_csv(format!("{prefix}.csv"))?;
    let truth = serde_json::to_string_pretty(&gt.to_json())?;
    fs::write(format!("{prefix}.truth.json"), truth + "\n")?;
    Ok(0)
}

fn cmd_oracle(a: &OracleArgs) -> Result<i32> {
    let data = DataSet::read_csv(&a.input)?;
    let mut scorer = Scorer::new(&data, a.alpha)?;
    let (g, score) = exhaustive_oracle(&mut scorer)?;
    write_graph(&g, a.output.as_deref())?;
    eprintln!("score = {score}");
    Ok(0)
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| Error::InvalidArgument(format!("bad {what} `{t}`: {e}"))))
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Error::InvalidArgument(format!("bad seed `{tok}`"));
        if let Some((lo, hi)) = tok.split_once("..=") {
            let (lo, hi): (u64, u64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            out.extend(lo..=hi);
        } else if let Some((lo, hi)) = tok.split_once("..") {
            let (lo, hi): (u64, u64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            out.extend(lo..hi);
        } else {
            out.push(tok.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    d: Option<Vec<usize>>,
    rho: Option<Vec<f64>>,
    n: Option<Vec<usize>>,
    alpha: Option<Vec<f64>>,
    seeds: Option<Vec<u64>>,
    methods: Option<Vec<Method>>,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub method: Method,
    pub d: usize,
    pub rho: f64,
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct BenchmarkRow {
    pub method: &'static str,
    pub d: usize,
    pub rho: f64,
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub shd: Option<usize>,
    pub f1: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub delta_s: Option<f64>,
    pub zeta: Option<f64>,
    pub score_calls: Option<u64>,
    pub runtime_ms: Option<f64>,
}

/// Simulates, fits and evaluates one benchmark cell.
pub fn run_cell(c: &Cell) -> Result<(EvalReport, SearchResult)> {
    let gt = sample_ground_truth(&SimConfig::new(c.d, c.rho, c.seed))?;
    let data = sample_data(&gt, c.n, c.seed)?;
    let mut scorer = Scorer::new(&data, c.alpha)?;
    let result = c.method.run(&mut scorer, SearchOptions::default());
    let report = evaluate(&mut scorer, &result.cpdag, &gt.dag)?;
    Ok((report, result))
}

fn cmd_benchmark(a: &BenchmarkArgs) -> Result<i32> {
    let mut grid = GridFile {
        d: Some(parse_list(&a.d, "d")?),
        rho: Some(parse_list(&a.rho, "rho")?),
        n: Some(parse_list(&a.n, "n")?),
        alpha: Some(parse_list(&a.alpha, "alpha")?),
        seeds: Some(parse_seeds(&a.seeds)?),
        methods: Some(parse_list(&a.methods, "method")?),
    };
    if let Some(path) = &a.grid {
        let file: GridFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        macro_rules! take {
            ($($f:ident),*) => { $(if file.$f.is_some() { grid.$f = file.$f; })* };
        }
        take!(d, rho, n, alpha, seeds, methods);
    }
    let mut cells = Vec::new();
    for &d in grid.d.as_deref().unwrap_or_default() {
        for &rho in grid.rho.as_deref().unwrap_or_default() {
            for &n in grid.n.as_deref().unwrap_or_default() {
                for &alpha in grid.alpha.as_deref().unwrap_or_default() {
                    for &seed in grid.seeds.as_deref().unwrap_or_default() {
                        for &method in grid.methods.as_deref().unwrap_or_default() {
                            cells.push(Cell { method, d, rho, n, alpha, seed });
                        }
                    }
                }
            }
        }
    }

    let threads = std::env::var("XGES_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let rows: Vec<(BenchmarkRow, bool)> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                let mut row = BenchmarkRow {
                    method: c.method.name(),
                    d: c.d,
                    rho: c.rho,
                    n: c.n,
                    alpha: c.alpha,
                    seed: c.seed,
                    shd: None,
                    f1: None,
                    precision: None,
                    recall: None,
                    delta_s: None,
                    zeta: None,
                    score_calls: None,
                    runtime_ms: None,
                };
                match run_cell(c) {
                    Ok((rep, res)) => {
                        row.shd = Some(rep.shd);
                        row.f1 = Some(rep.f1);
                        row.precision = Some(rep.precision);
                        row.recall = Some(rep.recall);
                        row.delta_s = Some(rep.delta_s);
                        row.zeta = rep.zeta;
                        row.score_calls = Some(res.stats.score_evaluations);
                        row.runtime_ms = Some(res.stats.runtime_ms);
                        (row, true)
                    }
                    Err(e) => {
                        eprintln!("cell {c:?} failed: {e}");
                        (row, false)
                    }
                }
            })
            .collect()
    });

    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&a.output)?;
    w.write_record([
        "method", "d", "rho", "n", "alpha", "seed", "shd", "f1", "precision", "recall", "delta_s",
        "zeta", "score_calls", "runtime_ms",
    ])?;
    let mut failed = false;
    for (row, ok) in &rows {
        w.serialize(row)?;
        failed |= !ok;
    }
    w.flush()?;
    Ok(if failed { 1 } else { 0 })
}

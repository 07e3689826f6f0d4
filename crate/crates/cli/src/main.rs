//! `spatial-dom` command-line tool.
//!
//! Exit codes: 0 success or dominated, 1 not dominated, 2 input error,
//! 3 oracle mismatch.

mod bench;

use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spatial_dom::{
    build_str, corner_oracle_margin_with_cap, domination_margin, generate, minmax_dominates, naive_knn_candidates,
    naive_rknn_candidates, read_jsonl, rect_max_dist, rect_min_dist, write_jsonl, Criterion, Distribution,
    DominationVerdict, GeneratorConfig, Interval, LpNorm, QueryStats, Rect, DEFAULT_CORNER_CAP, DEFAULT_FANOUT,
};

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn mismatch(message: impl Display) -> Self {
        Failure {
            code: EXIT_MISMATCH,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(format!("i/o error: {e}"))
    }
}

pub type CmdResult = Result<ExitCode, Failure>;

#[derive(Parser)]
#[command(
    name = "spatial-dom",
    version,
    about = "Spatial domination checks, candidate queries and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether A dominates B with respect to R.
    Check(CheckArgs),
    /// Write a seeded synthetic dataset as JSON Lines.
    Generate(GenerateArgs),
    /// kNN candidates that survive domination pruning.
    Knn(QueryArgs),
    /// Reverse-kNN candidates that survive domination pruning.
    Rknn(QueryArgs),
    /// Candidate counts and timings of both criteria over a parameter grid.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Parses a rectangle literal `[[lo,hi],...]`.
pub fn parse_rect(s: &str) -> Result<Rect, String> {
    let bounds: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|e| format!("malformed rectangle literal: {e}"))?;
    let dims = bounds
        .iter()
        .enumerate()
        .map(|(i, &[lo, hi])| Interval::new(lo, hi).map_err(|e| format!("dimension {i}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Rect::new(dims).map_err(|e| e.to_string())
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse()
}

pub fn norm(p: f64) -> Result<LpNorm, Failure> {
    LpNorm::new(p).map_err(Failure::input)
}

#[derive(Args)]
struct CheckArgs {
    /// Candidate dominator, e.g. `[[0,0],[2,2]]`.
    #[arg(long, value_parser = parse_rect)]
    a: Rect,
    /// Candidate dominee.
    #[arg(long, value_parser = parse_rect)]
    b: Rect,
    /// Reference region.
    #[arg(long, value_parser = parse_rect)]
    r: Rect,
    /// Norm order.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also run the exhaustive corner oracle (skipped above the corner cap).
    #[arg(long)]
    oracle: bool,
    /// Largest dimensionality the corner oracle will enumerate.
    #[arg(long, env = "SPATIAL_DOM_CORNER_CAP", default_value_t = DEFAULT_CORNER_CAP)]
    corner_cap: usize,
}

#[derive(Serialize)]
struct MinMaxReport {
    dominated: bool,
    max_dist_a: f64,
    min_dist_b: f64,
}

#[derive(Serialize)]
struct OracleReport {
    dominated: bool,
    margin: f64,
}

#[derive(Serialize)]
struct CheckReport {
    dims: usize,
    p: f64,
    eq2: DominationVerdict,
    minmax: MinMaxReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    corner_oracle: Option<OracleReport>,
}

fn cmd_check(args: CheckArgs) -> CmdResult {
    let norm = norm(args.p)?;
    let (a, b, r) = (&args.a, &args.b, &args.r);
    let eq2 = domination_margin(a, b, r, norm).map_err(Failure::input)?;
    let minmax = MinMaxReport {
        dominated: minmax_dominates(a, b, r, norm).map_err(Failure::input)?,
        max_dist_a: rect_max_dist(a, r, norm).map_err(Failure::input)?,
        min_dist_b: rect_min_dist(b, r, norm).map_err(Failure::input)?,
    };
    let dims = r.dims();
    let corner_oracle = if args.oracle && dims <= args.corner_cap {
        let margin = corner_oracle_margin_with_cap(a, b, r, norm, args.corner_cap).map_err(Failure::input)?;
        Some(OracleReport {
            dominated: margin < 0.0,
            margin,
        })
    } else {
        if args.oracle {
            eprintln!(
                "corner oracle skipped: {dims} dimensions exceed the cap of {}",
                args.corner_cap
            );
        }
        None
    };
    let report = CheckReport {
        dims,
        p: norm.p(),
        eq2,
        minmax,
        corner_oracle,
    };

    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?,
        Format::Text => {
            let word = |d: bool| if d { "dominated" } else { "not dominated" };
            writeln!(
                out,
                "eq2: {} (margin {}, terms {:?})",
                word(report.eq2.dominated),
                report.eq2.margin,
                report.eq2.per_dim_terms
            )?;
            writeln!(
                out,
                "minmax: {} (MaxDist(A,R) {}, MinDist(B,R) {})",
                word(report.minmax.dominated),
                report.minmax.max_dist_a,
                report.minmax.min_dist_b
            )?;
            if let Some(o) = &report.corner_oracle {
                writeln!(out, "corner oracle: {} (margin {})", word(o.dominated), o.margin)?;
            }
        }
    }

    if let Some(o) = &report.corner_oracle {
        if o.dominated != report.eq2.dominated {
            return Err(Failure::mismatch(format!(
                "corner oracle disagrees: oracle {} vs eq2 {}",
                o.dominated, report.eq2.dominated
            )));
        }
    }
    Ok(if report.eq2.dominated {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    })
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Uniform,
    Clustered,
}

impl From<DistributionArg> for Distribution {
    fn from(d: DistributionArg) -> Self {
        match d {
            DistributionArg::Uniform => Distribution::Uniform,
            DistributionArg::Clustered => Distribution::Clustered,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    extent_lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    extent_hi: f64,
    /// Largest side length; 0 yields a point dataset.
    #[arg(long, default_value_t = 0.05)]
    max_side: f64,
    #[arg(long, value_enum, default_value_t = DistributionArg::Uniform)]
    distribution: DistributionArg,
    #[arg(long, default_value_t = 8)]
    clusters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    let config = GeneratorConfig {
        n: args.n,
        d: args.d,
        extent_lo: args.extent_lo,
        extent_hi: args.extent_hi,
        max_side: args.max_side,
        distribution: args.distribution.into(),
        clusters: args.clusters,
        seed: args.seed,
    };
    let entries = generate(&config).map_err(Failure::input)?;
    let summary = format!("n={} d={}", entries.len(), config.d);
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::input(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_jsonl(&mut w, &entries)?;
            w.flush()?;
            println!("{summary}");
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_jsonl(&mut w, &entries)?;
            w.flush()?;
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct QueryArgs {
    /// JSON Lines dataset; `-` reads standard input.
    #[arg(long)]
    data: PathBuf,
    /// Query rectangle literal.
    #[arg(long, value_parser = parse_rect)]
    query: Rect,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_parser = parse_criterion, default_value = "eq2")]
    criterion: Criterion,
    #[arg(long, default_value_t = DEFAULT_FANOUT)]
    fanout: usize,
    /// Compare against the naive all-pairs filter; exit 3 on mismatch.
    #[arg(long)]
    naive_check: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum QueryKind {
    Knn,
    Rknn,
}

#[derive(Serialize)]
struct QueryReport {
    query: &'static str,
    k: usize,
    p: f64,
    criterion: Criterion,
    candidates: Vec<u64>,
    stats: QueryStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    naive_check: Option<bool>,
}

fn open_input(path: &PathBuf) -> Result<Box<dyn BufRead>, Failure> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(file)))
}

fn cmd_query(kind: QueryKind, args: QueryArgs) -> CmdResult {
    let norm = norm(args.p)?;
    let entries = read_jsonl(open_input(&args.data)?).map_err(Failure::input)?;
    let tree = build_str(entries.clone(), args.fanout).map_err(Failure::input)?;
    let (found, stats) = match kind {
        QueryKind::Knn => tree.knn_candidates(&args.query, args.k, args.criterion, norm),
        QueryKind::Rknn => tree.rknn_candidates(&args.query, args.k, args.criterion, norm),
    }
    .map_err(Failure::input)?;

    let naive_check = if args.naive_check {
        let naive = match kind {
            QueryKind::Knn => naive_knn_candidates(&entries, &args.query, args.k, args.criterion, norm),
            QueryKind::Rknn => naive_rknn_candidates(&entries, &args.query, args.k, args.criterion, norm),
        }
        .map_err(Failure::input)?;
        Some(naive == found)
    } else {
        None
    };

    let report = QueryReport {
        query: if kind == QueryKind::Knn { "knn" } else { "rknn" },
        k: args.k,
        p: norm.p(),
        criterion: args.criterion,
        candidates: found.into_iter().collect(),
        stats,
        naive_check,
    };
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    if naive_check == Some(false) {
        return Err(Failure::mismatch("index candidates differ from the naive filter"));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Knn(args) => cmd_query(QueryKind::Knn, args),
        Command::Rknn(args) => cmd_query(QueryKind::Rknn, args),
        Command::Bench(args) => bench::cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

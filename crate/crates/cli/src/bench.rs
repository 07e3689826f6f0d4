//! Pruning-power benchmark: candidate counts and query latency of both
//! criteria over a grid of dimensionalities, norms and `k`.

use std::fs::File;
use std::hint::black_box;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use spatial_dom::{
    build_str, corner_oracle_dominates_with_cap, dominates, generate, Criterion, GeneratorConfig, Interval, LpNorm,
    Rect, SeededRng, DEFAULT_CORNER_CAP, DEFAULT_FANOUT,
};

use crate::{norm, CmdResult, Failure};

#[derive(Args)]
pub struct BenchArgs {
    /// Dataset size.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
    d_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    p_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
    k_list: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Timings are medians over this many runs.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0.05)]
    max_side: f64,
    #[arg(long, default_value_t = DEFAULT_FANOUT)]
    fanout: usize,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also time single domination calls (eq2 and corner oracle) per d and p into this CSV.
    #[arg(long)]
    oracle_bench: Option<PathBuf>,
    #[arg(long, env = "SPATIAL_DOM_CORNER_CAP", default_value_t = DEFAULT_CORNER_CAP)]
    corner_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub d: usize,
    pub p: f64,
    pub k: usize,
    pub criterion: Criterion,
    pub candidates: usize,
    pub domination_tests: u64,
    pub elapsed_ns: u64,
}

#[derive(Debug, Serialize)]
pub struct ScalingRow {
    pub d: usize,
    pub p: f64,
    pub method: &'static str,
    pub median_ns: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn validate(args: &BenchArgs) -> Result<Vec<LpNorm>, Failure> {
    if args.n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    if args.repeats == 0 {
        return Err(Failure::input("--repeats must be at least 1"));
    }
    if args.d_list.is_empty() || args.d_list.contains(&0) {
        return Err(Failure::input("--d-list entries must be at least 1"));
    }
    if args.k_list.is_empty() || args.k_list.contains(&0) {
        return Err(Failure::input("--k-list entries must be at least 1"));
    }
    if args.p_list.is_empty() {
        return Err(Failure::input("--p-list must not be empty"));
    }
    args.p_list.iter().map(|&p| norm(p)).collect()
}

fn writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).map_err(|e| Failure::input(format!("cannot create {}: {e}", p.display())))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// Dataset with `seed`, query drawn by the same generator with `seed + 1`.
fn workload(args: &BenchArgs, d: usize) -> Result<(Vec<spatial_dom::Entry>, Rect), Failure> {
    let config = GeneratorConfig {
        n: args.n,
        d,
        max_side: args.max_side,
        seed: args.seed,
        ..GeneratorConfig::default()
    };
    let entries = generate(&config).map_err(Failure::input)?;
    let query = generate(&GeneratorConfig {
        n: 1,
        seed: args.seed.wrapping_add(1),
        ..config
    })
    .map_err(Failure::input)?
    .remove(0)
    .mbr;
    Ok((entries, query))
}

pub fn bench_rows(args: &BenchArgs, norms: &[LpNorm]) -> Result<Vec<BenchRow>, Failure> {
    let mut rows = Vec::new();
    for &d in &args.d_list {
        let (entries, query) = workload(args, d)?;
        let tree = build_str(entries, args.fanout).map_err(Failure::input)?;
        for &norm in norms {
            for &k in &args.k_list {
                for criterion in Criterion::ALL {
                    let mut times = Vec::with_capacity(args.repeats);
                    let mut outcome = None;
                    for _ in 0..args.repeats {
                        let t = Instant::now();
                        let result = tree
                            .knn_candidates(&query, k, criterion, norm)
                            .map_err(Failure::input)?;
                        times.push(t.elapsed().as_nanos() as f64);
                        outcome = Some(result);
                    }
                    let (found, stats) = outcome.expect("repeats >= 1");
                    rows.push(BenchRow {
                        d,
                        p: norm.p(),
                        k,
                        criterion,
                        candidates: found.len(),
                        domination_tests: stats.domination_tests,
                        elapsed_ns: median(times) as u64,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn random_rect(rng: &mut SeededRng, d: usize) -> Rect {
    let dims = (0..d)
        .map(|_| {
            let lo = rng.uniform(0.0, 1.0);
            Interval::new(lo, lo + rng.uniform(0.0, 0.1)).expect("finite ordered bounds")
        })
        .collect();
    Rect::new(dims).expect("at least one dimension")
}

/// Median per-call nanoseconds over `samples` batches of `batch` calls.
fn time_call(samples: usize, batch: usize, mut f: impl FnMut() -> bool) -> f64 {
    let per_call = (0..samples)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..batch {
                black_box(f());
            }
            t.elapsed().as_nanos() as f64 / batch as f64
        })
        .collect();
    median(per_call)
}

pub fn scaling_rows(args: &BenchArgs, norms: &[LpNorm]) -> Vec<ScalingRow> {
    const BUDGET: usize = 1 << 16;
    let samples = args.repeats.max(5);
    let mut rows = Vec::new();
    for &d in &args.d_list {
        let mut rng = SeededRng::new(args.seed ^ d as u64);
        let (a, b, r) = (
            random_rect(&mut rng, d),
            random_rect(&mut rng, d),
            random_rect(&mut rng, d),
        );
        for &norm in norms {
            let median_ns = time_call(samples, (BUDGET / d).max(1), || {
                dominates(black_box(&a), black_box(&b), black_box(&r), norm).expect("matching dimensions")
            });
            rows.push(ScalingRow {
                d,
                p: norm.p(),
                method: "eq2",
                median_ns,
            });
            if d <= args.corner_cap && d < 64 {
                let steps = d << d;
                let median_ns = time_call(samples, (BUDGET / steps).max(1), || {
                    corner_oracle_dominates_with_cap(black_box(&a), black_box(&b), black_box(&r), norm, args.corner_cap)
                        .expect("within cap")
                });
                rows.push(ScalingRow {
                    d,
                    p: norm.p(),
                    method: "corner",
                    median_ns,
                });
            }
        }
    }
    rows
}

fn write_csv<T: Serialize>(out: Box<dyn Write>, rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Failure::input(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_bench(args: BenchArgs) -> CmdResult {
    let norms = validate(&args)?;
    let out = writer(&args.out)?;
    let rows = bench_rows(&args, &norms)?;
    write_csv(out, &rows)?;
    if let Some(path) = &args.oracle_bench {
        let out = writer(&Some(path.clone()))?;
        write_csv(out, &scaling_rows(&args, &norms))?;
    }
    Ok(ExitCode::SUCCESS)
}

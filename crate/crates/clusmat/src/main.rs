//! Command-line front end: instance generation, format conversion, exact
//! and approximate products, entry-query preprocessing, and benchmarks.
//!
//! Data goes to stdout or to `-o` files; diagnostics and statistics go to
//! stderr. Exit codes: 0 on success, 2 on shape mismatch, 3 on parse
//! errors, 1 otherwise.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use clusmat::error::{AppError, Result};
use clusmat::formats::{parse_tree, read_matrix, write_csv, write_matrix};
use clusmat::parallel::{exact_clustered_threaded, naive_multiply_threaded, resolve_threads};
use clusmat::planted::{generate, Orientation, PlantedSpec};
use clusmat::state::{file_digest, load_state, save_state};
use clusmat::bench;

use clusmat_core::{
    gonzalez, mmclus_approx, mmclus_preproc, mmclus_preproc_randomized,
    mmclus_query_with_cost, mmclus_r_approx, naive_multiply, transpose, ApproxResult, BitMatrix,
    ClusteredSide, IntMatrix, TreeSide,
};

#[derive(Parser)]
#[command(
    name = "clusmat",
    version,
    about = "Exact and approximate products of 0-1 matrices via Hamming-space clustering"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a matrix with planted clustered structure
    Gen(GenArgs),
    /// Exact product (naive, spanning-tree, or query-based)
    Multiply(MultiplyArgs),
    /// Approximate product with a certified additive error bound
    Approx(ApproxArgs),
    /// Build and store entry-query preprocessing state
    Preproc(PreprocArgs),
    /// Answer exact entry queries from stored state
    Query(QueryArgs),
    /// Run a benchmark suite from a TOML config, emitting CSV
    Bench(BenchArgs),
    /// Convert between .bm (text) and .bmb (binary) matrix files
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Row,
    Col,
}

#[derive(Args)]
struct GenArgs {
    /// Output file (.bm or .bmb); a sidecar .meta file records the spec
    out: PathBuf,
    #[arg(long)]
    points: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    clusters: usize,
    /// Maximum bits flipped per point away from its planted center
    #[arg(long)]
    flips: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long)]
    seed: u64,
    /// Whether the planted points are the rows or the columns
    #[arg(long, value_enum, default_value = "row")]
    orientation: OrientationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Naive,
    St,
    Query,
}

#[derive(Args)]
struct MultiplyArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Row-clustering size (required for st and query)
    #[arg(long)]
    ell: Option<usize>,
    /// Column-clustering size for st (defaults to --ell)
    #[arg(long)]
    k: Option<usize>,
    /// Spanning tree over the rows of A, one parent index per line
    #[arg(long, hide = true)]
    tree: Option<PathBuf>,
    /// Write the product CSV here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Compute and report stats but skip emitting the product
    #[arg(long)]
    no_product: bool,
    /// Worker threads (default: cores; env CLUSMAT_THREADS overrides)
    #[arg(long)]
    threads: Option<usize>,
    /// First clustering center: an index, or "random" (uses --seed)
    #[arg(long, default_value = "0")]
    first_center: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ApproxArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Use the randomized two-sided variant
    #[arg(long, requires = "k", requires = "seed")]
    randomized: bool,
    /// Column-clustering size (randomized variant)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Also compute the exact product and report the observed max error
    #[arg(long)]
    verify: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// First clustering center: an index, or "random" (uses --seed)
    #[arg(long, default_value = "0")]
    first_center: String,
}

#[derive(Args)]
struct PreprocArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Output state file (.pps)
    #[arg(short, long)]
    output: PathBuf,
    /// Use the randomized two-sided variant
    #[arg(long, requires = "k", requires = "seed")]
    randomized: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct QueryArgs {
    /// State file written by `preproc`
    #[arg(long)]
    state: PathBuf,
    #[arg(short)]
    i: Option<usize>,
    #[arg(short)]
    j: Option<usize>,
    /// File of "i j" pairs, one per line
    #[arg(long, conflicts_with_all = ["i", "j"])]
    pairs: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML benchmark suite config
    #[arg(long)]
    config: PathBuf,
    /// Write the CSV report here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Multiply(args) => cmd_multiply(args),
        Cmd::Approx(args) => cmd_approx(args),
        Cmd::Preproc(args) => cmd_preproc(args),
        Cmd::Query(args) => cmd_query(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Convert(args) => cmd_convert(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = PlantedSpec {
        points: args.points,
        dim: args.dim,
        num_clusters: args.clusters,
        max_flips: args.flips,
        density: args.density,
        seed: args.seed,
        orientation: match args.orientation {
            OrientationArg::Row => Orientation::Rows,
            OrientationArg::Col => Orientation::Cols,
        },
    };
    let m = generate(&spec)?;
    write_matrix(&args.out, &m)?;
    let meta_path = args.out.with_extension(format!(
        "{}.meta",
        args.out
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("bm")
    ));
    fs::write(&meta_path, spec.meta_line())?;
    eprintln!(
        "wrote {} ({}x{}) and {}",
        args.out.display(),
        m.rows(),
        m.cols(),
        meta_path.display()
    );
    Ok(())
}

/// Resolves `--first-center`: a plain index, or "random" drawn from the
/// seeded generator over `[0, n)`.
fn resolve_first_center(arg: &str, n: usize, seed: u64) -> Result<usize> {
    if arg == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a09_e667_f3bc_c908);
        return Ok((rng.next_u64() % n.max(1) as u64) as usize);
    }
    let idx: usize = arg
        .parse()
        .map_err(|_| AppError::Usage(format!("--first-center must be an index or \"random\", got {arg:?}")))?;
    if idx >= n {
        return Err(AppError::Usage(format!(
            "--first-center {idx} out of range (< {n})"
        )));
    }
    Ok(idx)
}

fn emit_product(output: Option<&Path>, no_product: bool, c: &IntMatrix) -> Result<()> {
    if no_product {
        return Ok(());
    }
    match output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(fs::File::create(path)?);
            write_csv(&mut f, c)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = std::io::BufWriter::new(stdout.lock());
            write_csv(&mut lock, c)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn cmd_multiply(args: MultiplyArgs) -> Result<()> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    let threads = resolve_threads(args.threads);

    match args.algo {
        Algo::Naive => {
            let start = Instant::now();
            let c = naive_multiply_threaded(&a, &b, threads)?;
            eprintln!(
                "stats: algo=naive time_ms={:.3} threads={threads}",
                start.elapsed().as_secs_f64() * 1e3
            );
            emit_product(args.output.as_deref(), args.no_product, &c)
        }
        Algo::St => {
            let ell = args
                .ell
                .ok_or_else(|| AppError::Usage("--algo st requires --ell".into()))?;
            let k = args.k.unwrap_or(ell);
            let first = resolve_first_center(&args.first_center, a.rows().min(b.cols()), args.seed)?;
            let tree = match &args.tree {
                Some(path) => {
                    let points = a.row_views();
                    Some(parse_tree(&fs::read_to_string(path)?, &points)?)
                }
                None => None,
            };
            let start = Instant::now();
            let res = exact_clustered_threaded(&a, &b, ell, k, threads, first, tree.as_ref())?;
            eprintln!(
                "stats: algo=st time_ms={:.3} threads={threads} side={} radius_a={} radius_b={} \
                 ham_cost_a={} ham_cost_b={} delta_updates_per_column={}",
                start.elapsed().as_secs_f64() * 1e3,
                match res.side {
                    TreeSide::RowsOfA => "rows",
                    TreeSide::ColsOfB => "cols",
                },
                res.radius_a,
                res.radius_b,
                res.ham_cost_a,
                res.ham_cost_b,
                res.delta_updates_per_column
            );
            emit_product(args.output.as_deref(), args.no_product, &res.c)
        }
        Algo::Query => {
            let ell = args
                .ell
                .ok_or_else(|| AppError::Usage("--algo query requires --ell".into()))?;
            let start = Instant::now();
            let state = mmclus_preproc(&a, &b, ell)?;
            let mut c = IntMatrix::zeros(a.rows(), b.cols());
            let mut total_iters = 0usize;
            for i in 0..a.rows() {
                for j in 0..b.cols() {
                    let (v, iters) = mmclus_query_with_cost(&state, i, j)?;
                    c.set(i, j, v);
                    total_iters += iters;
                }
            }
            eprintln!(
                "stats: algo=query time_ms={:.3} radius={} total_query_iterations={total_iters}",
                start.elapsed().as_secs_f64() * 1e3,
                state.radius_a
            );
            emit_product(args.output.as_deref(), args.no_product, &c)
        }
    }
}

/// Deterministic one-sided approximation with a configurable first center,
/// matching the library's automatic orientation dispatch.
fn approx_with_first(a: &BitMatrix, b: &BitMatrix, ell: usize, first: usize) -> Result<ApproxResult> {
    if a.rows() >= b.cols() {
        approx_rows_with_first(a, b, ell, first)
    } else {
        let bt = transpose(b);
        let at = transpose(a);
        let res = approx_rows_with_first(&bt, &at, ell, first)?;
        Ok(ApproxResult {
            d: res.d.transposed(),
            side: ClusteredSide::ColsOfB,
            row_clustering: None,
            col_clustering: res.row_clustering,
            error_certificate: res.error_certificate,
            epsilon: None,
        })
    }
}

fn approx_rows_with_first(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    first: usize,
) -> Result<ApproxResult> {
    let points = a.row_views();
    let clustering = gonzalez(&points, ell, first.min(a.rows().saturating_sub(1)))?;
    let centers = a.select_rows(&clustering.center_indices)?;
    let small = naive_multiply(&centers, b)?;
    let mut d = IntMatrix::zeros(a.rows(), b.cols());
    for (i, &c) in clustering.assignment.iter().enumerate() {
        d.row_mut(i).copy_from_slice(small.row(c));
    }
    Ok(ApproxResult {
        d,
        side: ClusteredSide::RowsOfA,
        error_certificate: clustering.achieved_radius,
        row_clustering: Some(clustering),
        col_clustering: None,
        epsilon: None,
    })
}

fn cmd_approx(args: ApproxArgs) -> Result<()> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    let start = Instant::now();
    let res = if args.randomized {
        let k = args.k.expect("clap enforces --k");
        let seed = args.seed.expect("clap enforces --seed");
        mmclus_r_approx(&a, &b, args.ell, k, args.epsilon, seed)?
    } else if args.first_center == "0" {
        mmclus_approx(&a, &b, args.ell)?
    } else {
        let first = resolve_first_center(
            &args.first_center,
            a.rows().min(b.cols()),
            args.seed.unwrap_or(0),
        )?;
        approx_with_first(&a, &b, args.ell, first)?
    };
    eprintln!(
        "stats: algo={} time_ms={:.3}",
        if args.randomized { "rapprox" } else { "approx" },
        start.elapsed().as_secs_f64() * 1e3
    );
    eprintln!("certificate={}", res.error_certificate);
    if args.verify {
        let exact = naive_multiply(&a, &b)?;
        let mut worst = 0u32;
        for i in 0..exact.rows() {
            for (x, y) in exact.row(i).iter().zip(res.d.row(i)) {
                worst = worst.max(x.abs_diff(*y));
            }
        }
        eprintln!("observed_max_err={worst}");
        if worst > res.error_certificate {
            return Err(AppError::Usage(
                "internal invariant violated: observed error exceeds certificate".into(),
            ));
        }
    }
    emit_product(args.output.as_deref(), false, &res.d)
}

fn cmd_preproc(args: PreprocArgs) -> Result<()> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    let start = Instant::now();
    let state = if args.randomized {
        let k = args.k.expect("clap enforces --k");
        let seed = args.seed.expect("clap enforces --seed");
        mmclus_preproc_randomized(&a, &b, args.ell, k, args.epsilon, seed)?
    } else {
        mmclus_preproc(&a, &b, args.ell)?
    };
    let a_digest = file_digest(&args.a)?;
    let b_digest = file_digest(&args.b)?;
    save_state(&args.output, &state, &a_digest, &b_digest)?;
    eprintln!(
        "stats: algo=preproc time_ms={:.3} certificate={} swapped={} state={}",
        start.elapsed().as_secs_f64() * 1e3,
        state.certificate(),
        state.swapped,
        args.output.display()
    );
    Ok(())
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let i = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| AppError::Parse(format!("bad pair line {l:?}")))?;
            let j = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| AppError::Parse(format!("bad pair line {l:?}")))?;
            if it.next().is_some() {
                return Err(AppError::Parse(format!("bad pair line {l:?}")));
            }
            Ok((i, j))
        })
        .collect()
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let state = load_state(&args.state)?;
    let pairs = match (&args.pairs, args.i, args.j) {
        (Some(path), _, _) => parse_pairs(&fs::read_to_string(path)?)?,
        (None, Some(i), Some(j)) => vec![(i, j)],
        _ => {
            return Err(AppError::Usage(
                "query needs either -i and -j, or --pairs".into(),
            ))
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut total_iters = 0usize;
    for &(i, j) in &pairs {
        let (v, iters) = mmclus_query_with_cost(&state, i, j)?;
        total_iters += iters;
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    eprintln!(
        "stats: queries={} total_iterations={total_iters} certificate={}",
        pairs.len(),
        state.certificate()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = bench::parse_config(&fs::read_to_string(&args.config)?)?;
    match &args.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(fs::File::create(path)?);
            bench::run(&cfg, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = std::io::BufWriter::new(stdout.lock());
            bench::run(&cfg, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let m = read_matrix(&args.input)?;
    write_matrix(&args.output, &m)?;
    eprintln!(
        "converted {} -> {} ({}x{})",
        args.input.display(),
        args.output.display(),
        m.rows(),
        m.cols()
    );
    Ok(())
}

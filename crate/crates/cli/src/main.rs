//! Command-line front end: graph generation, single algorithm runs,
//! exact-oracle queries, and multi-seed benchmark suites.
//!
//! Machine-readable output is one JSON object per line on stdout; human
//! summaries go to stderr. For a fixed command line and input file the
//! stdout bytes are identical across runs — wall times appear only in CSV
//! exports. Exit codes: 0 = produced an answer (including "infeasible"),
//! 1 = usage error, 2 = input error, 3 = operational failure (a failed
//! run or a bench suite missing its threshold).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use bihole_lab::bihole::{find_bihole, BiholeParams};
use bihole_lab::coloring::{color_balanced, ColoringOutcome, ColoringParams};
use bihole_lab::graph::{parse_edge_list, serialize_edge_list, BipartiteGraph};
use bihole_lab::harness::{
    self, bihole_suite, color_suite, coupon_suite, coupon_trial, strip_wall_times,
    BiholeSuiteConfig, ColorSuiteConfig, CouponSuiteConfig, SuiteRun,
};
use bihole_lab::matching::has_balanced_coloring;
use bihole_lab::oracle::{chi_b_exact, max_bihole_exact, max_matching_exact};
use bihole_lab::report::BenchSummary;
use bihole_lab::rng::Seed;
use bihole_lab::{gen, Error};

#[derive(Parser)]
#[command(
    name = "bihole-lab",
    version,
    about = "Bi-hole search, balanced coloring, exact oracles, and seeded benches \
             for bipartite graphs",
    after_help = "Output: one JSON object per line on stdout; summaries on stderr.\n\
                  Exit codes: 0 answer, 1 usage, 2 input error, 3 operational failure.\n\
                  BIHOLE_LAB_THREADS caps trial concurrency for bench suites."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random bipartite graph and write it as an edge list.
    Gen(GenArgs),
    /// Find a large bi-hole in an edge-list graph.
    FindBihole(FindBiholeArgs),
    /// Balanced-color an edge-list graph.
    Color(ColorArgs),
    /// Decide balanced colorability via the complement matching.
    CheckColorable(InputOnly),
    /// Exact brute-force optima for small graphs.
    Oracle(OracleArgs),
    /// Multi-seed benchmark suites with pass/fail thresholds.
    Bench(BenchArgs),
    /// Coupon-collector simulation batch.
    Coupon(CouponArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Vertices per side.
    #[arg(long)]
    n: usize,
    /// Edge probability in [0, 1].
    #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
    p: Option<f64>,
    /// Expected average degree; shorthand for p = delta / n.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Output edge-list file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FindBiholeArgs {
    /// Input edge-list file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    seed: u64,
    /// Extra attempts after the first when the target is missed.
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Also print the witness as two index lines (left, then right).
    #[arg(long)]
    emit_witness: bool,
}

#[derive(Args)]
struct ColorArgs {
    /// Input edge-list file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    seed: u64,
    /// Extra full-pipeline attempts after the first.
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Cap on residual-selection resampling steps (default 1000 * (n + q)).
    #[arg(long)]
    resample_cap: Option<u64>,
    /// Write the step-by-step trace as JSON to this file.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct InputOnly {
    /// Input edge-list file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    /// Maximum bi-hole size.
    Bihole,
    /// Minimum number of balanced-coloring classes.
    Chib,
    /// Maximum matching size.
    Matching,
}

#[derive(Args)]
struct OracleArgs {
    /// Input edge-list file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: OracleMode,
    /// For --mode matching: match in the bipartite complement instead.
    #[arg(long)]
    complement: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Bihole,
    Color,
    Coupon,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: SuiteName,
    /// Independent trials (one derived seed each).
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Base seed; trial i derives from its child stream i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertices per side (bihole and color suites).
    #[arg(long)]
    n: Option<usize>,
    /// Expected average degree (bihole and color suites).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Cap on residual-selection resampling steps (color suite).
    #[arg(long)]
    resample_cap: Option<u64>,
    /// Coupons per collection (coupon suite).
    #[arg(long)]
    q: Option<usize>,
    /// Collections simulated per seed (coupon suite).
    #[arg(long, default_value_t = 100000)]
    trials: u64,
    /// Also export per-trial rows (including wall times) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CouponArgs {
    /// Coupons per collection.
    #[arg(long)]
    q: usize,
    /// Draw budget whose hit probability is estimated.
    #[arg(long, default_value_t = 64)]
    delta: usize,
    /// Collections to simulate.
    #[arg(long, default_value_t = 100000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failures that abort a command before it produces output. Operational
/// failures (exit 3) never take this path: they print their report first
/// and return the code directly.
enum Failure {
    /// Exit 1: flags that parse but do not form a runnable command.
    Usage(String),
    /// Exit 2: unreadable, unparseable, or out-of-domain input.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    if let Ok(raw) = std::env::var("BIHOLE_LAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(k) if k >= 1 => {
                if let Err(e) = harness::configure_thread_cap(k) {
                    eprintln!("warning: thread cap not applied: {e}");
                }
            }
            _ => {
                eprintln!("error: BIHOLE_LAB_THREADS must be a positive integer, got {raw:?}");
                return ExitCode::from(2);
            }
        }
    }

    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::FindBihole(args) => cmd_find_bihole(args),
        Command::Color(args) => cmd_color(args),
        Command::CheckColorable(args) => cmd_check_colorable(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Coupon(args) => cmd_coupon(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Failure> {
    let p = match (args.p, args.delta) {
        (Some(p), None) => p,
        (None, Some(delta)) => {
            if args.n == 0 {
                return Err(Failure::Input("--delta needs n > 0".to_string()));
            }
            delta / args.n as f64
        }
        _ => unreachable!("clap enforces exactly one of --p/--delta"),
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(Failure::Input(format!("edge probability {p} is outside [0, 1]")));
    }
    let g = gen::gnnp(args.n, p, Seed(args.seed));
    std::fs::write(&args.out, serialize_edge_list(&g))
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", args.out.display())))?;
    let descriptor = bihole_lab::report::GraphDescriptor::measure(
        &g,
        Some(format!("gnnp(n={}, p={p}, seed={})", args.n, args.seed)),
    );
    println!("{}", json(&descriptor));
    eprintln!(
        "wrote {}: {} + {} vertices, {} edges",
        args.out.display(),
        g.left_count(),
        g.right_count(),
        g.edge_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_find_bihole(args: FindBiholeArgs) -> Result<ExitCode, Failure> {
    let g = load_graph(&args.input)?;
    let params = BiholeParams {
        epsilon: args.epsilon,
        retries: args.retries,
        seed: Seed(args.seed),
    };
    let (hole, mut report) = find_bihole(&g, &params).map_err(input_error)?;
    stamp_source(&mut report, &args.input);
    println!("{}", json(&report));
    if args.emit_witness {
        println!("{}", join(&hole.left_set));
        println!("{}", join(&hole.right_set));
    }
    eprintln!(
        "bi-hole of size {} against target {} ({:?} after {} attempt(s))",
        hole.size(),
        report.metrics.target.unwrap_or(0),
        report.outcome,
        report.metrics.attempts.unwrap_or(1),
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_color(args: ColorArgs) -> Result<ExitCode, Failure> {
    let g = load_graph(&args.input)?;
    let params = ColoringParams {
        epsilon: args.epsilon,
        seed: Seed(args.seed),
        retries: args.retries,
        resample_cap: args.resample_cap,
    };
    let mut run = color_balanced(&g, &params).map_err(input_error)?;
    stamp_source(&mut run.report, &args.input);
    if let Some(path) = &args.trace_out {
        std::fs::write(path, json(&run.trace))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    println!("{}", json(&run.report));
    match &run.outcome {
        ColoringOutcome::Colored { coloring } => {
            eprintln!(
                "colored with {} colors via {:?}",
                coloring.palette_size, run.trace.phase_taken
            );
            Ok(ExitCode::SUCCESS)
        }
        ColoringOutcome::Infeasible => {
            eprintln!("no balanced coloring exists (complement matching is not perfect)");
            Ok(ExitCode::SUCCESS)
        }
        ColoringOutcome::Failure { reason } => {
            eprintln!("coloring failed: {reason}");
            Ok(ExitCode::from(3))
        }
    }
}

fn cmd_check_colorable(args: InputOnly) -> Result<ExitCode, Failure> {
    let g = load_graph(&args.input)?;
    let (feasible, matching) = has_balanced_coloring(&g).map_err(input_error)?;
    println!(
        "{{\"balanced_colorable\":{feasible},\"matching_size\":{}}}",
        matching.pairs.len()
    );
    eprintln!(
        "balanced coloring {} (complement matching covers {}/{})",
        if feasible { "exists" } else { "is impossible" },
        matching.pairs.len(),
        g.left_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Failure> {
    let g = load_graph(&args.input)?;
    match args.mode {
        OracleMode::Bihole => {
            let res = max_bihole_exact(&g).map_err(input_error)?;
            println!("{}", json(&res));
            eprintln!("maximum bi-hole size {} ({} nodes explored)", res.value, res.explored);
        }
        OracleMode::Chib => match chi_b_exact(&g) {
            Ok(res) => {
                println!("{}", json(&res));
                eprintln!(
                    "minimum class count {} ({} states explored)",
                    res.value, res.explored
                );
            }
            Err(Error::Infeasible) => {
                println!("{{\"infeasible\":true}}");
                eprintln!("no balanced coloring exists");
            }
            Err(e) => return Err(input_error(e)),
        },
        OracleMode::Matching => {
            let res = max_matching_exact(&g, args.complement).map_err(input_error)?;
            println!("{}", json(&res));
            eprintln!(
                "maximum {}matching size {} ({} states explored)",
                if args.complement { "complement " } else { "" },
                res.value,
                res.explored
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Failure> {
    if args.seeds == 0 {
        return Err(Failure::Usage("--seeds must be at least 1".to_string()));
    }
    let base_seed = Seed(args.seed);
    let run: SuiteRun = match args.suite {
        SuiteName::Bihole => {
            let (n, delta) = require_instance(&args, "bihole")?;
            bihole_suite(&BiholeSuiteConfig {
                n,
                delta,
                epsilon: args.epsilon,
                retries: args.retries,
                seeds: args.seeds,
                base_seed,
            })
        }
        SuiteName::Color => {
            let (n, delta) = require_instance(&args, "color")?;
            color_suite(&ColorSuiteConfig {
                n,
                delta,
                epsilon: args.epsilon,
                retries: args.retries,
                resample_cap: args.resample_cap,
                seeds: args.seeds,
                base_seed,
            })
        }
        SuiteName::Coupon => {
            let q = args.q.ok_or_else(|| {
                Failure::Usage("the coupon suite needs --q".to_string())
            })?;
            // The coupon draw budget is an integer; --delta doubles as it.
            let delta = args.delta.map_or(64, |d| d.round() as usize);
            coupon_suite(&CouponSuiteConfig {
                q,
                delta,
                trials: args.trials,
                seeds: args.seeds,
                base_seed,
            })
        }
    };

    let mut summary = run.summary;
    if let Some(path) = &args.csv {
        std::fs::write(path, csv_rows(&summary))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    strip_wall_times(&mut summary);
    println!("{}", json(&summary));
    eprintln!(
        "suite {}: {} — {}",
        summary.suite,
        if run.passed { "PASS" } else { "FAIL" },
        run.detail
    );
    Ok(if run.passed { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn require_instance(args: &BenchArgs, suite: &str) -> Result<(usize, f64), Failure> {
    match (args.n, args.delta) {
        (Some(n), Some(delta)) if n > 0 => Ok((n, delta)),
        (Some(0), Some(_)) => Err(Failure::Usage(format!("the {suite} suite needs --n > 0"))),
        _ => Err(Failure::Usage(format!("the {suite} suite needs --n and --delta"))),
    }
}

fn cmd_coupon(args: CouponArgs) -> Result<ExitCode, Failure> {
    if args.q == 0 {
        return Err(Failure::Input("--q must be at least 1".to_string()));
    }
    if args.trials == 0 {
        return Err(Failure::Input("--trials must be at least 1".to_string()));
    }
    let mut report = coupon_trial(args.q, args.delta, args.trials, Seed(args.seed));
    report.wall_time_ms = None;
    println!("{}", json(&report));
    eprintln!(
        "q={} over {} trials: mean_t={:.4}, var_t={:.4}, p_hat(T <= {})={:.4}",
        args.q,
        args.trials,
        report.metrics.mean_t.unwrap_or(f64::NAN),
        report.metrics.var_t.unwrap_or(f64::NAN),
        args.delta,
        report.metrics.p_hat.unwrap_or(f64::NAN),
    );
    Ok(ExitCode::SUCCESS)
}

fn load_graph(path: &Path) -> Result<BipartiteGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn stamp_source(report: &mut bihole_lab::report::TrialReport, path: &Path) {
    if let Some(descriptor) = report.graph.as_mut() {
        descriptor.source = Some(path.display().to_string());
    }
}

fn input_error(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize infallibly")
}

fn join(indices: &[usize]) -> String {
    let mut line = String::new();
    for (k, v) in indices.iter().enumerate() {
        if k > 0 {
            line.push(' ');
        }
        let _ = write!(line, "{v}");
    }
    line
}

/// Per-trial CSV rows, wall times included; one fixed header, absent metrics
/// left blank.
fn csv_rows(summary: &BenchSummary) -> String {
    let mut out = String::from(
        "suite,trial,algorithm,outcome,seed,epsilon,retries,resample_cap,left_count,\
         right_count,edge_count,avg_degree,max_degree,t,target,u_prime,v_prime,trim_flagged,\
         attempts,palette_size,q,s_size,residual_max_degree,resamples,p_hat,mean_t,var_t,\
         wall_time_ms\n",
    );
    for (i, r) in summary.reports.iter().enumerate() {
        let outcome = json(&r.outcome);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            summary.suite,
            i,
            r.algorithm,
            outcome.trim_matches('"'),
            opt(&r.params.seed),
            opt(&r.params.epsilon),
            opt(&r.params.retries),
            opt(&r.params.resample_cap),
            opt(&r.graph.as_ref().map(|g| g.left_count)),
            opt(&r.graph.as_ref().map(|g| g.right_count)),
            opt(&r.graph.as_ref().map(|g| g.edge_count)),
            opt(&r.graph.as_ref().map(|g| g.avg_degree)),
            opt(&r.graph.as_ref().map(|g| g.max_degree)),
            opt(&r.metrics.t),
            opt(&r.metrics.target),
            opt(&r.metrics.u_prime),
            opt(&r.metrics.v_prime),
            opt(&r.metrics.trim_flagged),
            opt(&r.metrics.attempts),
            opt(&r.metrics.palette_size),
            opt(&r.metrics.q),
            opt(&r.metrics.s_size),
            opt(&r.metrics.residual_max_degree),
            opt(&r.metrics.resamples),
            opt(&r.metrics.p_hat),
            opt(&r.metrics.mean_t),
            opt(&r.metrics.var_t),
            opt(&r.wall_time_ms),
        );
    }
    out
}

fn opt<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map_or(String::new(), |v| v.to_string())
}

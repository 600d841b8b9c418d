//! `comax`: solve, certify and generate instances from the command line.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use comax_core::applications::{solve_problem, Problem};
use comax_core::comonotone::{check_comonotone_2d, check_standard_comonotone, FinitePointSet};
use comax_core::io::{instance_to_json, load_instance};
use comax_core::oracle::{brute_force_solve, Distribution, InstanceSeed};
use comax_core::{ComaxError, SolverConfig};

use report::{agrees, CheckRecord, Format, Mode, SolveRecord};

#[derive(Parser)]
#[command(
    name = "comax",
    version,
    about = "Exact low-rank convex maximization over comonotone sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the framework, the brute-force oracle, or both.
    Solve(SolveArgs),
    /// Decide whether a finite point set is standard comonotone.
    Check(CheckArgs),
    /// Write a reproducible random instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Report path; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short, long, value_parser = parse_problem)]
    problem: Problem,
    /// Instance JSON, or a CSV factor matrix.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long, value_enum, default_value = "framework")]
    mode: Mode,
    /// Sparsity budget; overrides the instance.
    #[arg(short, long)]
    s: Option<usize>,
    /// Component count; overrides the instance.
    #[arg(short, long)]
    d: Option<usize>,
    /// Per-component budgets, comma separated; overrides the instance.
    #[arg(long, value_delimiter = ',')]
    s_vec: Option<Vec<usize>>,
    /// Worker threads (the COMAX_THREADS variable takes precedence).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Leave wall_ms null so reports are byte-stable.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    max_cells: Option<f64>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    zero_rel: Option<f64>,
    #[arg(long)]
    rank_rel: Option<f64>,
    #[arg(long)]
    secular_tol: Option<f64>,
    #[arg(long)]
    eig_group_rel: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Point set as CSV, one point per row.
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(short)]
    r: usize,
    #[arg(short)]
    n: usize,
    #[arg(short)]
    s: usize,
    #[arg(short)]
    d: Option<usize>,
    #[arg(long, value_parser = parse_dist, default_value = "gaussian")]
    dist: Distribution,
    /// Adds the fields this problem needs.
    #[arg(short, long, value_parser = parse_problem)]
    problem: Option<Problem>,
    /// Instance path; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse().map_err(|e: ComaxError| e.to_string())
}

fn parse_dist(s: &str) -> Result<Distribution, String> {
    s.parse().map_err(|e: ComaxError| e.to_string())
}

enum Failure {
    Core(ComaxError),
    Io(String),
}

impl From<ComaxError> for Failure {
    fn from(e: ComaxError) -> Self {
        Failure::Core(e)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn threads(flag: usize) -> Result<usize, Failure> {
    match std::env::var("COMAX_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Failure::Io(format!("COMAX_THREADS={v:?} is not a thread count"))),
        _ => Ok(flag),
    }
}

fn solve(args: &SolveArgs) -> Result<u8, Failure> {
    let mut cfg = SolverConfig::default().with_threads(threads(args.threads)?);
    if let Some(v) = args.max_cells {
        cfg.budget.max_cells = v;
    }
    if let Some(v) = args.max_dim {
        cfg.budget.max_dim = v;
    }
    if let Some(v) = args.zero_rel {
        cfg.tol.zero_rel = v;
    }
    if let Some(v) = args.rank_rel {
        cfg.tol.rank_rel = v;
    }
    if let Some(v) = args.secular_tol {
        cfg.tol.secular = v;
    }
    if let Some(v) = args.eig_group_rel {
        cfg.tol.eig_group_rel = v;
    }
    let mut inst = load_instance(&args.input, args.s)?;
    if args.d.is_some() {
        inst.d = args.d;
    }
    if args.s_vec.is_some() {
        inst.s_vec = args.s_vec.clone();
    }
    inst.validate(args.problem)?;
    let framework = match args.mode {
        Mode::Framework | Mode::Both => Some(solve_problem(args.problem, &inst, &cfg)?),
        Mode::Oracle => None,
    };
    let oracle = match args.mode {
        Mode::Oracle | Mode::Both => Some(brute_force_solve(args.problem, &inst, &cfg)?),
        Mode::Framework => None,
    };
    let record = SolveRecord::new(
        args.problem.name(),
        args.mode,
        inst.n()?,
        inst.d,
        framework.as_ref(),
        oracle.as_ref(),
        !args.no_timing,
    );
    write_out(args.out.output.as_deref(), &record.render(args.out.format))?;
    match (&framework, &oracle) {
        (Some(f), Some(o)) if !agrees(f.solution.value, o.value) => {
            eprintln!(
                "framework value {} disagrees with oracle value {}",
                f.solution.value, o.value
            );
            Ok(3)
        }
        _ => Ok(0),
    }
}

fn check(args: &CheckArgs) -> Result<u8, Failure> {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.input.display())))?;
    let set = FinitePointSet::from_csv(file)?;
    let verdict = check_standard_comonotone(&set)?;
    let planar = if set.dim() == 2 {
        Some(check_comonotone_2d(&set)?)
    } else {
        None
    };
    let record = CheckRecord::new(&verdict, set.dim(), set.len(), planar.as_ref());
    write_out(args.out.output.as_deref(), &record.render(args.out.format))?;
    Ok(0)
}

fn gen(args: &GenArgs) -> Result<u8, Failure> {
    let mut seed = InstanceSeed::new(args.seed, args.r, args.n, args.s).with_dist(args.dist);
    seed.d = args.d;
    seed.problem = args.problem;
    let inst = seed.generate()?;
    write_out(args.output.as_deref(), &instance_to_json(&inst))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e @ ComaxError::BudgetExceeded { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

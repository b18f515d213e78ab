//! `m3rs`: generate instances, solve them, sweep λ and check solutions.
//!
//! Exit codes: 0 success, 1 infeasible result or constraint violations,
//! 2 usage, parse or I/O errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use m3rs_core::colgen::{run_colgen_traced, trace_csv};
use m3rs_core::instgen::{generate, GenSpec};
use m3rs_core::io::{read_instance, solution_from_json, solution_to_json, write_instance, SolutionFile};
use m3rs_core::metrics::{csv_row, pareto_sweep, to_csv, MetricReport, Parallelism, CSV_HEADER};
use m3rs_core::{check_solution, solve, Instance, Method, SolveOptions, Status, Weights};

#[derive(Parser)]
#[command(name = "m3rs", version, about = "Multi-robot multi-mode routing and scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve an instance for one λ.
    Solve(SolveArgs),
    /// Solve over a grid of λ values and write metric rows.
    Sweep(SweepArgs),
    /// Check a solution file against an instance.
    Check(CheckArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    tasks: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    agents: u64,
    #[arg(long, value_parser = positive)]
    horizon_hours: f64,
    /// Side of the square area in metres.
    #[arg(long, default_value_t = 30.0, value_parser = positive)]
    area_side: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct Budget {
    /// Wall-clock budget per solve in seconds.
    #[arg(long, value_parser = positive)]
    time_limit: Option<f64>,
    /// Seed for the column generation subset sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report compute times as zero, for reproducible output files.
    #[arg(long)]
    no_timing: bool,
}

impl Budget {
    fn options(&self) -> SolveOptions {
        let mut o = SolveOptions::default();
        o.colgen.seed = self.seed;
        if let Some(t) = self.time_limit {
            o.limits.max_time = t;
            o.colgen.total_time_limit = t;
            o.colgen.rmp_time_limit = o.colgen.rmp_time_limit.min(t);
            o.colgen.pricing_time_limit = o.colgen.pricing_time_limit.min(t);
        }
        o
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, value_parser = parse_lambda)]
    lambda: f64,
    /// Solution JSON to write.
    #[arg(short, long)]
    output: PathBuf,
    /// Column generation only: write the per-iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(short, long)]
    instance: PathBuf,
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "0:1:0.1", value_parser = parse_grid)]
    grid: Grid,
    /// Comma-separated methods.
    #[arg(long, default_value = "exact", value_delimiter = ',', value_parser = parse_method)]
    method: Vec<Method>,
    /// Open every window at time zero.
    #[arg(long)]
    relax_start: bool,
    /// Replace the fleet size.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    agents_override: Option<u64>,
    /// CSV file to write; stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    solution: PathBuf,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("lambda must lie in [0, 1], got {v}"))
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: m3rs_core::Error| e.to_string())
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("grid range must be start:end:step, got {s:?}"));
        };
        let (a, b, step) = (parse_lambda(a)?, parse_lambda(b)?, positive(step)?);
        if b < a {
            return Err("grid end is below its start".into());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| round12(a + i as f64 * step)).collect()
    } else {
        s.split(',').map(|v| parse_lambda(v.trim()).map(round12)).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid(values))
}

fn parallelism() -> Result<Parallelism> {
    match std::env::var("M3RS_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Parallelism::Threads(n)),
            _ => bail!("M3RS_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(Parallelism::Auto),
    }
}

fn load(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("reading instance {}", path.display()))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let mut spec = GenSpec::new(args.tasks as usize, args.agents as usize, args.horizon_hours, args.seed);
    spec.area_side = args.area_side;
    let inst = generate(&spec)?;
    write_instance(&args.output, &inst).with_context(|| format!("writing {}", args.output.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let inst = load(&args.instance)?;
    let w = Weights::new(args.lambda)?;
    let options = args.budget.options();
    let mut sol = match args.method {
        Method::Colgen => {
            let run = run_colgen_traced(&inst, w, &options.colgen)?;
            if let Some(path) = &args.trace {
                fs::write(path, trace_csv(&run.trace)).with_context(|| format!("writing {}", path.display()))?;
            }
            run.solution
        }
        m => solve(&inst, m, w, &options)?,
    };
    if args.budget.no_timing {
        sol.compute_time = 0.0;
    }
    let file = SolutionFile {
        instance: inst.name().to_string(),
        lambda: args.lambda,
        method: args.method.name().to_string(),
        solution: sol,
    };
    fs::write(&args.output, solution_to_json(&inst, &file)?)
        .with_context(|| format!("writing {}", args.output.display()))?;

    let report = check_solution(&inst, &file.solution)?;
    if !report.ok() {
        for v in &report.violations {
            eprintln!("{v}");
        }
        return Ok(ExitCode::from(1));
    }
    let row = MetricReport::new(&inst, args.method.name(), w, &file.solution)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{CSV_HEADER}")?;
    writeln!(out, "{}", csv_row(&row))?;
    if file.solution.status == Status::Infeasible {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut inst = load(&args.instance)?;
    let base = inst.name().to_string();
    let mut name = base.clone();
    if let Some(a) = args.agents_override {
        inst = inst.with_fleet_count(a as usize)?;
        // names follow tasks-agents-hours
        let parts: Vec<&str> = base.splitn(3, '-').collect();
        name = match parts[..] {
            [n, _, h] => format!("{n}-{a}-{h}"),
            _ => format!("{base}-a{a}"),
        };
    }
    if args.relax_start {
        inst = inst.with_relaxed_starts();
        name.push_str("-r");
    }
    let inst = inst.with_name(name);
    let options = args.budget.options();
    let par = parallelism()?;

    let mut rows = Vec::new();
    for &m in &args.method {
        let mut r = pareto_sweep(&inst, m, &args.grid.0, &options, par)?;
        if args.budget.no_timing {
            for row in &mut r {
                row.compute_time = 0.0;
            }
        }
        rows.extend(r);
    }
    let csv = to_csv(&rows);
    match &args.output {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    let inst = load(&args.instance)?;
    let text = fs::read_to_string(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let file = solution_from_json(&inst, &text).with_context(|| format!("parsing {}", args.solution.display()))?;
    let report = check_solution(&inst, &file.solution)?;
    if report.ok() {
        println!("ok");
        return Ok(ExitCode::SUCCESS);
    }
    for v in &report.violations {
        println!("{v}");
    }
    Ok(ExitCode::from(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Check(a) => cmd_check(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}

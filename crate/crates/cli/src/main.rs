use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lbcluster::genbench::{generate_instance, run_benchmark, BenchConfig, BoundsSpec, Family};
use lbcluster::io::{
    fractional_to_json, instance_to_json, parse_instance, parse_solution, solution_to_json,
    AnySolution,
};
use lbcluster::subsolver::LocalSearchConfig;
use lbcluster::weaklb::run_weak_pipeline;
use lbcluster::{
    brute_force_opt, compute_center_costs, cost_fractional, cost_multi, reduce_to_one_plus_eps,
    reduce_to_two, solve_lb_via_nesting, to_bicriteria, Instance, OracleLimits, OracleMode,
    Rational64, Scalar, Solution,
};

/// Lower-bounded k-median / k-means clustering.
#[derive(Parser)]
#[command(name = "lbcluster", version)]
struct Cli {
    /// Use exact rational arithmetic instead of f64.
    #[arg(long, global = true)]
    exact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak-lower-bound solution via the center-cost reduction.
    SolveWeak {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
    /// Reduce a weak solution to one with at most two centers per point.
    Reduce2 {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Reduce a weak solution to fractional amounts of at most 1+eps per point.
    ReduceEps {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Turn a 2-weak solution into a single assignment with relaxed bounds.
    Bicriteria {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standard lower-bounded solution via nesting.
    SolveLb {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact optimum of a small instance.
    Oracle {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark config; exits with status 1 if any bound is violated.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random instance.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Uniform lower bound.
        #[arg(long, conflicts_with = "bound_range")]
        bound: Option<usize>,
        /// Per-center bounds drawn from LO..=HI, written as `LO,HI`.
        #[arg(long, value_delimiter = ',')]
        bound_range: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Weak,
    TwoWeak,
    Lb,
    Plain,
    Fcost,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Line,
    Sqeuclidean,
    RandomMetric,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_instance<T: Scalar>(path: &Path) -> Result<Instance<T>> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_integral<T: Scalar>(path: &Path) -> Result<Solution<T>> {
    match parse_solution(&read(path)?).with_context(|| format!("parsing {}", path.display()))? {
        AnySolution::Integral(s) => Ok(s),
        AnySolution::Fractional(_) => bail!("{} holds a fractional solution", path.display()),
    }
}

fn run<T: Scalar>(command: Command) -> Result<ExitCode> {
    match command {
        Command::SolveWeak {
            instance,
            out,
            seed,
            restarts,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let config = LocalSearchConfig {
                restarts,
                seed,
                max_iters: None,
            };
            let w = run_weak_pipeline(&inst, &config)?;
            emit(out.as_deref(), &solution_to_json(&w.solution, Some(w.cost)))?;
        }
        Command::Reduce2 {
            instance,
            solution,
            out,
            trace,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let sol = load_integral::<T>(&solution)?;
            let (two, log) = reduce_to_two(&inst, &sol)?;
            emit(
                out.as_deref(),
                &solution_to_json(&two, cost_multi(&inst, &two).ok()),
            )?;
            if let Some(path) = trace {
                emit(Some(&path), &serde_json::to_value(&log)?)?;
            }
        }
        Command::ReduceEps {
            eps,
            instance,
            solution,
            out,
            trace,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let sol = load_integral::<T>(&solution)?;
            let (frac, log) = reduce_to_one_plus_eps(&inst, &sol, T::from_f64(eps))?;
            emit(
                out.as_deref(),
                &fractional_to_json(&frac, cost_fractional(&inst, &frac).ok()),
            )?;
            if let Some(path) = trace {
                emit(Some(&path), &serde_json::to_value(&log)?)?;
            }
        }
        Command::Bicriteria {
            beta,
            instance,
            solution,
            out,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let sol = load_integral::<T>(&solution)?;
            let res = to_bicriteria(&inst, &sol, T::from_f64(beta))?;
            let mut v = solution_to_json(&res.solution, cost_multi(&inst, &res.solution).ok());
            v["closed"] = json!(res.closed);
            emit(out.as_deref(), &v)?;
        }
        Command::SolveLb {
            instance,
            out,
            seed,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let sol = solve_lb_via_nesting(&inst, seed)?;
            emit(
                out.as_deref(),
                &solution_to_json(&sol, cost_multi(&inst, &sol).ok()),
            )?;
        }
        Command::Oracle {
            mode,
            instance,
            out,
        } => {
            let inst = load_instance::<T>(&instance)?;
            let mode = match mode {
                Mode::Weak => OracleMode::WeakLB,
                Mode::TwoWeak => OracleMode::BWeak(2),
                Mode::Lb => OracleMode::StandardLB,
                Mode::Plain => OracleMode::Unconstrained,
                Mode::Fcost => OracleMode::CenterCosts(compute_center_costs(&inst)?),
            };
            let res = brute_force_opt(&inst, &mode, &OracleLimits::default())?;
            let mut v = solution_to_json(&res.solution, Some(res.cost));
            v["mode"] = json!(mode.name());
            emit(out.as_deref(), &v)?;
        }
        Command::Bench { config, out } => {
            let config: BenchConfig = serde_json::from_str(&read(&config)?)
                .with_context(|| format!("parsing {}", config.display()))?;
            let report = run_benchmark(&config)?;
            match out {
                Some(path) => {
                    fs::write(&path, report.to_jsonl())
                        .with_context(|| format!("writing {}", path.display()))?;
                    print!("{}", report.summary_table());
                }
                None => {
                    print!("{}", report.to_jsonl());
                    eprint!("{}", report.summary_table());
                }
            }
            if report.violations() > 0 {
                eprintln!("{} records violate a bound or failed", report.violations());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Generate {
            family,
            dim,
            n,
            k,
            bound,
            bound_range,
            seed,
            out,
        } => {
            let family = match family {
                FamilyArg::Line => Family::Line,
                FamilyArg::Sqeuclidean => Family::SqEuclidean(dim),
                FamilyArg::RandomMetric => Family::RandomMetric,
            };
            let bounds = match (bound, bound_range.as_deref()) {
                (Some(b), None) => BoundsSpec::Uniform(b),
                (None, Some(&[lo, hi])) => BoundsSpec::Range(lo, hi),
                _ => bail!("give either --bound B or --bound-range LO,HI"),
            };
            let inst = generate_instance::<T>(family, n, k, bounds, seed)?;
            emit(out.as_deref(), &instance_to_json(&inst))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.exact {
        run::<Rational64>(cli.command)
    } else {
        run::<f64>(cli.command)
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

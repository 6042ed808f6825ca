//! `filterlab`: simulate models, run filters and stability experiments, and
//! drive the acceptance suite.
//!
//! Exit codes: 0 success, 1 failed criterion or verdict, 2 usage or
//! configuration error, 3 invalid model.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use filterlab_core::acceptance::{self, AcceptanceOptions, DEFAULT_SEED};
use filterlab_core::config::{load_model, read_model_file};
use filterlab_core::environment::{conditional_kernels, merge_distance};
use filterlab_core::fixtures;
use filterlab_core::model::{simulate, HmmModel};
use filterlab_core::oracle::{joint_table, oracle_conditional};
use filterlab_core::report::{beta_csv, fmt_f64, kernel_dump_csv, series_csv, simulation_csv, trajectory_csv};
use filterlab_core::scenario::{find_scenario, run_scenario_on, PriorSpec};
use filterlab_core::{filter_run, Error};

/// Default output directory when `--out` is not given.
const OUT_ENV: &str = "FILTERLAB_OUT";

#[derive(Parser)]
#[command(name = "filterlab", version, about = "Exact finite-state filtering lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a signal path with observations (`n,x,y`).
    Simulate(PathArgs),
    /// Sample observations and run the exact filter on them.
    Filter(PathArgs),
    /// Run a registered stability scenario.
    Stability(StabilityArgs),
    /// Conditional kernels, merging curve and merge distance on a sampled path.
    Environment(EnvironmentArgs),
    /// Compare the filter against brute-force enumeration on a short path.
    OracleCheck(PathArgs),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model file (TOML) or fixture label (M1, M2, M3, T1).
    #[arg(long, default_value = "M1")]
    model: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory; falls back to $FILTERLAB_OUT, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    common: ModelArgs,
    /// Number of time points.
    #[arg(long, default_value_t = 100)]
    length: usize,
    /// Law of `X_0`: "stationary", "uniform" or "delta:K".
    #[arg(long, default_value = "stationary")]
    start: String,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    scenario: String,
    /// Model file replacing the scenario's fixture.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnvironmentArgs {
    #[command(flatten)]
    common: ModelArgs,
    /// Last time index of the observation window.
    #[arg(long, default_value_t = 50)]
    horizon: usize,
    /// Pinned start states for the merging curve.
    #[arg(long, num_args = 2, value_names = ["Z", "Z2"], default_values_t = [0, 1])]
    pair: Vec<usize>,
}

#[derive(Args)]
struct AcceptArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run only this criterion.
    #[arg(long)]
    filter: Option<u32>,
    /// Extra model for the oracle sweep, loaded without validation.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_)
            | Error::UnknownModel(_)
            | Error::UnknownScenario(_)
            | Error::IndexOutOfRange { .. }
            | Error::SizeGuard { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Filter(a) => cmd_filter(&a),
        Command::Stability(a) => cmd_stability(&a),
        Command::Environment(a) => cmd_environment(&a),
        Command::OracleCheck(a) => cmd_oracle_check(&a),
        Command::Accept(a) => cmd_accept(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// A path that exists is read as a model file; otherwise the argument must
/// be a fixture label.
fn resolve_model(arg: &str) -> Result<HmmModel, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_model(path)?);
    }
    fixtures::by_label(arg).map_err(|_| Failure {
        code: 2,
        message: format!("no model file or fixture named `{arg}`"),
    })
}

fn out_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
}

/// Writes `contents` to `<dir>/<name>`, or to stdout without a directory.
fn emit(dir: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), Failure> {
    match dir {
        Some(dir) => {
            let io = |e: std::io::Error| Failure {
                code: 2,
                message: format!("{}: {e}", dir.display()),
            };
            std::fs::create_dir_all(dir).map_err(io)?;
            std::fs::write(dir.join(name), contents).map_err(io)
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sample(args: &PathArgs, model: &HmmModel) -> Result<filterlab_core::model::SimulatedPath, Failure> {
    let start = PriorSpec::Named(args.start.clone()).resolve(model)?;
    Ok(simulate(model, &start, args.length, args.common.seed)?)
}

fn cmd_simulate(args: &PathArgs) -> CmdResult {
    let model = resolve_model(&args.common.model)?;
    let path = sample(args, &model)?;
    emit(&out_dir(&args.common.out), "simulate.csv", &simulation_csv(&path))?;
    Ok(true)
}

fn cmd_filter(args: &PathArgs) -> CmdResult {
    let model = resolve_model(&args.common.model)?;
    let path = sample(args, &model)?;
    let traj = filter_run(&model, &model.stationary, &path.observations)?;
    emit(&out_dir(&args.common.out), "filter.csv", &trajectory_csv(&traj))?;
    Ok(true)
}

fn cmd_stability(args: &StabilityArgs) -> CmdResult {
    let mut spec = find_scenario(&args.scenario)?;
    let model = match &args.model {
        Some(path) => load_model(path)?,
        None => fixtures::by_label(&spec.model)?,
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(h) = args.horizon {
        spec.horizon = h;
    }
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    let outcome = run_scenario_on(&spec, &model)?;
    let dir = out_dir(&args.out);
    emit(&dir, &format!("{}.csv", spec.name), &outcome.to_csv())?;
    if dir.is_some() {
        println!(
            "VERDICT,{},{},{}",
            if outcome.verdict.pass { "PASS" } else { "FAIL" },
            fmt_f64(outcome.verdict.metric),
            fmt_f64(outcome.verdict.threshold)
        );
    }
    if outcome.truncated_trials > 0 {
        eprintln!("{} trial(s) truncated by a degenerate filter", outcome.truncated_trials);
    }
    Ok(outcome.verdict.pass)
}

fn cmd_environment(args: &EnvironmentArgs) -> CmdResult {
    let model = resolve_model(&args.common.model)?;
    let path = simulate(&model, &model.stationary, args.horizon + 1, args.common.seed)?;
    let y = &path.observations;
    let seq = conditional_kernels(&model, y)?;
    let curve = seq.beta_curve(args.pair[0], args.pair[1])?;
    let merge = (0..=args.horizon)
        .map(|n| Ok((n, merge_distance(&model, y, &model.stationary, n)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let dir = out_dir(&args.common.out);
    emit(&dir, "beta.csv", &beta_csv(&curve))?;
    if dir.is_some() {
        emit(&dir, "merge.csv", &series_csv("value", merge))?;
        emit(&dir, "kernels.csv", &kernel_dump_csv(&seq))?;
    }
    Ok(true)
}

fn cmd_oracle_check(args: &PathArgs) -> CmdResult {
    let model = resolve_model(&args.common.model)?;
    let path = sample(args, &model)?;
    let y = &path.observations;
    let traj = filter_run(&model, &model.stationary, y)?;
    let mut worst: f64 = 0.0;
    for n in 0..y.len() {
        let table = joint_table(&model, &model.stationary, &y.prefix(n))?;
        let exact = oracle_conditional(&table, |_| true, |p| p[n])?;
        for x in 0..model.dim() {
            worst = worst.max((traj.state(n)[x] - exact[x]).abs());
        }
    }
    let pass = worst <= 1e-10;
    println!(
        "{},filter vs enumeration,{},{}",
        if pass { "PASS" } else { "FAIL" },
        fmt_f64(worst),
        fmt_f64(1e-10)
    );
    Ok(pass)
}

fn cmd_accept(args: &AcceptArgs) -> CmdResult {
    let mut opts = AcceptanceOptions::with_seed(args.seed);
    if let Some(path) = &args.model {
        opts.extra_models.push(read_model_file(path)?.into_model_unchecked()?);
    }
    let results = acceptance::run_suite(&opts, args.filter)?;
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!("criterion {} ({}) failed: {}", r.id, r.name, r.detail);
    }
    let text = acceptance::summary(&results);
    let dir = out_dir(&args.out);
    if dir.is_some() {
        emit(&dir, "accept.csv", &text)?;
    }
    print!("{text}");
    Ok(results.iter().all(|r| r.pass))
}

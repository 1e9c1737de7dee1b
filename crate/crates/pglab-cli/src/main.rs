//! `pglab` — simulate softmax policy-gradient bandit dynamics, sweep
//! parameter grids, verify the analysis numerically, evaluate closed-form
//! bounds, and plot trajectories.
//!
//! Exit codes: 0 success, 1 simulation/verification failure, 2 usage or
//! config error.

mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use pglab_core::bandit::BanditInstance;
use pglab_core::bounds;
use pglab_core::diagnostics::LowerBoundMonitor;
use pglab_core::discrete::run_discrete;
use pglab_core::experiments::{
    run_sweep, EngineKind, InstanceFamily, SeedRange, SweepConfig,
};
use pglab_core::sde::{run_continuous, MonitorSet, SdeConfig};
use pglab_core::trajectory::{RunSummary, Trajectory};
use pglab_core::verify::{run_suite, Budget, Suite};

// ---------------------------------------------------------------------------
// Error handling: usage/config errors exit 2, runtime failures exit 1
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Run(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Run(m) => m,
        }
    }
}

impl From<pglab_core::Error> for CliError {
    fn from(e: pglab_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

type CliResult = Result<ExitCode, CliError>;

// ---------------------------------------------------------------------------
// Argument definitions
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "pglab",
    version,
    about = "Softmax policy-gradient bandit dynamics: simulate, sweep, verify, bound, plot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and print its summary as JSON
    Simulate(SimulateArgs),
    /// Run an (eta, seed) grid and persist results
    Sweep(SweepArgs),
    /// Run the numerical verification suites
    Verify(VerifyArgs),
    /// Evaluate closed-form bounds and thresholds
    Bounds(BoundsArgs),
    /// Render trajectory CSVs as an SVG chart, one panel per eta
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InstanceArg {
    TwoArm,
    UniformGap,
    LowerBound,
    CustomFile,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    engine: EngineArg,
    #[arg(long, value_enum)]
    instance: InstanceArg,
    /// Arm count (uniform-gap and lower-bound families)
    #[arg(long)]
    k: Option<usize>,
    /// Gap of the second-best arm (two-arm, uniform-gap, lower-bound)
    #[arg(long)]
    delta2: Option<f64>,
    /// JSON file with {"mu": [..], "sigma": [..]} (custom-file instance)
    #[arg(long)]
    custom: Option<PathBuf>,
    #[arg(long)]
    eta: f64,
    /// Horizon: rounds (discrete) or time (continuous)
    #[arg(long)]
    n: f64,
    /// Step size (continuous engine; defaults per eta)
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recording stride in steps (default subsamples to ~2000 points)
    #[arg(long)]
    stride: Option<u64>,
    /// Trajectory CSV path
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep config; exclusive with the inline flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    engine: Option<EngineArg>,
    #[arg(long, value_enum, required_unless_present = "config")]
    instance: Option<InstanceArg>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    custom: Option<PathBuf>,
    /// Comma-separated learning rates
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    etas: Option<Vec<f64>>,
    #[arg(long, required_unless_present = "config")]
    n: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    /// Seed range: COUNT (seeds 0..COUNT) or START..END
    #[arg(long, required_unless_present = "config")]
    seeds: Option<String>,
    #[arg(long, default_value_t = 1000)]
    stride: usize,
    /// Output directory
    #[arg(long, required_unless_present = "config")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Identities,
    Lemmas,
    Hitting,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BudgetArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Monte Carlo path count for the hitting suite
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_enum, default_value_t = BudgetArg::Full)]
    budget: BudgetArg,
}

#[derive(Args)]
struct BoundsArgs {
    /// Two-arm expected-regret bound (needs --delta2, --eta, --n)
    #[arg(long)]
    two_arm: bool,
    /// Largest learning rate the small-eta regret bound covers
    /// (needs --delta2, --n)
    #[arg(long)]
    threshold: bool,
    /// Small-eta expected-regret bound (needs --k, --eta, --n)
    #[arg(long)]
    upper: bool,
    /// Hitting bound for Brownian motion with drift (needs --a, --eps)
    #[arg(long)]
    bm_drift: bool,
    /// Hitting bound for the sigmoid-drift SDE (needs --a, --eps, --n)
    #[arg(long)]
    bm_sigmoid: bool,
    /// Clock cap (needs --eta, --n, --eps)
    #[arg(long)]
    s_max: bool,
    /// Preference-gap stopping envelope (needs --s, --eta, --eps)
    #[arg(long)]
    z_threshold: bool,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Confidence level override for --upper (default 1/n)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct PlotArgs {
    /// Trajectory CSV paths or glob patterns ('*' in the file name)
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<String>,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
    /// Column to plot against t
    #[arg(long, default_value = "pi1")]
    field: String,
    /// Use a log10 time axis
    #[arg(long)]
    log_x: bool,
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_worker_pool() {
        eprintln!("error: {}", e.message());
        return e.code();
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// PGLAB_WORKERS overrides the rayon worker count (default: all cores).
fn init_worker_pool() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("PGLAB_WORKERS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::usage(format!("PGLAB_WORKERS must be a positive integer, got {raw:?}")))?;
        if n == 0 {
            return Err(CliError::usage("PGLAB_WORKERS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct CustomInstanceFile {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

fn build_family(
    instance: InstanceArg,
    k: Option<usize>,
    delta2: Option<f64>,
    custom: Option<&Path>,
) -> Result<InstanceFamily, CliError> {
    let need = |flag: &str, what: Option<f64>| {
        what.ok_or_else(|| CliError::usage(format!("missing required flag {flag} for this instance")))
    };
    match instance {
        InstanceArg::TwoArm => Ok(InstanceFamily::TwoArm {
            delta2: need("--delta2", delta2)?,
        }),
        InstanceArg::UniformGap => Ok(InstanceFamily::UniformGap {
            k: k.ok_or_else(|| CliError::usage("missing required flag --k for uniform-gap"))?,
            delta: need("--delta2", delta2)?,
        }),
        InstanceArg::LowerBound => Ok(InstanceFamily::LowerBound {
            k: k.ok_or_else(|| CliError::usage("missing required flag --k for lower-bound"))?,
            delta2: need("--delta2", delta2)?,
        }),
        InstanceArg::CustomFile => {
            let path = custom
                .ok_or_else(|| CliError::usage("missing required flag --custom for custom-file"))?;
            let text = fs::read_to_string(path)?;
            let parsed: CustomInstanceFile = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad custom instance file: {e}")))?;
            Ok(InstanceFamily::Custom {
                mu: parsed.mu,
                sigma: parsed.sigma,
            })
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    if !(args.eta > 0.0) {
        return Err(CliError::usage(format!(
            "invalid --eta: must be > 0, got {}",
            args.eta
        )));
    }
    if !(args.n >= 1.0) {
        return Err(CliError::usage(format!(
            "invalid --n: must be >= 1, got {}",
            args.n
        )));
    }
    let family = build_family(args.instance, args.k, args.delta2, args.custom.as_deref())?;
    let inst: BanditInstance = family.instantiate()?;

    let (traj, summary) = match args.engine {
        EngineArg::Discrete => {
            let rounds = args.n.round() as u64;
            let stride = args.stride.unwrap_or_else(|| (rounds / 2000).max(1));
            run_discrete(&inst, args.eta, rounds, args.seed, stride)?
        }
        EngineArg::Continuous => {
            let h = args.h.unwrap_or_else(|| SdeConfig::default_step(args.eta));
            if !(h > 0.0) {
                return Err(CliError::usage(format!("invalid --h: must be > 0, got {h}")));
            }
            let steps = (args.n / h).round().max(1.0) as u64;
            let stride = args.stride.unwrap_or_else(|| (steps / 2000).max(1)) as usize;
            let cfg = SdeConfig {
                h,
                horizon: args.n,
                record_stride: stride.max(1),
                clamp_floor: 0.0,
            };
            let monitors = match family {
                InstanceFamily::LowerBound { k, delta2 } if k >= 5 => {
                    MonitorSet::with_lower_bound(LowerBoundMonitor::new(
                        k, args.eta, args.n, delta2,
                    )?)
                }
                _ => MonitorSet::none(),
            };
            run_continuous(&inst, args.eta, &cfg, args.seed, monitors)?
        }
    };

    write_trajectory(&args.out, &traj)?;
    println!(
        "{}",
        serde_json::to_string(&summary).map_err(|e| CliError::Run(e.to_string()))?
    );
    if summary.diverged {
        eprintln!("run diverged: preferences left the finite range");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn parse_seed_range(raw: &str) -> Result<SeedRange, CliError> {
    if let Some((lo, hi)) = raw.split_once("..") {
        let start: u64 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad --seeds range start {lo:?}")))?;
        let end: u64 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad --seeds range end {hi:?}")))?;
        if end <= start {
            return Err(CliError::usage("--seeds range must be non-empty"));
        }
        Ok(SeedRange {
            start,
            count: end - start,
        })
    } else {
        let count: u64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad --seeds count {raw:?}")))?;
        Ok(SeedRange { start: 0, count })
    }
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let cfg: SweepConfig = if let Some(path) = &args.config {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("bad sweep config {}: {e}", path.display())))?
    } else {
        let engine = match args.engine.unwrap() {
            EngineArg::Discrete => EngineKind::Discrete,
            EngineArg::Continuous => EngineKind::Continuous,
        };
        let family = build_family(
            args.instance.unwrap(),
            args.k,
            args.delta2,
            args.custom.as_deref(),
        )?;
        SweepConfig {
            instance_family: family,
            engine,
            eta_grid: args.etas.unwrap(),
            n: args.n.unwrap(),
            h: args.h,
            seeds: parse_seed_range(&args.seeds.unwrap())?,
            record_stride: args.stride,
            output_path: args
                .out
                .unwrap()
                .to_str()
                .ok_or_else(|| CliError::usage("--out must be valid UTF-8"))?
                .to_string(),
        winner_threshold: 0.5,
        }
    };

    let results = run_sweep(&cfg)?;
    println!("rows: {}", results.rows.len());
    println!(
        "{:>10} {:>6} {:>12} {:>14} {:>10} {:>10} {:>10} {:>12} {:>9}",
        "eta", "runs", "mean_regret", "mean_final_pi1", "q10", "median", "q90", "wrong_winner", "diverged"
    );
    for agg in &results.aggregates {
        println!(
            "{:>10} {:>6} {:>12.4} {:>14.4} {:>10.4} {:>10.4} {:>10.4} {:>12.3} {:>9}",
            agg.eta,
            agg.runs,
            agg.mean_regret,
            agg.mean_final_pi1,
            agg.final_pi1_q10,
            agg.final_pi1_median,
            agg.final_pi1_q90,
            agg.wrong_winner_fraction,
            agg.diverged
        );
    }
    println!("results written to {}", cfg.output_path);
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let suite = match args.suite {
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Lemmas => Suite::Lemmas,
        SuiteArg::Hitting => Suite::Hitting,
        SuiteArg::All => Suite::All,
    };
    let budget = match args.budget {
        BudgetArg::Quick => Budget::Quick,
        BudgetArg::Full => Budget::Full,
    };
    let outcomes = run_suite(suite, budget, args.seeds);
    let mut failures = 0u32;
    for outcome in &outcomes {
        println!("{outcome}");
        if !outcome.passed {
            failures += 1;
        }
    }
    println!(
        "{} checks, {} failed",
        outcomes.len(),
        failures
    );
    if failures > 0 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn cmd_bounds(args: BoundsArgs) -> CliResult {
    let mut printed = 0u32;
    let need_f = |flag: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::usage(format!("missing required flag {flag}")))
    };
    if args.two_arm {
        let report = bounds::two_arm_regret_bound(
            need_f("--delta2", args.delta2)?,
            need_f("--eta", args.eta)?,
            need_f("--n", args.n)?,
        );
        println!("{report}");
        printed += 1;
    }
    if args.threshold {
        let (delta2, n) = (need_f("--delta2", args.delta2)?, need_f("--n", args.n)?);
        let value = bounds::upper_bound_threshold(delta2, n);
        let warn = if n < 3.0 { " [warning: defined for n >= 3]" } else { "" };
        println!("upper_bound_threshold(delta2={delta2}, n={n}) = {value}{warn}");
        printed += 1;
    }
    if args.upper {
        let k = args
            .k
            .ok_or_else(|| CliError::usage("missing required flag --k"))?;
        let (eta, n) = (need_f("--eta", args.eta)?, need_f("--n", args.n)?);
        let report = match args.delta {
            Some(delta) => bounds::upper_bound_regret_with_delta(k, eta, n, delta),
            None => bounds::upper_bound_regret(k, eta, n),
        };
        println!("{report}");
        printed += 1;
    }
    if args.bm_drift {
        let (a, eps) = (need_f("--a", args.a)?, need_f("--eps", args.eps)?);
        println!("bm_drift_bound(a={a}, eps={eps}) = {}", bounds::bm_drift_bound(a, eps));
        printed += 1;
    }
    if args.bm_sigmoid {
        let (a, eps, n) = (
            need_f("--a", args.a)?,
            need_f("--eps", args.eps)?,
            need_f("--n", args.n)?,
        );
        println!(
            "bm_less_drift_bound(a={a}, eps={eps}, n={n}) = {}",
            bounds::bm_less_drift_bound(a, eps, n)
        );
        if let Some(delta) = args.delta {
            println!(
                "bm_less_drift_sufficient_a(eps={eps}, n={n}, delta={delta}) = {}",
                bounds::bm_less_drift_sufficient_a(eps, n, delta)
            );
        }
        printed += 1;
    }
    if args.s_max {
        let (eta, n, eps) = (
            need_f("--eta", args.eta)?,
            need_f("--n", args.n)?,
            need_f("--eps", args.eps)?,
        );
        println!("s_max(eta={eta}, n={n}, eps={eps}) = {}", bounds::s_max(eta, n, eps));
        printed += 1;
    }
    if args.z_threshold {
        let (s, eta, eps) = (
            need_f("--s", args.s)?,
            need_f("--eta", args.eta)?,
            need_f("--eps", args.eps)?,
        );
        let z = bounds::z_threshold(s, eta, eps);
        println!(
            "z_threshold(s={s}, eta={eta}, eps={eps}) = {} (relaxation {})",
            z.threshold, z.relaxation
        );
        printed += 1;
    }
    if printed == 0 {
        return Err(CliError::usage(
            "select at least one bound: --two-arm, --threshold, --upper, --bm-drift, --bm-sigmoid, --s-max, --z-threshold",
        ));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

fn cmd_plot(args: PlotArgs) -> CliResult {
    let mut files: Vec<PathBuf> = Vec::new();
    for raw in &args.inputs {
        if raw.contains('*') {
            files.extend(expand_glob(raw)?);
        } else {
            files.push(PathBuf::from(raw));
        }
    }
    files.sort();
    files.dedup();
    if files.is_empty() {
        return Err(CliError::usage("no input files matched"));
    }

    // group series by the eta tag in the file name
    let mut groups: BTreeMap<String, Vec<Vec<(f64, f64)>>> = BTreeMap::new();
    for path in &files {
        let series = read_series(path, &args.field)?;
        let tag = eta_tag(path);
        groups.entry(tag).or_default().push(series);
    }
    let mut keys: Vec<String> = groups.keys().cloned().collect();
    keys.sort_by(|a, b| {
        let fa = a.parse::<f64>().unwrap_or(f64::INFINITY);
        let fb = b.parse::<f64>().unwrap_or(f64::INFINITY);
        fa.partial_cmp(&fb).unwrap().then(a.cmp(b))
    });
    let panels: Vec<svg::Panel> = keys
        .into_iter()
        .map(|key| {
            let series = groups.remove(&key).unwrap();
            let title = if key == "all" {
                args.field.clone()
            } else {
                format!("eta = {key}")
            };
            svg::Panel { title, series }
        })
        .collect();

    let rendered = svg::render(
        &panels,
        "t",
        &args.field,
        args.log_x,
        env!("CARGO_PKG_VERSION"),
    );
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&args.out, rendered)?;
    println!(
        "wrote {} ({} panels, {} trajectories)",
        args.out.display(),
        panels.len(),
        files.len()
    );
    Ok(ExitCode::SUCCESS)
}

/// Expand a pattern whose final component may contain '*'.
fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let path = Path::new(pattern);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_pat = path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::usage(format!("bad pattern {pattern:?}")))?;
    let dir = dir.unwrap_or_else(|| Path::new("."));
    if dir.to_string_lossy().contains('*') {
        return Err(CliError::usage("wildcards are only supported in the file name"));
    }
    let mut out = Vec::new();
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry?;
        if let Some(name) = entry.file_name().to_str() {
            if glob_match(name, file_pat) {
                out.push(entry.path());
            }
        }
    }
    Ok(out)
}

/// '*'-only glob matching, anchored at both ends.
fn glob_match(name: &str, pattern: &str) -> bool {
    let segments: Vec<&str> = pattern.split('*').collect();
    if segments.len() == 1 {
        return name == pattern;
    }
    let mut rest = name;
    for (i, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            continue;
        }
        if i == 0 {
            match rest.strip_prefix(seg) {
                Some(r) => rest = r,
                None => return false,
            }
        } else if i == segments.len() - 1 {
            return rest.ends_with(seg);
        } else {
            match rest.find(seg) {
                Some(pos) => rest = &rest[pos + seg.len()..],
                None => return false,
            }
        }
    }
    true
}

/// Pull the eta value out of names like `traj_eta0.05_seed3.csv`.
fn eta_tag(path: &Path) -> String {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    if let Some(pos) = name.find("eta") {
        let tail = &name[pos + 3..];
        let end = tail.find('_').unwrap_or(tail.len());
        let candidate = &tail[..end];
        if candidate.parse::<f64>().is_ok() {
            return candidate.to_string();
        }
    }
    "all".into()
}

fn read_series(path: &Path, field: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::usage(format!("{} is empty", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    let t_idx = columns
        .iter()
        .position(|&c| c == "t")
        .ok_or_else(|| CliError::usage(format!("{} lacks a t column", path.display())))?;
    let f_idx = columns.iter().position(|&c| c == field).ok_or_else(|| {
        CliError::usage(format!(
            "field {field:?} not in {} (columns: {})",
            path.display(),
            header
        ))
    })?;
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64, CliError> {
            cells
                .get(idx)
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::usage(format!(
                        "{}:{}: cannot parse column {idx}",
                        path.display(),
                        lineno + 2
                    ))
                })
        };
        out.push((parse(t_idx)?, parse(f_idx)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_matching() {
        assert!(glob_match("traj_eta0.05_seed3.csv", "traj_*.csv"));
        assert!(glob_match("traj_eta0.05_seed3.csv", "*eta0.05*"));
        assert!(glob_match("a.csv", "a.csv"));
        assert!(!glob_match("a.csv", "b*.csv"));
        assert!(!glob_match("traj.txt", "traj*.csv"));
        assert!(glob_match("xyz", "*"));
    }

    #[test]
    fn eta_tags() {
        assert_eq!(eta_tag(Path::new("out/traj_eta0.05_seed3.csv")), "0.05");
        assert_eq!(eta_tag(Path::new("traj_eta0.2_seed11.csv")), "0.2");
        assert_eq!(eta_tag(Path::new("whatever.csv")), "all");
        assert_eq!(eta_tag(Path::new("beta_test.csv")), "all");
    }

    #[test]
    fn seed_ranges() {
        let r = parse_seed_range("40").unwrap();
        assert_eq!((r.start, r.count), (0, 40));
        let r = parse_seed_range("10..50").unwrap();
        assert_eq!((r.start, r.count), (10, 40));
        assert!(parse_seed_range("5..5").is_err());
        assert!(parse_seed_range("x").is_err());
    }
}

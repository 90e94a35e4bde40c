use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use mfg_seqtest::agent::{
    integral_residual, solve_infinite_horizon, solve_value, solve_value_timechanged, ValueSurface,
};
use mfg_seqtest::equilibrium::{fixed_point, EquilibriumResult, InitialMeasure};
use mfg_seqtest::filtering::{logit, VolatilityCurve};
use mfg_seqtest::io;
use mfg_seqtest::model::{apply_override, check_assumptions, ProblemConfig};
use mfg_seqtest::population::{hitting_cdf_mc, hitting_cdf_pde, response_measure, TransformedBoundaries};

const EXIT_CONFIG: u8 = 1;
const EXIT_ASSUMPTION: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mfg-seqtest",
    version,
    about = "Mean field equilibria of Bayesian sequential testing"
)]
struct Cli {
    /// Only print warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config; a result.json written by this tool is also accepted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted `key=value` override applied after the file is read (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Monte Carlo seed, replacing `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory, created if absent.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Initial {
    Uniform,
    MassAtZero,
    MassAtHorizon,
}

impl From<Initial> for InitialMeasure {
    fn from(i: Initial) -> Self {
        match i {
            Initial::Uniform => InitialMeasure::Uniform,
            Initial::MassAtZero => InitialMeasure::MassAtZero,
            Initial::MassAtHorizon => InitialMeasure::MassAtHorizon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the standing assumptions and print the report as JSON.
    Check(Common),
    /// Solve the single-agent problem under the volatility induced by a fixed population measure.
    SolveAgent {
        #[command(flatten)]
        args: OutArgs,
        #[arg(long, value_enum, default_value = "uniform")]
        initial: Initial,
        /// Use this constant volatility instead of the induced one.
        #[arg(long)]
        eta: Option<f64>,
        /// Also write surface.csv, keeping every n-th node.
        #[arg(long)]
        surface_stride: Option<usize>,
    },
    /// Solve the stationary problem with constant volatility.
    SolveInfinite {
        #[command(flatten)]
        args: OutArgs,
        /// Volatility; defaults to the upper bound of the signal model.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Compute a mean field equilibrium by damped fixed-point iteration.
    Equilibrium {
        #[command(flatten)]
        args: OutArgs,
        #[arg(long, value_enum, default_value = "uniform")]
        initial: Initial,
        #[arg(long)]
        surface_stride: Option<usize>,
    },
    /// Run one equilibrium per value of a config key.
    Sweep {
        #[command(flatten)]
        args: OutArgs,
        /// Dotted config key, e.g. `signal.lambda1`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<String>,
        #[arg(long, value_enum, default_value = "uniform")]
        initial: Initial,
    },
    /// Compare the solver against its independent oracles for one induced volatility.
    CrossCheck {
        #[command(flatten)]
        args: OutArgs,
        #[arg(long, value_enum, default_value = "uniform")]
        initial: Initial,
    },
}

/// Error in the configuration, reported with exit code 1.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn read_config_value(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if value.get("loss").is_none() {
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
    }
    Ok(value)
}

fn load_config(common: &Common, extra: &[String]) -> Result<ProblemConfig> {
    let mut value = match &common.config {
        Some(path) => read_config_value(path)?,
        None => ProblemConfig::default().to_value(),
    };
    let seed = common.seed.map(|s| format!("mc.seed={s}"));
    for item in common.overrides.iter().chain(extra).chain(seed.as_ref()) {
        apply_override(&mut value, item).map_err(|e| ConfigError(e.to_string()))?;
    }
    ProblemConfig::from_value(value).map_err(|e| ConfigError(e.to_string()).into())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_surface_files(dir: &Path, surface: &ValueSurface, stride: Option<usize>) -> Result<()> {
    io::write_boundaries_csv(&dir.join("boundaries.csv"), &surface.boundaries)?;
    io::write_value_slice_csv(&dir.join("value_t0.csv"), surface, 0)?;
    if let Some(stride) = stride {
        io::write_surface_csv(&dir.join("surface.csv"), surface, stride)?;
    }
    Ok(())
}

fn induced_eta(cfg: &ProblemConfig, initial: Initial) -> Result<VolatilityCurve> {
    let mu = InitialMeasure::from(initial).build(cfg.horizon, cfg.grid.n_time)?;
    Ok(cfg.signal.volatility_curve(&mu, &cfg.mollifier()?)?)
}

fn run_check(common: &Common) -> Result<u8> {
    let cfg = load_config(common, &[])?;
    let report = check_assumptions(&cfg.loss, &cfg.signal, cfg.c);
    println!("{}", serde_json::to_string_pretty(&report)?);
    for v in &report.violations {
        log::warn!("{v}");
    }
    Ok(if report.all_hold() { 0 } else { EXIT_ASSUMPTION })
}

fn run_solve_agent(args: &OutArgs, initial: Initial, eta: Option<f64>, stride: Option<usize>) -> Result<u8> {
    let cfg = load_config(&args.common, &[])?;
    create_dir(&args.out)?;
    let curve = match eta {
        Some(e) => VolatilityCurve::constant(e, cfg.horizon, cfg.grid.n_time)?,
        None => induced_eta(&cfg, initial)?,
    };
    let surface = solve_value(&curve, &cfg.loss, cfg.c, cfg.horizon, &cfg.grid)?;
    write_surface_files(&args.out, &surface, stride)?;
    let response = response_measure(&surface, &curve, cfg.prior, &cfg.mc)?;
    io::write_cdfs_csv(&args.out.join("cdfs.csv"), &response)?;
    write_json(
        &args.out.join("result.json"),
        &json!({
            "config": cfg,
            "value_at_prior": surface.value_at(0.0, cfg.prior),
            "eta": { "t": curve.times(), "eta": curve.values() },
        }),
    )?;
    log::info!("V(0, {}) = {:.6}", cfg.prior, surface.value_at(0.0, cfg.prior));
    Ok(0)
}

fn run_solve_infinite(args: &OutArgs, eta: Option<f64>) -> Result<u8> {
    let cfg = load_config(&args.common, &[])?;
    create_dir(&args.out)?;
    let eta = eta.unwrap_or_else(|| cfg.signal.upper_bound());
    let sol = solve_infinite_horizon(eta, &cfg.loss, cfg.c, cfg.grid.n_space)?;
    log::info!("b = {:.6}, B = {:.6}", sol.lower, sol.upper);
    write_json(
        &args.out.join("result.json"),
        &json!({ "config": cfg, "solution": sol }),
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct EquilibriumSummary<'a> {
    config: &'a ProblemConfig,
    seed: u64,
    converged: bool,
    iterations: usize,
    initial_distance: f64,
    distances: &'a [f64],
    boundary_distances: &'a [f64],
    value_at_prior: f64,
}

fn write_equilibrium(dir: &Path, r: &EquilibriumResult, stride: Option<usize>) -> Result<()> {
    create_dir(dir)?;
    write_surface_files(dir, r.surface(), stride)?;
    io::write_cdfs_csv(&dir.join("cdfs.csv"), &r.phi.response)?;
    let summary = EquilibriumSummary {
        config: &r.config,
        seed: r.seed,
        converged: r.converged,
        iterations: r.iterations,
        initial_distance: r.initial_distance,
        distances: &r.distances,
        boundary_distances: &r.boundary_distances,
        value_at_prior: r.value_at_prior(),
    };
    write_json(&dir.join("result.json"), &summary)
}

fn solve_equilibrium(cfg: &ProblemConfig, initial: Initial) -> Result<EquilibriumResult> {
    let mu = InitialMeasure::from(initial).build(cfg.horizon, cfg.grid.n_time)?;
    let r = fixed_point(mu, cfg)?;
    if r.converged {
        log::info!(
            "converged after {} iterations, V(0, prior) = {:.6}",
            r.iterations,
            r.value_at_prior()
        );
    } else {
        log::warn!("no convergence after {} iterations", r.iterations);
    }
    Ok(r)
}

fn run_equilibrium(args: &OutArgs, initial: Initial, stride: Option<usize>) -> Result<u8> {
    let cfg = load_config(&args.common, &[])?;
    let r = solve_equilibrium(&cfg, initial)?;
    write_equilibrium(&args.out, &r, stride)?;
    Ok(if r.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn run_sweep(args: &OutArgs, param: &str, values: &[String], initial: Initial) -> Result<u8> {
    let configs: Vec<(String, ProblemConfig)> = values
        .iter()
        .map(|v| Ok((v.clone(), load_config(&args.common, &[format!("{param}={v}")])?)))
        .collect::<Result<_>>()?;
    create_dir(&args.out)?;
    let entries: Vec<Value> = configs
        .par_iter()
        .map(|(v, cfg)| -> Result<Value> {
            let name = format!("{param}={v}");
            let r = solve_equilibrium(cfg, initial)?;
            write_equilibrium(&args.out.join(&name), &r, None)?;
            Ok(json!({
                "value": serde_json::from_str::<Value>(v).unwrap_or_else(|_| Value::String(v.clone())),
                "dir": name,
                "converged": r.converged,
                "iterations": r.iterations,
                "value_at_prior": r.value_at_prior(),
            }))
        })
        .collect::<Result<_>>()?;
    let all = entries.iter().all(|e| e["converged"] == json!(true));
    write_json(
        &args.out.join("manifest.json"),
        &json!({ "param": param, "entries": entries }),
    )?;
    Ok(if all { 0 } else { EXIT_NOT_CONVERGED })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_cross_check(args: &OutArgs, initial: Initial) -> Result<u8> {
    let cfg = load_config(&args.common, &[])?;
    create_dir(&args.out)?;
    let eta = induced_eta(&cfg, initial)?;
    let surface = solve_value(&eta, &cfg.loss, cfg.c, cfg.horizon, &cfg.grid)?;
    let b = &surface.boundaries;

    let changed = solve_value_timechanged(&eta, &cfg.loss, cfg.c, cfg.horizon, &cfg.grid)?;
    let mut tc: f64 = 0.0;
    for k in (0..surface.n_times()).filter(|&k| surface.times[k] <= cfg.horizon - 0.1) {
        for i in (0..surface.n_space()).filter(|&i| (0.05..=0.95).contains(&surface.pis[i])) {
            tc = tc.max((surface.value(k, i) - changed.value(k, i)).abs());
        }
    }

    let band = if cfg.loss.is_smooth() && cfg.loss.is_symmetric() {
        match solve_infinite_horizon(cfg.signal.upper_bound(), &cfg.loss, cfg.c, cfg.grid.n_space) {
            Ok(sol) => {
                let below = b.lower.iter().map(|x| sol.lower - x).fold(f64::NEG_INFINITY, f64::max);
                let above = b.upper.iter().map(|x| x - sol.upper).fold(f64::NEG_INFINITY, f64::max);
                json!({ "lower": sol.lower, "upper": sol.upper, "max_excess": below.max(above) })
            }
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };

    let residual = integral_residual(b, &eta, &cfg.loss, cfg.c, 0.0, cfg.mc.paths, cfg.mc.dt, cfg.mc.seed)?;

    let tb = TransformedBoundaries::from_boundaries(b);
    let l0 = logit(cfg.prior)?;
    let mut hitting = Vec::new();
    for theta in [0u8, 1] {
        let mc = hitting_cdf_mc(&tb, &eta, l0, theta, cfg.mc.paths, cfg.mc.dt, cfg.mc.seed)?;
        match hitting_cdf_pde(&tb, &eta, l0, theta, 400, 2000) {
            Ok(pde) => hitting.push(json!({
                "theta": theta,
                "kolmogorov_distance": sup_diff(&mc, &pde.cdf),
                "pde_mass_error": pde.max_mass_error,
            })),
            Err(e) => hitting.push(json!({ "theta": theta, "error": e.to_string() })),
        }
    }

    let report = json!({
        "config": cfg,
        "time_change_sup_difference": tc,
        "stationary_band": band,
        "integral_residual": residual,
        "hitting_cdf": hitting,
    });
    write_json(&args.out.join("cross_check.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check(common) => run_check(&common),
        Command::SolveAgent {
            args,
            initial,
            eta,
            surface_stride,
        } => run_solve_agent(&args, initial, eta, surface_stride),
        Command::SolveInfinite { args, eta } => run_solve_infinite(&args, eta),
        Command::Equilibrium {
            args,
            initial,
            surface_stride,
        } => run_equilibrium(&args, initial, surface_stride),
        Command::Sweep {
            args,
            param,
            values,
            initial,
        } => run_sweep(&args, &param, &values, initial),
        Command::CrossCheck { args, initial } => run_cross_check(&args, initial),
    }
}

fn init_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("MFG_SEQTEST_THREADS") {
        let n: usize = raw.parse().with_context(|| format!("MFG_SEQTEST_THREADS={raw}"))?;
        if n == 0 {
            bail!("MFG_SEQTEST_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = init_threads().and_then(|_| run(cli));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("config error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

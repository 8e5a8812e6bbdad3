//! `shadowlab` command-line driver.
//!
//! Exit codes: 0 tracked / consistent, 1 I/O failure, 2 usage or invalid
//! input, 3 certified failure, 4 inconclusive or uncertified failure,
//! 5 inconsistent experiment.

mod parse;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use shadowlab::experiments::{
    run_named, Conclusion, ExperimentReport, GalleryConfig, Overrides, RunOptions, DEFAULT_SEED,
};
use shadowlab::orbits::{orbit_points, write_orbit_csv};
use shadowlab::shadowing::{check_property, Outcome, Property, SearchConfig};

const THREADS_ENV: &str = "SHADOWLAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "shadowlab",
    version,
    about = "Finite-horizon shadowing experiments on the circle and 2-torus"
)]
struct Cli {
    /// Worker threads for grid searches (overridden by SHADOWLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the orbit f^k(x), -N <= k <= N, as CSV.
    Orbit(OrbitArgs),
    /// Search for a tracking point for one property.
    Check(CheckArgs),
    /// Run a named experiment and report against the expectation table.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct OrbitArgs {
    /// cat, shear, identity, rotation:THETA, linear:a,b,c,d, JSON or @file.
    #[arg(long)]
    system: String,
    /// Anchor point, `x` or `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long = "N")]
    horizon: usize,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// direct, inverse, weak or orbital.
    property: String,
    #[arg(long)]
    system: String,
    /// same, translate:D, rotation:+D, perturb:shear-sin:D[:SEED], random:D, map:SYSTEM or JSON.
    #[arg(long, default_value = "same", allow_hyphen_values = true)]
    method: String,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long)]
    eps: f64,
    #[arg(long = "N")]
    horizon: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// prop33, prop34, prop35, rotation-dichotomy or theorem-gallery.
    name: String,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "N")]
    horizon: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Gallery configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for CSV dumps of target and witness orbits.
    #[arg(long)]
    dump_orbits: Option<PathBuf>,
    /// Include wall-clock timings (output is then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn io_failure(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn core_failure(error: shadowlab::Error) -> Failure {
    match error {
        shadowlab::Error::Io(_) => io_failure(error.into()),
        other => usage(other.into()),
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))
                .map_err(usage)?,
        ),
        _ => None,
    };
    if let Some(n) = from_env.or(flag) {
        if n == 0 {
            return Err(usage(anyhow::anyhow!("thread count must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")
            .map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_orbit(args: &OrbitArgs) -> Result<u8, Failure> {
    let f = parse::system(&args.system).map_err(usage)?;
    let x = parse::point(&args.x).map_err(usage)?;
    if x.dim() != f.dim() {
        return Err(usage(anyhow::anyhow!(
            "--x has dimension {}, system has {}",
            x.dim(),
            f.dim()
        )));
    }
    let points = orbit_points(&f, &x, args.horizon);
    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))
                .map_err(io_failure)?;
            write_orbit_csv(&points, file).map_err(core_failure)?;
        }
        None => write_orbit_csv(&points, io::stdout().lock()).map_err(core_failure)?,
    }
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> Result<u8, Failure> {
    let property: Property = args.property.parse().map_err(|e: shadowlab::Error| usage(e.into()))?;
    let f = parse::system(&args.system).map_err(usage)?;
    let method = parse::method(&args.method, &f, args.seed).map_err(usage)?;
    let x = parse::point(&args.x).map_err(usage)?;
    if args.grid < 2 {
        return Err(usage(anyhow::anyhow!("--grid needs at least 2 points per axis")));
    }
    let config = SearchConfig::with_grid_step(1.0 / args.grid as f64);
    let verdict = check_property(property, &f, &method, &x, args.eps, args.horizon, &config).map_err(core_failure)?;
    emit_json(&verdict, args.out.as_deref()).map_err(io_failure)?;
    Ok(match verdict.outcome {
        Outcome::Tracked { .. } => 0,
        Outcome::Failed { certified: true, .. } => 3,
        _ => 4,
    })
}

fn dump_orbits(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for dump in &report.orbit_dumps {
        let path = dir.join(format!("{}-{}.csv", report.name, dump.name));
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_orbit_csv(&dump.points, file)?;
    }
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<u8, Failure> {
    let gallery = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            Some(
                serde_json::from_str::<GalleryConfig>(&text)
                    .with_context(|| format!("parsing gallery config {}", path.display()))
                    .map_err(usage)?,
            )
        }
        None => None,
    };
    let overrides = Overrides {
        delta: args.delta,
        eps: args.eps,
        horizon: args.horizon,
        grid: args.grid,
        theta: args.theta,
    };
    let options = RunOptions {
        seed: args.seed,
        timings: args.timings,
    };
    let report = run_named(&args.name, &overrides, gallery.as_ref(), &options).map_err(core_failure)?;
    emit_json(&report, args.out.as_deref()).map_err(io_failure)?;
    if let Some(dir) = &args.dump_orbits {
        dump_orbits(&report, dir).map_err(io_failure)?;
    }
    Ok(match report.conclusion {
        Conclusion::ConsistentWithPaper => 0,
        Conclusion::Inconclusive => 4,
        Conclusion::Inconsistent => 5,
    })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Orbit(a) => cmd_orbit(a),
        Command::Check(a) => cmd_check(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

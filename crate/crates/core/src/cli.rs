//! `fswe` command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{apply_seed_override, load_config, SEED_ENV};
use crate::error::Error;
use crate::experiments::{fbm_statistics, strong_errors, ExperimentConfig, Harness};
use crate::report::{convergence_csv, convergence_pretty, solution_body, RunManifest};
use crate::stepper::Stepper;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_STATISTICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fswe", version, about = "Fractional stochastic wave equation solver and convergence harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo strong-error table; writes convergence.csv.
    Convergence {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides `workers` from the config.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Checks simulated FBM covariances against the exact law.
    FbmCheck {
        #[arg(long)]
        hurst: f64,
        /// Number of positive grid times.
        #[arg(long, default_value_t = 16)]
        grid_size: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0.2)]
        final_time: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Solves one trajectory at the finest resolution; writes solution.csv.
    Solve {
        config: PathBuf,
        /// Record every k-th step (default: final state only).
        #[arg(long)]
        snapshot_every: Option<usize>,
        #[arg(long, default_value_t = 0)]
        trajectory: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, i32> {
    let mut cfg = load_config(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    let env = std::env::var(SEED_ENV).ok();
    apply_seed_override(&mut cfg, env.as_deref()).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<(), i32> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_RUNTIME
    })
}

fn runtime(e: Error) -> i32 {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => EXIT_INVALID,
        _ => EXIT_RUNTIME,
    }
}

fn cmd_convergence(config: &Path, out: &Path, workers: Option<usize>) -> Result<(), i32> {
    let mut cfg = load(config)?;
    if workers.is_some() {
        cfg.workers = workers;
        cfg.validate().map_err(runtime)?;
    }
    let start = Instant::now();
    let table = strong_errors(&cfg).map_err(runtime)?;
    let manifest = RunManifest::new(&cfg, start.elapsed(), table.rows.iter().map(|r| r.stderr).collect());
    write(&out.join("convergence.csv"), &convergence_csv(&table, &manifest))?;
    print!("{}", convergence_pretty(&table));
    Ok(())
}

fn cmd_fbm_check(hurst: f64, grid_size: usize, paths: usize, final_time: f64, seed: u64) -> Result<(), i32> {
    if !(hurst > 0.0 && hurst < 1.0) {
        eprintln!("error: --hurst must lie in (0, 1), got {hurst}");
        return Err(EXIT_INVALID);
    }
    if grid_size == 0 || paths < 2 || final_time <= 0.0 || !final_time.is_finite() {
        eprintln!("error: need grid-size ≥ 1, paths ≥ 2 and a positive final time");
        return Err(EXIT_INVALID);
    }
    let r = fbm_statistics(hurst, grid_size, paths, final_time, seed).map_err(runtime)?;
    println!("H = {hurst}, {paths} paths, {grid_size} grid points on (0, {final_time}]");
    println!(
        "max |sample cov - exact| = {:.3} standard errors at ({}, {})",
        r.max_z, r.worst_entry.0, r.worst_entry.1
    );
    println!("max variance deviation  = {:.3} standard errors", r.max_variance_z);
    let corr: Vec<String> = r.increment_correlations.iter().map(|c| format!("{c:.4}")).collect();
    println!("consecutive increment correlations: [{}]", corr.join(", "));
    println!("exact consecutive increment correlation: {:.4}", 2f64.powf(2.0 * hurst - 1.0) - 1.0);
    if r.covariance_passes() {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(EXIT_STATISTICAL)
    }
}

fn cmd_solve(config: &Path, snapshot_every: Option<usize>, trajectory: usize, out: &Path) -> Result<(), i32> {
    let mut cfg = load(config)?;
    let n = cfg.finest_steps();
    cfg.step_counts = vec![n];
    let every = snapshot_every.unwrap_or(n);
    if every == 0 {
        eprintln!("error: --snapshot-every must be positive");
        return Err(EXIT_INVALID);
    }
    let start = Instant::now();
    let harness = Harness::new(&cfg).map_err(runtime)?;
    let noise = harness.sample_noise(trajectory).map_err(runtime)?;
    let scheme = crate::stepper::SchemeConfig::new(cfg.alpha, cfg.final_time, n, cfg.modes, cfg.drift)
        .map_err(runtime)?;
    let solution = Stepper::new(harness.basis(), scheme)
        .and_then(|mut s| s.solve(&noise, &cfg.initial_state(), Some(every)))
        .map_err(runtime)?;
    let manifest = RunManifest::new(&cfg, start.elapsed(), Vec::new());
    let body = solution_body(harness.basis(), &solution, scheme.tau);
    write(&out.join("solution.csv"), &format!("{}{body}", manifest.header()))?;
    println!(
        "solved trajectory {trajectory}: {n} steps, {} snapshots, ||u(T)|| = {:.6e}",
        solution.snapshots.len(),
        solution.final_state.u.l2_norm()
    );
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Convergence { config, out, workers } => cmd_convergence(&config, &out, workers),
        Command::FbmCheck { hurst, grid_size, paths, final_time, seed } => {
            cmd_fbm_check(hurst, grid_size, paths, final_time, seed)
        }
        Command::Solve { config, snapshot_every, trajectory, out } => {
            cmd_solve(&config, snapshot_every, trajectory, &out)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

//! CSV and console output.

use std::fmt::Write as _;
use std::time::Duration;

use crate::config::to_text;
use crate::experiments::{ErrorTable, ExperimentConfig};
use crate::spectral::SineBasis;
use crate::stepper::Solution;

pub const CONVERGENCE_HEADER: &str = "N,error,stderr,rate,predicted_rate,kappa";
pub const SOLUTION_HEADER: &str = "t,x,u";

#[inline]
fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Reproducibility metadata written as `#` comment lines above a CSV body.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub wall_clock: Duration,
    /// Jackknife standard error per table row, if any.
    pub jackknife: Vec<f64>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, wall_clock: Duration, jackknife: Vec<f64>) -> Self {
        Self { config: config.clone(), version: crate::VERSION, wall_clock, jackknife }
    }

    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fswe {}", self.version);
        let _ = writeln!(s, "# base_seed = {}", self.config.base_seed);
        for line in to_text(&self.config).lines() {
            let _ = writeln!(s, "# config: {line}");
        }
        if !self.jackknife.is_empty() {
            let v: Vec<String> = self.jackknife.iter().map(|x| num(*x)).collect();
            let _ = writeln!(s, "# jackknife_stderr = {}", v.join(";"));
        }
        let _ = writeln!(s, "# wall_clock_seconds = {:.3}", self.wall_clock.as_secs_f64());
        s
    }
}

/// Column header and data rows, with no manifest.
pub fn convergence_body(table: &ErrorTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CONVERGENCE_HEADER}");
    let (pred, kappa) = match table.kappa {
        Some(k) => (num(k.predicted_rate), num(k.kappa)),
        None => (String::new(), String::new()),
    };
    for r in &table.rows {
        let rate = r.rate.map(num).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{},{}", r.steps, num(r.error), num(r.stderr), rate, pred, kappa);
    }
    s
}

pub fn convergence_csv(table: &ErrorTable, manifest: &RunManifest) -> String {
    format!("{}{}", manifest.header(), convergence_body(table))
}

/// Human-readable table in the layout `N | error | rate`.
pub fn convergence_pretty(table: &ErrorTable) -> String {
    let mut s = String::new();
    let c = &table.config;
    let noise = match &c.noise {
        crate::experiments::NoiseModel::Decay(sigma) => format!("sqrt(q_i) = lambda_i^-{sigma}"),
        crate::experiments::NoiseModel::Explicit(_) => "explicit q".to_string(),
    };
    let _ = writeln!(
        s,
        "alpha = {}, H = {}, T = {}, {noise}, modes = {}, trajectories = {}",
        c.alpha, c.hurst, c.final_time, c.modes, c.trajectories
    );
    if let Some(k) = table.kappa {
        let _ = writeln!(s, "kappa = {:.4}, predicted rate = {:.4}", k.kappa, k.predicted_rate);
    }
    let _ = writeln!(s, "{:>6}  {:>12}  {:>10}  {:>7}", "N", "error", "stderr", "rate");
    for r in &table.rows {
        let rate = r.rate.map(|x| format!("{x:.3}")).unwrap_or_default();
        let _ = writeln!(s, "{:>6}  {:>12.4e}  {:>10.2e}  {:>7}", r.steps, r.error, r.stderr, rate);
    }
    s
}

/// `t,x,u` rows at the collocation nodes for every recorded state.
pub fn solution_body(basis: &SineBasis, solution: &Solution, tau: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SOLUTION_HEADER}");
    let nodes = basis.grid().nodes();
    let states: Vec<(usize, &crate::stepper::PairState)> = if solution.snapshots.is_empty() {
        vec![(usize::MAX, &solution.final_state)]
    } else {
        solution.snapshots.iter().map(|(j, st)| (*j, st)).collect()
    };
    for (j, st) in states {
        let t = if j == usize::MAX { f64::NAN } else { j as f64 * tau };
        let values = basis.evaluate(&st.u).expect("state matches basis");
        for (x, u) in nodes.iter().zip(values) {
            let _ = writeln!(s, "{},{},{}", num(t), num(*x), num(u));
        }
    }
    s
}

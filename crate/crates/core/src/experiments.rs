//! Monte Carlo strong-error estimation with coupled dyadic refinement.
//!
//! For each trajectory one noise ensemble is drawn on the finest grid and
//! restricted to every coarser grid, so `u_N` and `u_{2N}` see the same
//! Brownian path. The error at level `N` is
//! `e_N = sqrt(mean_traj ‖u_N(T) − u_{2N}(T)‖²)` and the observed rate is
//! `log2(e_N / e_{2N})`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbm::{build_factor, CovarianceFactor, HurstParameter, TimeGrid};
use crate::noise::{restrict_ensemble, sample_field, ModalFbmEnsemble, NoiseSpec};
use crate::rng::{GaussianStream, SeededStream};
use crate::spectral::{ModalVector, SineBasis};
use crate::stepper::{Drift, PairState, SchemeConfig, Stepper};

/// How the covariance operator of the noise is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// `√q_i = λ_i^{−σ}`.
    Decay(f64),
    /// Explicit `q_i` for the leading modes; the rest are zero.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub hurst: f64,
    pub noise: NoiseModel,
    pub final_time: f64,
    /// Strictly doubling, e.g. `[4, 8, 16, 32]`.
    pub step_counts: Vec<usize>,
    pub modes: usize,
    pub trajectories: usize,
    pub base_seed: u64,
    pub drift: Drift,
    /// `(mode, coefficient)` pairs, 1-based modes.
    pub u0: Vec<(usize, f64)>,
    pub v0: Vec<(usize, f64)>,
    /// `None` uses the available parallelism.
    pub workers: Option<usize>,
}

/// Mode count used by the stock experiment configurations.
pub const DEFAULT_MODES: usize = 2047;
pub const DEFAULT_TRAJECTORIES: usize = 500;

impl ExperimentConfig {
    /// The test problem `ü + A^α u = cos u + u + Ḃ` on `(0, 1) × (0, 0.2]` with
    /// `u(0) = (√2/4) sin(πx)` and `u̇(0) = (√2/2) sin(3πx)`.
    pub fn reference_problem(alpha: f64, hurst: f64, sigma: f64) -> Self {
        Self {
            alpha,
            hurst,
            noise: NoiseModel::Decay(sigma),
            final_time: 0.2,
            step_counts: vec![4, 8, 16, 32],
            modes: DEFAULT_MODES,
            trajectories: DEFAULT_TRAJECTORIES,
            base_seed: 20_240_917,
            drift: Drift::Paper,
            u0: vec![(1, 0.25)],
            v0: vec![(3, 0.5)],
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return cfg(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        HurstParameter::new(self.hurst).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return cfg(format!("T must be positive, got {}", self.final_time));
        }
        if self.step_counts.is_empty() || self.step_counts[0] == 0 {
            return cfg("steps must be a non-empty list of positive counts".into());
        }
        if let Some(w) = self.step_counts.windows(2).find(|w| w[1] != 2 * w[0]) {
            return cfg(format!("steps must double at each level, got {} then {}", w[0], w[1]));
        }
        if self.modes == 0 {
            return cfg("modes must be positive".into());
        }
        if self.trajectories == 0 {
            return cfg("trajectories must be at least 1".into());
        }
        if self.workers == Some(0) {
            return cfg("workers must be at least 1".into());
        }
        match &self.noise {
            NoiseModel::Decay(s) if !(s.is_finite() && *s >= 0.0) => {
                return cfg(format!("sigma must be ≥ 0, got {s}"));
            }
            NoiseModel::Explicit(q) if q.len() > self.modes => {
                return cfg(format!("q lists {} modes but only {} are resolved", q.len(), self.modes));
            }
            NoiseModel::Explicit(q) if q.iter().any(|x| !(x.is_finite() && *x >= 0.0)) => {
                return cfg("q entries must be finite and non-negative".into());
            }
            _ => {}
        }
        for (name, list) in [("u0", &self.u0), ("v0", &self.v0)] {
            if let Some((i, _)) = list.iter().find(|(i, _)| *i == 0 || *i > self.modes) {
                return cfg(format!("{name} refers to mode {i} outside 1..={}", self.modes));
            }
            if list.iter().any(|(_, c)| !c.is_finite()) {
                return cfg(format!("{name} has a non-finite coefficient"));
            }
        }
        Ok(())
    }

    pub fn hurst_parameter(&self) -> Result<HurstParameter> {
        HurstParameter::new(self.hurst)
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        let h = self.hurst_parameter()?;
        match &self.noise {
            NoiseModel::Decay(s) => NoiseSpec::power_law(self.modes, *s, h),
            NoiseModel::Explicit(q) => {
                let mut full = q.clone();
                full.resize(self.modes, 0.0);
                NoiseSpec::explicit(&full, h)
            }
        }
    }

    pub fn initial_state(&self) -> PairState {
        let build = |list: &[(usize, f64)]| {
            let mut v = ModalVector::zeros(self.modes);
            for &(i, c) in list {
                v.coeffs_mut()[i - 1] += c;
            }
            v
        };
        PairState { u: build(&self.u0), v: build(&self.v0) }
    }

    pub fn finest_steps(&self) -> usize {
        *self.step_counts.last().expect("validated non-empty")
    }

    /// κ bookkeeping, available for power-law noise only.
    pub fn kappa(&self) -> Option<KappaLabel> {
        match self.noise {
            NoiseModel::Decay(s) => Some(kappa_label(self.alpha, self.hurst, s)),
            NoiseModel::Explicit(_) => None,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            b = b.num_threads(w);
        }
        b.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

/// Spatial regularity index and the strong order it predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaLabel {
    pub kappa: f64,
    pub predicted_rate: f64,
}

/// `κ = α/2 + Hα + 2ρ` with `ρ = σ − 1/4`, the supremum of the admissible
/// `ρ` for `√q_i = λ_i^{−σ}` in one dimension (`Σ i^{4ρ−4σ} < ∞`).
/// The predicted strong order is `min{κ/α, H + 1/2}`.
///
/// This is a derived label for the table, not a measured quantity.
pub fn kappa_label(alpha: f64, hurst: f64, sigma: f64) -> KappaLabel {
    let rho = sigma - 0.25;
    let kappa = 0.5 * alpha + hurst * alpha + 2.0 * rho;
    KappaLabel { kappa, predicted_rate: (kappa / alpha).min(hurst + 0.5) }
}

/// `log2(e_k / e_{k+1})` for consecutive entries.
pub fn rates_from_errors(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Everything that is shared by all trajectories of one experiment.
pub struct Harness {
    config: ExperimentConfig,
    basis: SineBasis,
    spec: NoiseSpec,
    fine_grid: TimeGrid,
    factor: CovarianceFactor,
    grids: Vec<TimeGrid>,
    schemes: Vec<SchemeConfig>,
    initial: PairState,
}

impl Harness {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let h = config.hurst_parameter()?;
        let basis = SineBasis::new(config.modes)?;
        let spec = config.noise_spec()?;
        let grids = config
            .step_counts
            .iter()
            .map(|&n| TimeGrid::uniform(config.final_time, n))
            .collect::<Result<Vec<_>>>()?;
        let fine_grid = grids.last().expect("validated").clone();
        let factor = build_factor(&fine_grid, h)?;
        let schemes = config
            .step_counts
            .iter()
            .map(|&n| SchemeConfig::new(config.alpha, config.final_time, n, config.modes, config.drift))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            basis,
            spec,
            fine_grid,
            factor,
            grids,
            schemes,
            initial: config.initial_state(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn basis(&self) -> &SineBasis {
        &self.basis
    }

    pub fn factor(&self) -> &CovarianceFactor {
        &self.factor
    }

    pub fn grids(&self) -> &[TimeGrid] {
        &self.grids
    }

    /// Noise on the finest grid for one trajectory.
    pub fn sample_noise(&self, trajectory: usize) -> Result<ModalFbmEnsemble> {
        let stream = SeededStream::for_trajectory(self.config.base_seed, trajectory);
        self.sample_noise_from(&stream)
    }

    pub fn sample_noise_from(&self, stream: &dyn GaussianStream) -> Result<ModalFbmEnsemble> {
        sample_field(&self.spec, &self.fine_grid, &self.factor, stream)
    }

    /// The fine ensemble restricted to each resolution, coarsest first.
    pub fn coupled_ensembles(&self, fine: &ModalFbmEnsemble) -> Result<Vec<ModalFbmEnsemble>> {
        self.grids.iter().map(|g| restrict_ensemble(fine, g)).collect()
    }

    fn steppers(&self) -> Result<Vec<Stepper<'_>>> {
        self.schemes.iter().map(|s| Stepper::new(&self.basis, *s)).collect()
    }

    /// `u(T)` at every resolution, driven by one shared noise path.
    pub fn run_trajectory(&self, trajectory: usize) -> Result<Vec<ModalVector>> {
        self.run_with(&mut self.steppers()?, trajectory)
    }

    fn run_with(&self, steppers: &mut [Stepper<'_>], trajectory: usize) -> Result<Vec<ModalVector>> {
        let wrap = |e: Error| Error::Trajectory { index: trajectory, source: Box::new(e) };
        let fine = self.sample_noise(trajectory).map_err(wrap)?;
        let mut out = Vec::with_capacity(steppers.len());
        for (stepper, grid) in steppers.iter_mut().zip(&self.grids) {
            let ensemble = restrict_ensemble(&fine, grid).map_err(wrap)?;
            let sol = stepper.solve(&ensemble, &self.initial, None).map_err(wrap)?;
            out.push(sol.final_state.u);
        }
        Ok(out)
    }

    /// Maps every trajectory through `work` on the worker pool and returns the
    /// results in trajectory order.
    fn map_trajectories<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut Vec<Stepper<'_>>, usize) -> Result<T> + Sync,
    {
        let pool = self.config.pool()?;
        pool.install(|| {
            (0..self.config.trajectories)
                .into_par_iter()
                .map_init(|| self.steppers(), |st, i| match st {
                    Ok(st) => work(st, i),
                    Err(e) => Err(e.clone()),
                })
                .collect()
        })
    }
}

fn squared_distance(a: &ModalVector, b: &ModalVector) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Root-mean-square estimate and its jackknife standard error.
pub fn rms_with_jackknife(samples: &[f64]) -> (f64, f64) {
    let m = samples.len();
    let total: f64 = samples.iter().sum();
    let rms = (total / m as f64).sqrt();
    if m < 2 {
        return (rms, f64::NAN);
    }
    let loo: Vec<f64> = samples.iter().map(|d| ((total - d) / (m - 1) as f64).max(0.0).sqrt()).collect();
    let mean = loo.iter().sum::<f64>() / m as f64;
    let var = loo.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() * (m - 1) as f64 / m as f64;
    (rms, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    /// Coarse step count `N` of the pair `(N, 2N)`.
    pub steps: usize,
    pub error: f64,
    pub stderr: f64,
    /// `log2(e_{N/2} / e_N)`; absent on the first row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    pub kappa: Option<KappaLabel>,
    pub config: ExperimentConfig,
}

impl ErrorTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// Runs the Monte Carlo experiment and tabulates errors and rates.
pub fn strong_errors(config: &ExperimentConfig) -> Result<ErrorTable> {
    if config.trajectories < 2 {
        return Err(Error::Config("strong error estimation needs at least 2 trajectories".into()));
    }
    if config.step_counts.len() < 2 {
        return Err(Error::Config("strong error estimation needs at least 2 step counts".into()));
    }
    let harness = Harness::new(config)?;
    let per_traj = harness.map_trajectories(|st, i| {
        let finals = harness.run_with(st, i)?;
        Ok(finals.windows(2).map(|w| squared_distance(&w[0], &w[1])).collect::<Vec<f64>>())
    })?;

    let levels = config.step_counts.len() - 1;
    let mut rows = Vec::with_capacity(levels);
    let mut column = vec![0.0; per_traj.len()];
    for level in 0..levels {
        for (c, d) in column.iter_mut().zip(&per_traj) {
            *c = d[level];
        }
        let (error, stderr) = rms_with_jackknife(&column);
        let rate = rows.last().map(|prev: &ErrorRow| (prev.error / error).log2());
        rows.push(ErrorRow { steps: config.step_counts[level], error, stderr, rate });
    }
    Ok(ErrorTable { rows, kappa: config.kappa(), config: config.clone() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    /// Least-squares slope of `ln E‖u(t) − u(s)‖²` against `ln(t − s)`.
    pub exponent: f64,
    pub gaps: Vec<f64>,
    pub mean_square: Vec<f64>,
}

fn grid_index(t: f64, tau: f64, n: usize) -> Result<usize> {
    let x = t / tau;
    let j = x.round();
    if (x - j).abs() > 1e-9 || j < 0.0 || j as usize > n {
        return Err(Error::Argument(format!("time {t} is not a point of the reference grid")));
    }
    Ok(j as usize)
}

/// Estimates the mean-square Hölder exponent of `u` from a reference solve at
/// the finest configured resolution. `time_pairs` are `(s, t)` with `s < t`
/// on that grid; pairs sharing a gap are averaged.
pub fn holder_probe(config: &ExperimentConfig, time_pairs: &[(f64, f64)]) -> Result<HolderEstimate> {
    let mut reference = config.clone();
    reference.step_counts = vec![config.finest_steps()];
    let harness = Harness::new(&reference)?;
    let n = reference.step_counts[0];
    let tau = config.final_time / n as f64;

    let mut pairs = Vec::with_capacity(time_pairs.len());
    for &(s, t) in time_pairs {
        let (js, jt) = (grid_index(s, tau, n)?, grid_index(t, tau, n)?);
        if js >= jt {
            return Err(Error::Argument(format!("pair ({s}, {t}) must satisfy s < t")));
        }
        pairs.push((js, jt));
    }
    let mut gap_steps: Vec<usize> = pairs.iter().map(|(a, b)| b - a).collect();
    gap_steps.sort_unstable();
    gap_steps.dedup();
    if gap_steps.len() < 3 {
        return Err(Error::Argument(format!(
            "need at least 3 distinct gaps, got {}",
            gap_steps.len()
        )));
    }

    let initial = reference.initial_state();
    let per_traj = harness.map_trajectories(|st, i| {
        let wrap = |e: Error| Error::Trajectory { index: i, source: Box::new(e) };
        let noise = harness.sample_noise(i).map_err(wrap)?;
        let sol = st[0].solve(&noise, &initial, Some(1)).map_err(wrap)?;
        let at = |j: usize| if j == 0 { &initial.u } else { &sol.snapshots[j - 1].1.u };
        Ok(pairs.iter().map(|&(a, b)| squared_distance(at(a), at(b))).collect::<Vec<f64>>())
    })?;

    let m = per_traj.len() as f64;
    let mut gaps = Vec::with_capacity(gap_steps.len());
    let mut mean_square = Vec::with_capacity(gap_steps.len());
    for &g in &gap_steps {
        let mut acc = 0.0;
        let mut count = 0usize;
        for (p, &(a, b)) in pairs.iter().enumerate() {
            if b - a == g {
                acc += per_traj.iter().map(|d| d[p]).sum::<f64>() / m;
                count += 1;
            }
        }
        gaps.push(g as f64 * tau);
        mean_square.push(acc / count as f64);
    }
    let xs: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = mean_square.iter().map(|v| v.ln()).collect();
    Ok(HolderEstimate { exponent: least_squares_slope(&xs, &ys), gaps, mean_square })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Sample statistics of simulated FBM against the exact covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmCheckReport {
    pub hurst: f64,
    pub paths: usize,
    /// Positive grid times.
    pub times: Vec<f64>,
    /// Largest `|ĉ_jk − Σ_jk| / se_jk` over all entries.
    pub max_z: f64,
    pub worst_entry: (usize, usize),
    pub max_variance_z: f64,
    /// Sample correlation of consecutive increments `(ΔX_j, ΔX_{j+1})`.
    pub increment_correlations: Vec<f64>,
}

impl FbmCheckReport {
    /// `3 / √M`, the band for increment correlations.
    pub fn correlation_band(&self) -> f64 {
        3.0 / (self.paths as f64).sqrt()
    }

    pub fn covariance_passes(&self) -> bool {
        self.max_z <= 3.0
    }
}

/// Draws `paths` FBM samples on the uniform grid with `points` positive times
/// over `[0, final_time]` and compares their statistics with the exact law.
pub fn fbm_statistics(
    hurst: f64,
    points: usize,
    paths: usize,
    final_time: f64,
    seed: u64,
) -> Result<FbmCheckReport> {
    let h = HurstParameter::new(hurst)?;
    if paths < 2 {
        return Err(Error::Argument("need at least two paths".into()));
    }
    let grid = TimeGrid::uniform(final_time, points)?;
    let factor = build_factor(&grid, h)?;
    let n = factor.dim();
    let tri = n * (n + 1) / 2;
    let mut sum = vec![0.0; tri];
    let mut sum_sq = vec![0.0; tri];
    let mut inc_ab = vec![0.0; n.saturating_sub(1)];
    let mut inc_aa = vec![0.0; n];
    let stream = SeededStream::for_trajectory(seed, 0);
    let mut rng = stream.substream(0);
    let mut z = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut dx = vec![0.0; n];
    for _ in 0..paths {
        for zi in z.iter_mut() {
            *zi = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
        }
        factor.apply(&z, &mut x);
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                let p = x[i] * x[j];
                sum[k] += p;
                sum_sq[k] += p * p;
                k += 1;
            }
        }
        let mut prev = 0.0;
        for i in 0..n {
            dx[i] = x[i] - prev;
            prev = x[i];
            inc_aa[i] += dx[i] * dx[i];
        }
        for i in 0..n.saturating_sub(1) {
            inc_ab[i] += dx[i] * dx[i + 1];
        }
    }

    let times = grid.points()[1..].to_vec();
    let mf = paths as f64;
    let mut max_z = 0.0_f64;
    let mut max_variance_z = 0.0_f64;
    let mut worst_entry = (0, 0);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            let mean = sum[k] / mf;
            let var = (sum_sq[k] / mf - mean * mean) * mf / (mf - 1.0);
            let se = (var / mf).sqrt();
            let exact = crate::fbm::fbm_covariance(times[i], times[j], h)?;
            let z = (mean - exact).abs() / se;
            if z > max_z {
                max_z = z;
                worst_entry = (i, j);
            }
            if i == j {
                max_variance_z = max_variance_z.max(z);
            }
            k += 1;
        }
    }
    let increment_correlations = (0..n.saturating_sub(1))
        .map(|i| inc_ab[i] / (inc_aa[i] * inc_aa[i + 1]).sqrt())
        .collect();
    Ok(FbmCheckReport {
        hurst,
        paths,
        times,
        max_z,
        worst_entry,
        max_variance_z,
        increment_correlations,
    })
}

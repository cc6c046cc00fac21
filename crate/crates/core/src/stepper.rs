//! Stochastic trigonometric time stepping.
//!
//! One step maps `(u_j, ū_j)` to
//!
//! ```text
//! [u_{j+1}]   [ C(τ)          A^{-α/2}S(τ) ] [u_j]     [A^{-α/2}S(τ) f(u_j)]   [noise_u]
//! [ū_{j+1}] = [ −A^{α/2}S(τ)  C(τ)         ] [ū_j] + τ [C(τ) f(u_j)        ] + [noise_v]
//! ```
//!
//! with the noise block obtained by integrating the stochastic convolution by
//! parts and freezing `B(r) ≈ B(t_j)` on `[t_j, t_{j+1}]`:
//!
//! ```text
//! noise_u = −A^{-α/2}S(τ) B_j + ∫ C(t_{j+1} − r) dr B_j
//! noise_v = B_{j+1} − C(τ) B_j − ∫ A^{α/2}S(t_{j+1} − r) dr B_j
//! ```
//!
//! Every operator is diagonal in the sine basis, so all of this is per mode.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::ModalFbmEnsemble;
use crate::spectral::{lambda, ModalVector, SineBasis, TransformScratch};

/// Pointwise drift `f: ℝ → ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    Zero,
    /// `f(u) = cos(u) + u`.
    Paper,
    /// `f(u) = a u + b`.
    Linear { a: f64, b: f64 },
}

impl Drift {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Drift::Zero => 0.0,
            Drift::Paper => u.cos() + u,
            Drift::Linear { a, b } => a * u + b,
        }
    }

    /// Global Lipschitz constant.
    pub fn lipschitz(self) -> f64 {
        match self {
            Drift::Zero => 0.0,
            Drift::Paper => 2.0,
            Drift::Linear { a, .. } => a.abs(),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Drift::Zero | Drift::Linear { a: 0.0, b: 0.0 })
    }
}

impl FromStr for Drift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "zero" => return Ok(Drift::Zero),
            "paper" => return Ok(Drift::Paper),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("linear:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if let [a, b] = parts[..] {
                let parse = |x: &str| {
                    x.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Config(format!("bad linear drift coefficient {x:?}")))
                };
                return Ok(Drift::Linear { a: parse(a)?, b: parse(b)? });
            }
        }
        Err(Error::Config(format!(
            "unknown drift {s:?} (expected zero, paper or linear:a,b)"
        )))
    }
}

impl fmt::Display for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Zero => f.write_str("zero"),
            Drift::Paper => f.write_str("paper"),
            Drift::Linear { a, b } => write!(f, "linear:{a},{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub alpha: f64,
    pub tau: f64,
    pub steps: usize,
    pub modes: usize,
    pub drift: Drift,
}

impl SchemeConfig {
    pub fn new(alpha: f64, final_time: f64, steps: usize, modes: usize, drift: Drift) -> Result<Self> {
        let c = Self { alpha, tau: final_time / steps as f64, steps, modes, drift };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!("step size must be positive, got {}", self.tau)));
        }
        if self.steps == 0 {
            return Err(Error::Config("step count must be at least 1".into()));
        }
        if self.modes == 0 {
            return Err(Error::Config("mode count must be positive".into()));
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.tau * self.steps as f64
    }
}

/// Displacement `u` and velocity `ū`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub u: ModalVector,
    pub v: ModalVector,
}

impl PairState {
    pub fn new(u: ModalVector, v: ModalVector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::Argument(format!(
                "displacement has {} modes but velocity has {}",
                u.len(),
                v.len()
            )));
        }
        Ok(Self { u, v })
    }

    pub fn zeros(m: usize) -> Self {
        Self { u: ModalVector::zeros(m), v: ModalVector::zeros(m) }
    }

    pub fn modes(&self) -> usize {
        self.u.len()
    }

    /// `Σ_i λ_i^α u_i² + v_i²`, conserved by the free rotation.
    pub fn energy(&self, alpha: f64) -> f64 {
        self.u
            .coeffs()
            .iter()
            .zip(self.v.coeffs())
            .enumerate()
            .map(|(k, (u, v))| lambda(k + 1).powf(alpha) * u * u + v * v)
            .sum()
    }

    fn add(&mut self, other: &PairState) {
        for (a, b) in self.u.coeffs_mut().iter_mut().zip(other.u.coeffs()) {
            *a += b;
        }
        for (a, b) in self.v.coeffs_mut().iter_mut().zip(other.v.coeffs()) {
            *a += b;
        }
    }
}

/// Per-mode trigonometric data for one `(α, τ, m)`.
#[derive(Debug, Clone)]
pub struct StepTables {
    /// `ω_i = λ_i^{α/2}`
    pub omega: Vec<f64>,
    pub inv_omega: Vec<f64>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl StepTables {
    pub fn new(alpha: f64, t: f64, m: usize) -> Self {
        let mut tables = Self {
            omega: Vec::with_capacity(m),
            inv_omega: Vec::with_capacity(m),
            cos: Vec::with_capacity(m),
            sin: Vec::with_capacity(m),
        };
        for i in 1..=m {
            let w = lambda(i).powf(0.5 * alpha);
            let theta = w * t;
            tables.omega.push(w);
            tables.inv_omega.push(1.0 / w);
            tables.cos.push(theta.cos());
            tables.sin.push(theta.sin());
        }
        tables
    }

    /// `∫₀^τ cos(ω r) dr = ω^{-1} sin(ωτ)`.
    #[inline]
    pub fn integral_cos(&self, k: usize) -> f64 {
        self.inv_omega[k] * self.sin[k]
    }

    /// `∫₀^τ ω sin(ω r) dr = 1 − cos(ωτ)`.
    #[inline]
    pub fn integral_sin(&self, k: usize) -> f64 {
        1.0 - self.cos[k]
    }
}

/// `L(t)(u, v)`: exact free evolution over time `t`.
pub fn rotation_apply(state: &PairState, alpha: f64, t: f64) -> PairState {
    let tables = StepTables::new(alpha, t, state.modes());
    let mut out = state.clone();
    rotate_in_place(&tables, out.u.coeffs_mut(), out.v.coeffs_mut());
    out
}

#[inline]
fn rotate_in_place(tables: &StepTables, u: &mut [f64], v: &mut [f64]) {
    for k in 0..u.len() {
        let (c, s, w, iw) = (tables.cos[k], tables.sin[k], tables.omega[k], tables.inv_omega[k]);
        let (uk, vk) = (u[k], v[k]);
        u[k] = c * uk + iw * s * vk;
        v[k] = -w * s * uk + c * vk;
    }
}

/// `f(u)` projected onto the basis (collocation).
pub fn drift_modal(basis: &SineBasis, u: &ModalVector, drift: Drift) -> Result<ModalVector> {
    if drift == Drift::Zero {
        return Ok(ModalVector::zeros(u.len()));
    }
    let mut phys = basis.evaluate(u)?;
    for x in &mut phys {
        *x = drift.eval(*x);
    }
    basis.project(&phys)
}

/// `τ (A^{-α/2}S(τ) f(u_j), C(τ) f(u_j))`.
pub fn drift_increment(
    basis: &SineBasis,
    u: &ModalVector,
    alpha: f64,
    tau: f64,
    drift: Drift,
) -> Result<PairState> {
    let f = drift_modal(basis, u, drift)?;
    let tables = StepTables::new(alpha, tau, u.len());
    let mut inc = PairState::zeros(u.len());
    for (k, fk) in f.coeffs().iter().enumerate() {
        inc.u.coeffs_mut()[k] = tau * tables.inv_omega[k] * tables.sin[k] * fk;
        inc.v.coeffs_mut()[k] = tau * tables.cos[k] * fk;
    }
    Ok(inc)
}

/// Integration-by-parts noise block for one step.
///
/// The two displacement terms cancel and the velocity terms collapse to
/// `b_next − b_j`; both are evaluated from the closed-form integrals anyway.
pub fn noise_increment(b_j: &ModalVector, b_next: &ModalVector, alpha: f64, tau: f64) -> Result<PairState> {
    if b_j.len() != b_next.len() {
        return Err(Error::Argument("noise vectors differ in length".into()));
    }
    let tables = StepTables::new(alpha, tau, b_j.len());
    let mut inc = PairState::zeros(b_j.len());
    noise_block(&tables, b_j.coeffs(), b_next.coeffs(), inc.u.coeffs_mut(), inc.v.coeffs_mut());
    Ok(inc)
}

#[inline]
fn noise_block(tables: &StepTables, b_j: &[f64], b_next: &[f64], du: &mut [f64], dv: &mut [f64]) {
    for k in 0..b_j.len() {
        let b = b_j[k];
        du[k] = -(tables.inv_omega[k] * tables.sin[k]) * b + tables.integral_cos(k) * b;
        dv[k] = b_next[k] - tables.cos[k] * b - tables.integral_sin(k) * b;
    }
}

/// One full step from `state`.
pub fn step(
    basis: &SineBasis,
    state: &PairState,
    config: &SchemeConfig,
    b_j: &ModalVector,
    b_next: &ModalVector,
) -> Result<PairState> {
    config.validate()?;
    if state.modes() != config.modes || basis.modes() != config.modes {
        return Err(Error::Argument("state, basis and config disagree on the mode count".into()));
    }
    let mut next = rotation_apply(state, config.alpha, config.tau);
    next.add(&drift_increment(basis, &state.u, config.alpha, config.tau, config.drift)?);
    next.add(&noise_increment(b_j, b_next, config.alpha, config.tau)?);
    Ok(next)
}

/// Result of [`Stepper::solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub final_state: PairState,
    /// `(step index, state)` pairs, ascending; empty unless requested.
    pub snapshots: Vec<(usize, PairState)>,
}

/// Reusable stepping workspace for one scheme configuration.
///
/// Holds the trigonometric tables and transform buffers; a worker keeps one
/// per configuration and reuses it across trajectories.
pub struct Stepper<'a> {
    basis: &'a SineBasis,
    config: SchemeConfig,
    tables: StepTables,
    scratch: TransformScratch,
    phys: Vec<f64>,
    force: Vec<f64>,
    b_j: Vec<f64>,
    b_next: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(basis: &'a SineBasis, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        if basis.modes() != config.modes {
            return Err(Error::Config(format!(
                "basis has {} modes, config has {}",
                basis.modes(),
                config.modes
            )));
        }
        let m = config.modes;
        Ok(Self {
            basis,
            config,
            tables: StepTables::new(config.alpha, config.tau, m),
            scratch: basis.scratch(),
            phys: vec![0.0; m],
            force: vec![0.0; m],
            b_j: vec![0.0; m],
            b_next: vec![0.0; m],
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn tables(&self) -> &StepTables {
        &self.tables
    }

    /// Advances `state` by one step with noise values `b_j`, `b_next`.
    pub fn advance(&mut self, state: &mut PairState, b_j: &[f64], b_next: &[f64]) {
        let tau = self.config.tau;
        let drift = self.config.drift;
        let has_drift = !drift.is_zero();
        if has_drift {
            self.basis.evaluate_into(state.u.coeffs(), &mut self.phys, &mut self.scratch);
            for x in &mut self.phys {
                *x = drift.eval(*x);
            }
            self.basis.project_into(&self.phys, &mut self.force, &mut self.scratch);
        }
        let t = &self.tables;
        let u = state.u.coeffs_mut();
        let v = state.v.coeffs_mut();
        rotate_in_place(t, u, v);
        for k in 0..u.len() {
            let b = b_j[k];
            let mut du = -(t.inv_omega[k] * t.sin[k]) * b + t.integral_cos(k) * b;
            let mut dv = b_next[k] - t.cos[k] * b - t.integral_sin(k) * b;
            if has_drift {
                du += tau * t.inv_omega[k] * t.sin[k] * self.force[k];
                dv += tau * t.cos[k] * self.force[k];
            }
            u[k] += du;
            v[k] += dv;
        }
    }

    /// Runs all steps against `ensemble`, whose grid must be the uniform grid
    /// with `steps + 1` points and spacing `τ`.
    ///
    /// `snapshot_every = Some(k)` records the state after steps `k, 2k, …`
    /// and always after the last step.
    pub fn solve(
        &mut self,
        ensemble: &ModalFbmEnsemble,
        initial: &PairState,
        snapshot_every: Option<usize>,
    ) -> Result<Solution> {
        let grid = ensemble.grid();
        let n = self.config.steps;
        if grid.len() != n + 1 {
            return Err(Error::Config(format!(
                "noise grid has {} points but the scheme takes {n} steps",
                grid.len()
            )));
        }
        match grid.uniform_step() {
            Some(tau) if (tau - self.config.tau).abs() <= 1e-12 * self.config.tau => {}
            _ => {
                return Err(Error::Config("noise grid spacing does not match the step size".into()))
            }
        }
        if ensemble.modes() != self.config.modes || initial.modes() != self.config.modes {
            return Err(Error::Config("ensemble, initial state and config disagree on modes".into()));
        }
        if snapshot_every == Some(0) {
            return Err(Error::Argument("snapshot interval must be positive".into()));
        }

        let mut state = initial.clone();
        let mut snapshots = Vec::new();
        let mut b_j = std::mem::take(&mut self.b_j);
        let mut b_next = std::mem::take(&mut self.b_next);
        ensemble.field_at_into(0, &mut b_j);
        for j in 0..n {
            ensemble.field_at_into(j + 1, &mut b_next);
            self.advance(&mut state, &b_j, &b_next);
            std::mem::swap(&mut b_j, &mut b_next);
            if let Some(k) = snapshot_every {
                if (j + 1) % k == 0 || j + 1 == n {
                    snapshots.push((j + 1, state.clone()));
                }
            }
        }
        self.b_j = b_j;
        self.b_next = b_next;
        if !state.u.is_finite() || !state.v.is_finite() {
            return Err(Error::Argument("solution became non-finite".into()));
        }
        Ok(Solution { final_state: state, snapshots })
    }
}

/// Convenience wrapper around [`Stepper::solve`].
pub fn solve(
    basis: &SineBasis,
    config: &SchemeConfig,
    ensemble: &ModalFbmEnsemble,
    initial: &PairState,
    snapshot_every: Option<usize>,
) -> Result<Solution> {
    Stepper::new(basis, *config)?.solve(ensemble, initial, snapshot_every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{build_factor, HurstParameter, TimeGrid};
    use crate::noise::{sample_field, NoiseSpec};
    use crate::rng::{SeededStream, ZeroStream};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_state(m: usize, seed: u64) -> PairState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gen = || ModalVector::from_coeffs((0..m).map(|_| rng.random_range(-1.0..1.0)).collect());
        PairState::new(gen(), gen()).unwrap()
    }

    fn silent_ensemble(m: usize, t: f64, n: usize) -> ModalFbmEnsemble {
        let h = HurstParameter::new(0.4).unwrap();
        let grid = TimeGrid::uniform(t, n).unwrap();
        let f = build_factor(&grid, h).unwrap();
        sample_field(&NoiseSpec::power_law(m, 0.0, h).unwrap(), &grid, &f, &ZeroStream).unwrap()
    }

    #[test]
    fn drift_registry() {
        assert_eq!("zero".parse::<Drift>().unwrap(), Drift::Zero);
        assert_eq!("paper".parse::<Drift>().unwrap(), Drift::Paper);
        assert_eq!(" linear:1.5, -2 ".parse::<Drift>().unwrap(), Drift::Linear { a: 1.5, b: -2.0 });
        assert!("cubic".parse::<Drift>().is_err());
        assert!("linear:1".parse::<Drift>().is_err());
        assert!("linear:a,b".parse::<Drift>().is_err());
        for d in [Drift::Zero, Drift::Paper, Drift::Linear { a: 0.5, b: 1.0 }] {
            assert_eq!(d.to_string().parse::<Drift>().unwrap(), d);
        }
    }

    #[test]
    fn drift_lipschitz_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [Drift::Zero, Drift::Paper, Drift::Linear { a: -3.0, b: 1.0 }] {
            let l = d.lipschitz();
            for _ in 0..1000 {
                let (s, t): (f64, f64) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
                assert!((d.eval(t) - d.eval(s)).abs() <= l * (t - s).abs() + 1e-12);
            }
        }
    }

    #[test]
    fn rotation_identity_energy_and_semigroup() {
        let s = random_state(64, 1);
        assert_eq!(rotation_apply(&s, 0.8, 0.0), s);
        let r = rotation_apply(&s, 0.8, 0.37);
        assert!((r.energy(0.8) - s.energy(0.8)).abs() <= 1e-12 * s.energy(0.8));
        let two = rotation_apply(&rotation_apply(&s, 0.8, 0.013), 0.8, 0.029);
        let one = rotation_apply(&s, 0.8, 0.042);
        for (a, b) in two.u.coeffs().iter().zip(one.u.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        // velocities carry a factor ω up to ~ (64π)^{0.8}
        for (a, b) in two.v.coeffs().iter().zip(one.v.coeffs()) {
            assert!((a - b).abs() < 1e-12 * 100.0);
        }
    }

    #[test]
    fn drift_increment_cases() {
        let m = 31;
        let basis = SineBasis::new(m).unwrap();
        let u = ModalVector::zeros(m);
        let z = drift_increment(&basis, &u, 0.8, 0.05, Drift::Zero).unwrap();
        assert_eq!(z, PairState::zeros(m));
        let z = drift_increment(&basis, &u, 0.8, 0.0, Drift::Paper).unwrap();
        assert!(z.u.coeffs().iter().chain(z.v.coeffs()).all(|&x| x == 0.0));

        // f(0) = 1; Σ_k sin(iπk/(m+1)) = cot(iπ/(2(m+1))) for odd i, 0 for even i
        let f = drift_modal(&basis, &u, Drift::Paper).unwrap();
        for (k, fk) in f.coeffs().iter().enumerate() {
            let i = k + 1;
            let sum = if i % 2 == 1 { 1.0 / (i as f64 * PI / (2.0 * (m + 1) as f64)).tan() } else { 0.0 };
            let expected = 2.0_f64.sqrt() * sum / (m + 1) as f64;
            assert!((fk - expected).abs() < 1e-13, "mode {i}: {fk} vs {expected}");
        }
    }

    #[test]
    fn noise_block_reduces_to_increment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 64;
        let b0 = ModalVector::from_coeffs((0..m).map(|_| rng.random_range(-1.0..1.0)).collect());
        let b1 = ModalVector::from_coeffs((0..m).map(|_| rng.random_range(-1.0..1.0)).collect());
        let inc = noise_increment(&b0, &b1, 0.8, 0.05).unwrap();
        assert!(inc.u.coeffs().iter().all(|&x| x == 0.0));
        for k in 0..m {
            let d = b1.coeffs()[k] - b0.coeffs()[k];
            assert!((inc.v.coeffs()[k] - d).abs() < 1e-15 * (1.0 + b0.coeffs()[k].abs()) * 4.0);
        }
        let same = noise_increment(&b0, &b0, 0.8, 0.05).unwrap();
        assert!(same.u.coeffs().iter().all(|&x| x == 0.0));
        assert!(same.v.coeffs().iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn stepper_matches_free_step() {
        let m = 48;
        let basis = SineBasis::new(m).unwrap();
        let cfg = SchemeConfig::new(0.8, 0.2, 8, m, Drift::Paper).unwrap();
        let h = HurstParameter::new(0.3).unwrap();
        let grid = TimeGrid::uniform(0.2, 8).unwrap();
        let f = build_factor(&grid, h).unwrap();
        let e = sample_field(
            &NoiseSpec::power_law(m, 0.1, h).unwrap(),
            &grid,
            &f,
            &SeededStream::for_trajectory(3, 0),
        )
        .unwrap();
        let init = random_state(m, 9);
        let mut st = init.clone();
        for j in 0..8 {
            st = step(&basis, &st, &cfg, &e.field_at(j).unwrap(), &e.field_at(j + 1).unwrap()).unwrap();
        }
        let sol = solve(&basis, &cfg, &e, &init, None).unwrap();
        for (a, b) in sol.final_state.u.coeffs().iter().zip(st.u.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_rotation_over_many_steps() {
        let m = 16;
        let basis = SineBasis::new(m).unwrap();
        let t = 0.2;
        let n = 32;
        let cfg = SchemeConfig::new(0.8, t, n, m, Drift::Zero).unwrap();
        let init = PairState::new(ModalVector::unit(m, 1, 0.25), ModalVector::zeros(m)).unwrap();
        let sol = solve(&basis, &cfg, &silent_ensemble(m, t, n), &init, None).unwrap();
        let w = lambda(1).powf(0.4);
        assert!((sol.final_state.u.coeffs()[0] - 0.25 * (w * t).cos()).abs() < 1e-12);

        let rnd = random_state(m, 4);
        let e0 = rnd.energy(0.8);
        let sol = solve(&basis, &cfg, &silent_ensemble(m, t, n), &rnd, None).unwrap();
        assert!((sol.final_state.energy(0.8) - e0).abs() <= 1e-10 * e0);
    }

    #[test]
    fn linear_drift_converges_to_exact_ode() {
        // u'' + (ω² − a) u = b g_i per mode, with g_i the projection of 1
        let m = 15;
        let (a, b) = (1.0, 0.5);
        let basis = SineBasis::new(m).unwrap();
        let t_end = 0.2;
        let init = PairState::new(ModalVector::unit(m, 1, 0.25), ModalVector::unit(m, 3, 0.5)).unwrap();
        let g = drift_modal(&basis, &ModalVector::zeros(m), Drift::Linear { a: 0.0, b: 1.0 }).unwrap();
        let exact: Vec<f64> = (0..m)
            .map(|k| {
                let om2 = lambda(k + 1).powf(0.8) - a;
                let om = om2.sqrt();
                let p = b * g.coeffs()[k] / om2;
                p + (init.u.coeffs()[k] - p) * (om * t_end).cos() + init.v.coeffs()[k] / om * (om * t_end).sin()
            })
            .collect();
        let mut errs = Vec::new();
        for n in [16, 32, 64, 128] {
            let cfg = SchemeConfig::new(0.8, t_end, n, m, Drift::Linear { a, b }).unwrap();
            let sol = solve(&basis, &cfg, &silent_ensemble(m, t_end, n), &init, None).unwrap();
            let e: f64 = sol
                .final_state
                .u
                .coeffs()
                .iter()
                .zip(&exact)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            errs.push(e);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() >= 0.9, "{errs:?}");
        }
    }

    #[test]
    fn snapshots_and_checks() {
        let m = 8;
        let basis = SineBasis::new(m).unwrap();
        let cfg = SchemeConfig::new(0.5, 0.2, 8, m, Drift::Zero).unwrap();
        let e = silent_ensemble(m, 0.2, 8);
        let init = random_state(m, 1);
        let sol = solve(&basis, &cfg, &e, &init, Some(8)).unwrap();
        assert_eq!(sol.snapshots.len(), 1);
        assert_eq!(sol.snapshots[0].0, 8);
        let sol = solve(&basis, &cfg, &e, &init, Some(3)).unwrap();
        let idx: Vec<usize> = sol.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(idx, vec![3, 6, 8]);

        let wrong = silent_ensemble(m, 0.2, 4);
        assert!(matches!(solve(&basis, &cfg, &wrong, &init, None), Err(Error::Config(_))));
        assert!(SchemeConfig::new(1.5, 0.2, 4, m, Drift::Zero).is_err());
        assert!(SchemeConfig::new(0.5, 0.2, 0, m, Drift::Zero).is_err());
    }
}

//! Dirichlet sine eigenbasis of `A = −Δ` on `(0, 1)`.
//!
//! `φ_i(x) = √2 sin(iπx)`, `λ_i = (iπ)²`. Functions are stored by their
//! coefficients in this basis ([`ModalVector`]); the nonlinearity is evaluated
//! by collocation on the `m` interior nodes `x_k = k/(m+1)`, where the DST-I
//! orthogonality `Σ_k sin(iπx_k) sin(jπx_k) = (m+1)/2 δ_ij` makes
//! `project ∘ evaluate` the identity.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest mode count handled by the dense collocation matrix. Beyond this the
/// transforms go through an FFT of length `2(m+1)`.
pub const DIRECT_MAX_MODES: usize = 512;

/// `λ_i = (iπ)²` for a 1-based mode index.
#[inline]
pub fn lambda(i: usize) -> f64 {
    let w = i as f64 * PI;
    w * w
}

/// Coefficients in the orthonormal sine basis; entry `k` is mode `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalVector(Vec<f64>);

impl ModalVector {
    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    /// `c · φ_mode` (mode is 1-based).
    pub fn unit(m: usize, mode: usize, c: f64) -> Self {
        let mut v = Self::zeros(m);
        v.0[mode - 1] = c;
        v
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// L²(0,1) norm, which equals the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

/// Interior collocation nodes `x_k = k/(m+1)`, `k = 1..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollocationGrid {
    m: usize,
}

impl CollocationGrid {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = 1.0 / (self.m + 1) as f64;
        (1..=self.m).map(|k| k as f64 * h).collect()
    }
}

/// `sin(π r / (m+1))` with the integer argument reduced modulo `2(m+1)`.
#[inline]
fn sin_frac(r: usize, m: usize) -> f64 {
    let period = 2 * (m + 1);
    let r = r % period;
    (PI * r as f64 / (m + 1) as f64).sin()
}

/// Per-mode `(cos θ_i, sin θ_i)` with `θ_i = λ_i^{α/2} t`, modes `1..=m`.
pub fn trig_factors(alpha: f64, t: f64, m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let theta = lambda(i).powf(0.5 * alpha) * t;
            (theta.cos(), theta.sin())
        })
        .collect()
}

/// Scratch buffers for one transform; reuse across calls to avoid allocation.
pub struct TransformScratch {
    buf: Vec<Complex<f64>>,
    fft: Vec<Complex<f64>>,
}

impl fmt::Debug for TransformScratch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformScratch").field("len", &self.buf.len()).finish()
    }
}

/// The first `m` sine eigenfunctions with collocation transforms.
///
/// Immutable after construction; share it across workers.
pub struct SineBasis {
    m: usize,
    grid: CollocationGrid,
    fft: Option<Arc<dyn Fft<f64>>>,
    // dense G_{ik} = φ_i(x_k), built on first use
    matrix: OnceLock<Vec<f64>>,
}

impl fmt::Debug for SineBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineBasis")
            .field("m", &self.m)
            .field("fast", &self.fft.is_some())
            .finish()
    }
}

impl SineBasis {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("mode count must be positive".into()));
        }
        let fft = (m > DIRECT_MAX_MODES)
            .then(|| FftPlanner::new().plan_fft_forward(2 * (m + 1)));
        Ok(Self {
            m,
            grid: CollocationGrid::new(m),
            fft,
            matrix: OnceLock::new(),
        })
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> CollocationGrid {
        self.grid
    }

    /// Whether `evaluate`/`project` go through the FFT.
    pub fn uses_fast_transform(&self) -> bool {
        self.fft.is_some()
    }

    pub fn eigenvalue(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.m {
            return Err(Error::Argument(format!("mode index {i} outside 1..={}", self.m)));
        }
        Ok(lambda(i))
    }

    /// `λ_i^γ` for every mode.
    pub fn eigenvalue_powers(&self, gamma: f64) -> Vec<f64> {
        (1..=self.m).map(|i| lambda(i).powf(gamma)).collect()
    }

    /// `A^γ v`, diagonal in the basis.
    pub fn frac_power_apply(&self, gamma: f64, v: &ModalVector) -> Result<ModalVector> {
        self.check_len(v.len())?;
        Ok(ModalVector(
            v.0.iter()
                .enumerate()
                .map(|(k, c)| lambda(k + 1).powf(gamma) * c)
                .collect(),
        ))
    }

    /// Dense collocation matrix `G_{ik} = φ_i(x_k)`, row-major. Symmetric.
    pub fn collocation_matrix(&self) -> &[f64] {
        self.matrix.get_or_init(|| {
            let m = self.m;
            let mut g = vec![0.0; m * m];
            for i in 0..m {
                for k in 0..=i {
                    let v = SQRT_2 * sin_frac((i + 1) * (k + 1), m);
                    g[i * m + k] = v;
                    g[k * m + i] = v;
                }
            }
            g
        })
    }

    pub fn scratch(&self) -> TransformScratch {
        let n = if self.fft.is_some() { 2 * (self.m + 1) } else { 0 };
        let s = self.fft.as_ref().map_or(0, |f| f.get_inplace_scratch_len());
        TransformScratch {
            buf: vec![Complex::new(0.0, 0.0); n],
            fft: vec![Complex::new(0.0, 0.0); s],
        }
    }

    /// Physical values `Σ_i c_i φ_i(x_k)` at the collocation nodes.
    pub fn evaluate(&self, v: &ModalVector) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut out = vec![0.0; self.m];
        self.evaluate_into(v.coeffs(), &mut out, &mut self.scratch());
        Ok(out)
    }

    /// Galerkin coefficients `(1/(m+1)) Σ_k values_k φ_i(x_k)`.
    pub fn project(&self, values: &[f64]) -> Result<ModalVector> {
        self.check_len(values.len())?;
        let mut out = vec![0.0; self.m];
        self.project_into(values, &mut out, &mut self.scratch());
        Ok(ModalVector(out))
    }

    pub fn evaluate_into(&self, coeffs: &[f64], out: &mut [f64], scratch: &mut TransformScratch) {
        self.sine_sum(coeffs, out, SQRT_2, scratch);
    }

    pub fn project_into(&self, values: &[f64], out: &mut [f64], scratch: &mut TransformScratch) {
        self.sine_sum(values, out, SQRT_2 / (self.m + 1) as f64, scratch);
    }

    /// Dense-matrix route regardless of `m`.
    pub fn evaluate_direct(&self, coeffs: &[f64], out: &mut [f64]) {
        self.direct(coeffs, out, 1.0);
    }

    pub fn project_direct(&self, values: &[f64], out: &mut [f64]) {
        self.direct(values, out, 1.0 / (self.m + 1) as f64);
    }

    fn direct(&self, input: &[f64], out: &mut [f64], scale: f64) {
        let m = self.m;
        let g = self.collocation_matrix();
        for (k, o) in out.iter_mut().enumerate().take(m) {
            let row = &g[k * m..(k + 1) * m];
            *o = scale * row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    /// `out_k = scale · Σ_i input_i sin(π i k/(m+1))`.
    fn sine_sum(&self, input: &[f64], out: &mut [f64], scale: f64, scratch: &mut TransformScratch) {
        let Some(fft) = &self.fft else {
            self.direct(input, out, scale / SQRT_2);
            return;
        };
        // odd extension: y_n = x_n, y_{N−n} = −x_n, so Y_k = −2i Σ x_n sin(πnk/(m+1))
        let m = self.m;
        let n = 2 * (m + 1);
        let buf = &mut scratch.buf;
        buf[0] = Complex::new(0.0, 0.0);
        buf[m + 1] = Complex::new(0.0, 0.0);
        for (i, &x) in input.iter().enumerate() {
            buf[i + 1] = Complex::new(x, 0.0);
            buf[n - i - 1] = Complex::new(-x, 0.0);
        }
        fft.process_with_scratch(buf, &mut scratch.fft);
        let s = -0.5 * scale;
        for (k, o) in out.iter_mut().enumerate().take(m) {
            *o = s * buf[k + 1].im;
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            Err(Error::Argument(format!("expected {} modes, got {len}", self.m)))
        } else {
            Ok(())
        }
    }
}

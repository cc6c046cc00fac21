//! Modal noise field `B(t) = Σ_i √q_i ξ_i(t) φ_i` with independent FBM `ξ_i`.

use crate::error::{Error, Result};
use crate::fbm::{CovarianceFactor, HurstParameter, TimeGrid};
use crate::rng::GaussianStream;
use crate::spectral::{lambda, ModalVector};

/// Diagonal covariance operator `Q` in the sine basis and the Hurst index.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    sqrt_q: Vec<f64>,
    decay: Option<f64>,
    hurst: HurstParameter,
}

impl NoiseSpec {
    /// `√q_i = λ_i^{−σ}`; `σ = 0` is the identity-covariance case.
    pub fn power_law(m: usize, sigma: f64, hurst: HurstParameter) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Argument(format!("noise decay must be ≥ 0, got {sigma}")));
        }
        if m == 0 {
            return Err(Error::Argument("mode count must be positive".into()));
        }
        let sqrt_q = (1..=m).map(|i| lambda(i).powf(-sigma)).collect();
        Ok(Self { sqrt_q, decay: Some(sigma), hurst })
    }

    /// Explicit eigenvalues `q_i ≥ 0` of `Q`.
    pub fn explicit(q: &[f64], hurst: HurstParameter) -> Result<Self> {
        if let Some(bad) = q.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Argument(format!("q_i must be finite and non-negative, got {bad}")));
        }
        if q.is_empty() {
            return Err(Error::Argument("mode count must be positive".into()));
        }
        Ok(Self { sqrt_q: q.iter().map(|x| x.sqrt()).collect(), decay: None, hurst })
    }

    pub fn modes(&self) -> usize {
        self.sqrt_q.len()
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    /// `σ` when the spec was built as a power law.
    pub fn decay(&self) -> Option<f64> {
        self.decay
    }

    pub fn sqrt_q(&self) -> &[f64] {
        &self.sqrt_q
    }

    pub fn is_silent(&self) -> bool {
        self.sqrt_q.iter().all(|&a| a == 0.0)
    }
}

/// Field values `b_i(t_j)` for every mode on one grid, mode-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalFbmEnsemble {
    grid: TimeGrid,
    spec: NoiseSpec,
    values: Vec<f64>,
}

impl ModalFbmEnsemble {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn modes(&self) -> usize {
        self.spec.modes()
    }

    /// Scaled values `√q_i ξ_i(t_j)` of one mode (1-based) over the grid.
    pub fn mode_values(&self, mode: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[(mode - 1) * n..mode * n]
    }

    pub fn field_at(&self, j: usize) -> Result<ModalVector> {
        if j >= self.grid.len() {
            return Err(Error::Argument(format!(
                "grid index {j} outside 0..{}",
                self.grid.len()
            )));
        }
        let mut out = vec![0.0; self.modes()];
        self.field_at_into(j, &mut out);
        Ok(ModalVector::from_coeffs(out))
    }

    /// Unchecked gather of column `j`.
    pub fn field_at_into(&self, j: usize, out: &mut [f64]) {
        let n = self.grid.len();
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.values[i * n + j];
        }
    }
}

/// Draws one ensemble: mode `i` uses substream `i − 1` of `stream`.
pub fn sample_field(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    factor: &CovarianceFactor,
    stream: &dyn GaussianStream,
) -> Result<ModalFbmEnsemble> {
    if factor.grid() != grid {
        return Err(Error::Argument("covariance factor was built on a different grid".into()));
    }
    if factor.hurst() != spec.hurst() {
        return Err(Error::Argument(format!(
            "covariance factor Hurst {} differs from noise Hurst {}",
            factor.hurst().value(),
            spec.hurst().value()
        )));
    }
    let n = grid.len();
    let dim = factor.dim();
    let mut values = vec![0.0; spec.modes() * n];
    let mut z = vec![0.0; dim];
    for (i, (&amp, row)) in spec.sqrt_q.iter().zip(values.chunks_exact_mut(n)).enumerate() {
        if amp == 0.0 {
            continue;
        }
        stream.fill_substream(i, &mut z);
        factor.apply(&z, &mut row[1..]);
        for x in &mut row[1..] {
            *x *= amp;
        }
    }
    Ok(ModalFbmEnsemble { grid: grid.clone(), spec: spec.clone(), values })
}

/// Subsamples every mode onto `coarse`.
pub fn restrict_ensemble(ensemble: &ModalFbmEnsemble, coarse: &TimeGrid) -> Result<ModalFbmEnsemble> {
    let idx = ensemble.grid.indices_of(coarse)?;
    let n = ensemble.grid.len();
    let mut values = Vec::with_capacity(ensemble.modes() * idx.len());
    for row in ensemble.values.chunks_exact(n) {
        values.extend(idx.iter().map(|&j| row[j]));
    }
    Ok(ModalFbmEnsemble { grid: coarse.clone(), spec: ensemble.spec.clone(), values })
}

//! Exact fractional Brownian motion on a time grid.
//!
//! Paths are drawn as `L z` where `L` is the Cholesky factor of the covariance
//! of the process *values* at the strictly positive grid times and `z` is a
//! vector of i.i.d. standard normals. The value at `t = 0` is pinned to zero.

use crate::error::{Error, Result};

/// Hurst index `h` with `0 < h < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 && h < 1.0 {
            Ok(Self(h))
        } else {
            Err(Error::Argument(format!("Hurst parameter must lie in (0, 1), got {h}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Strictly increasing time points starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument("time grid needs at least two points".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::Argument(format!("time grid must start at 0, got {}", points[0])));
        }
        if points.iter().any(|t| !t.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("time grid must be finite and strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `t_j = j T / n`, `j = 0..=n`.
    pub fn uniform(final_time: f64, steps: usize) -> Result<Self> {
        if !(final_time.is_finite() && final_time > 0.0) {
            return Err(Error::Argument(format!("final time must be positive, got {final_time}")));
        }
        if steps == 0 {
            return Err(Error::Argument("uniform grid needs at least one step".into()));
        }
        let tau = final_time / steps as f64;
        let mut points: Vec<f64> = (0..=steps).map(|j| j as f64 * tau).collect();
        // pin the endpoint so that dyadic grids share it bit-exactly
        points[steps] = final_time;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    /// Number of strictly positive points, i.e. the dimension of the covariance.
    pub fn positive_len(&self) -> usize {
        self.points.len() - 1
    }

    /// Step size if the grid is uniform (relative tolerance 1e-12).
    pub fn uniform_step(&self) -> Option<f64> {
        let n = self.positive_len();
        let tau = self.final_time() / n as f64;
        self.points
            .iter()
            .enumerate()
            .all(|(j, &t)| (t - j as f64 * tau).abs() <= 1e-12 * self.final_time())
            .then_some(tau)
    }

    /// Index of every coarse point within this grid.
    pub fn indices_of(&self, coarse: &TimeGrid) -> Result<Vec<usize>> {
        let tol = 1e-12 * self.final_time().max(1.0);
        let mut out = Vec::with_capacity(coarse.len());
        let mut start = 0;
        for &t in coarse.points() {
            let pos = self.points[start..]
                .iter()
                .position(|&s| (s - t).abs() <= tol)
                .ok_or(Error::GridMismatch(t))?;
            start += pos;
            out.push(start);
        }
        Ok(out)
    }
}

/// One sampled trajectory; `values[j]` is the process at `grid.points()[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl FbmPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `E[ξ(s) ξ(t)] = ½ (t^{2H} + s^{2H} − |t − s|^{2H})`.
pub fn fbm_covariance(s: f64, t: f64, h: HurstParameter) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeTime(s));
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(covariance_unchecked(s, t, h.value()))
}

#[inline]
fn covariance_unchecked(s: f64, t: f64, h: f64) -> f64 {
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    let two_h = 2.0 * h;
    0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
}

const JITTER_LADDER: [f64; 5] = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

/// Lower Cholesky factor of the covariance of the process values at the
/// positive points of a grid. Stored packed, row-major.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    grid: TimeGrid,
    hurst: HurstParameter,
    dim: usize,
    lower: Vec<f64>,
    jitter_used: f64,
}

impl CovarianceFactor {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    /// Number of positive grid points (= number of Gaussians per path).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.lower[start..start + i + 1]
    }

    /// Entry `(i, j)` of the dense lower factor, zero above the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }

    /// Dense copy of the lower factor, row-major `dim × dim`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            out[i * n..i * n + i + 1].copy_from_slice(self.row(i));
        }
        out
    }

    /// Writes `L z` into `out`, both of length `dim`.
    pub fn apply(&self, gaussians: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = dot(self.row(i), &gaussians[..=i]);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    // packed lower storage: row i starts at i(i+1)/2
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[idx(i, j)];
            for k in 0..j {
                sum -= a[idx(i, k)] * a[idx(j, k)];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return false;
                }
                a[idx(i, i)] = sum.sqrt();
            } else {
                a[idx(i, j)] = sum / a[idx(j, j)];
            }
        }
    }
    true
}

/// Factorizes the covariance of the values at the positive grid points.
///
/// On numerical failure the diagonal is inflated by `ε · max_diag` for
/// `ε = 1e-12, 1e-11, …, 1e-8` before giving up.
pub fn build_factor(grid: &TimeGrid, h: HurstParameter) -> Result<CovarianceFactor> {
    let times = &grid.points()[1..];
    let n = times.len();
    let mut cov = Vec::with_capacity(n * (n + 1) / 2);
    for (i, &ti) in times.iter().enumerate() {
        for &tj in &times[..=i] {
            cov.push(covariance_unchecked(ti, tj, h.value()));
        }
    }
    let max_diag = times
        .iter()
        .map(|&t| covariance_unchecked(t, t, h.value()))
        .fold(0.0_f64, f64::max);

    let mut jitter = 0.0;
    let mut lower = cov.clone();
    if !cholesky_in_place(&mut lower, n) {
        let mut ok = false;
        for eps in JITTER_LADDER {
            jitter = eps * max_diag;
            lower.copy_from_slice(&cov);
            for i in 0..n {
                lower[i * (i + 1) / 2 + i] += jitter;
            }
            if cholesky_in_place(&mut lower, n) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::IllConditionedCovariance { size: n, jitter });
        }
    }

    Ok(CovarianceFactor {
        grid: grid.clone(),
        hurst: h,
        dim: n,
        lower,
        jitter_used: jitter,
    })
}

/// Maps a vector of standard normals onto a path: `0` followed by `L z`.
pub fn sample_path(factor: &CovarianceFactor, gaussians: &[f64]) -> Result<FbmPath> {
    if gaussians.len() != factor.dim {
        return Err(Error::Argument(format!(
            "expected {} Gaussian draws, got {}",
            factor.dim,
            gaussians.len()
        )));
    }
    let mut values = vec![0.0; factor.dim + 1];
    factor.apply(gaussians, &mut values[1..]);
    Ok(FbmPath { grid: factor.grid.clone(), values })
}

/// Subsamples a path onto a coarser grid whose points all lie on the path's grid.
pub fn restrict(path: &FbmPath, coarse: &TimeGrid) -> Result<FbmPath> {
    let idx = path.grid.indices_of(coarse)?;
    Ok(FbmPath {
        grid: coarse.clone(),
        values: idx.into_iter().map(|j| path.values[j]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn covariance_examples() {
        let c = fbm_covariance(0.7, 0.7, h(0.3)).unwrap();
        assert!((c - 0.7_f64.powf(0.6)).abs() < 1e-15);
        assert!((c - 0.807344).abs() < 1e-6);
        assert_eq!(fbm_covariance(1.0, 2.0, h(0.5)).unwrap(), 1.0);
        let c = fbm_covariance(1.0, 2.0, h(0.25)).unwrap();
        assert!((c - 0.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(fbm_covariance(0.0, 2.0, h(0.25)).unwrap(), 0.0);
        assert_eq!(fbm_covariance(1.3, 0.0, h(0.25)).unwrap(), 0.0);
    }

    #[test]
    fn covariance_rejects_negative_time() {
        assert_eq!(fbm_covariance(-1.0, 1.0, h(0.3)), Err(Error::NegativeTime(-1.0)));
        assert_eq!(fbm_covariance(1.0, -0.5, h(0.3)), Err(Error::NegativeTime(-0.5)));
    }

    #[test]
    fn hurst_range() {
        assert!(HurstParameter::new(0.0).is_err());
        assert!(HurstParameter::new(1.0).is_err());
        assert!(HurstParameter::new(1.5).is_err());
        assert!(HurstParameter::new(f64::NAN).is_err());
        assert!(HurstParameter::new(0.999).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 0.2]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.2, 0.2]).is_err());
        let g = TimeGrid::uniform(0.2, 8).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.final_time(), 0.2);
        assert!((g.uniform_step().unwrap() - 0.025).abs() < 1e-16);
        assert!(TimeGrid::new(vec![0.0, 0.1, 0.3]).unwrap().uniform_step().is_none());
    }

    #[test]
    fn factor_brownian_cases() {
        let f = build_factor(&TimeGrid::new(vec![0.0, 1.0]).unwrap(), h(0.5)).unwrap();
        assert_eq!(f.to_dense(), vec![1.0]);
        let f = build_factor(&TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap(), h(0.5)).unwrap();
        let d = f.to_dense();
        for (a, b) in d.iter().zip([1.0, 0.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(f.jitter_used(), 0.0);
    }

    #[test]
    fn factor_two_point_by_hand() {
        // Σ = [[√0.5, 0.5], [0.5, 1]]; hand Cholesky:
        // l11 = 0.5^{1/4}, l21 = 0.5 / l11, l22 = √(1 − l21²)
        let f = build_factor(&TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap(), h(0.25)).unwrap();
        let l11 = 0.5_f64.powf(0.25);
        let l21 = 0.5 / l11;
        let l22 = (1.0 - l21 * l21).sqrt();
        let d = f.to_dense();
        assert!((d[0] - l11).abs() < 1e-14);
        assert_eq!(d[1], 0.0);
        assert!((d[2] - l21).abs() < 1e-14);
        assert!((d[3] - l22).abs() < 1e-14);
    }

    #[test]
    fn factor_reproduces_covariance() {
        for hv in [0.05, 0.1, 0.25, 0.4, 0.5, 0.75, 0.95] {
            let grid = TimeGrid::uniform(0.2, 64).unwrap();
            let f = build_factor(&grid, h(hv)).unwrap();
            let n = f.dim();
            let t = &grid.points()[1..];
            let maxdiag = t.iter().map(|&x| x.powf(2.0 * hv)).fold(0.0, f64::max);
            for i in 0..n {
                assert!(f.entry(i, i) > 0.0);
                for j in 0..=i {
                    let llt: f64 = (0..=j).map(|k| f.entry(i, k) * f.entry(j, k)).sum();
                    let sigma = fbm_covariance(t[i], t[j], h(hv)).unwrap();
                    assert!(
                        (llt - sigma).abs() <= 1e-8 * maxdiag + f.jitter_used(),
                        "h={hv} ({i},{j}) {llt} vs {sigma}"
                    );
                }
            }
        }
    }

    #[test]
    fn sampling_contracts() {
        let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let f = build_factor(&grid, h(0.3)).unwrap();
        let p = sample_path(&f, &[0.7]).unwrap();
        assert_eq!(p.values(), &[0.0, 0.7]);

        let grid = TimeGrid::uniform(1.0, 10).unwrap();
        let f = build_factor(&grid, h(0.3)).unwrap();
        let p = sample_path(&f, &[0.0; 10]).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
        assert!(matches!(sample_path(&f, &[0.0; 9]), Err(Error::Argument(_))));
    }

    #[test]
    fn restriction() {
        let fine = TimeGrid::uniform(1.0, 4).unwrap();
        let f = build_factor(&fine, h(0.3)).unwrap();
        let p = sample_path(&f, &[0.3, -1.2, 0.8, 2.0]).unwrap();
        assert_eq!(restrict(&p, &fine).unwrap(), p);
        let coarse = TimeGrid::uniform(1.0, 2).unwrap();
        let r = restrict(&p, &coarse).unwrap();
        assert_eq!(r.values(), &[p.values()[0], p.values()[2], p.values()[4]]);
        let bad = TimeGrid::new(vec![0.0, 0.3, 1.0]).unwrap();
        assert_eq!(restrict(&p, &bad), Err(Error::GridMismatch(0.3)));
    }
}

//! Time discretization of the semilinear fractional stochastic wave equation
//!
//! ```text
//! ü + A^α u = f(u) + Ḃ^Q_H   on (0, 1) × (0, T],   u = 0 on the boundary,
//! ```
//!
//! where `A = −Δ` with Dirichlet conditions, `α ∈ (0, 1]` and `B^Q_H` is a
//! fractional Brownian field with Hurst index `H ∈ (0, 1)`.
//!
//! Space is discretized by a sine-Galerkin method ([`spectral`]); time by a
//! trigonometric integrator whose stochastic convolution is handled by
//! integration by parts ([`stepper`]). [`experiments`] measures strong
//! convergence rates with coupled Monte Carlo refinement.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fbm;
pub mod noise;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod stepper;

pub use error::{Error, Result};
pub use experiments::{
    fbm_statistics, holder_probe, kappa_label, strong_errors, ErrorRow, ErrorTable, ExperimentConfig,
    Harness, HolderEstimate, KappaLabel, NoiseModel,
};
pub use fbm::{build_factor, fbm_covariance, restrict, sample_path, CovarianceFactor, FbmPath, HurstParameter, TimeGrid};
pub use noise::{restrict_ensemble, sample_field, ModalFbmEnsemble, NoiseSpec};
pub use spectral::{trig_factors, CollocationGrid, ModalVector, SineBasis};
pub use stepper::{Drift, PairState, SchemeConfig, Solution, Stepper};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Multi-objective Bayesian optimization by output-space entropy search.
//!
//! The crate provides the MESMO family of information-theoretic acquisition
//! functions (basic, constrained, discrete multi-fidelity, and
//! continuous-fidelity variants), the Gaussian-process surrogates they rely
//! on, a random-Fourier-feature posterior sampler, an NSGA-II cheap solver,
//! Pareto-front metrics, and synthetic benchmark problems with fidelity cost
//! models.

pub mod acquisition;
pub mod benchmarks;
pub mod dataset;
pub mod domain;
pub mod error;
pub mod math;
pub mod nsga2;
pub mod optimizer;
pub mod pareto;
pub mod sampling;
pub mod surrogate;

pub use dataset::{Dataset, Fidelity, FidelityMode, FidelityVector, Observation};
pub use domain::BoxDomain;
pub use error::{CoreError, Result};
pub use math::RngStream;

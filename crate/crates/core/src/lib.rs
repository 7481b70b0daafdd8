//! Symmetric variance-gamma distributions and the machinery around their
//! Stein equation.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_functions`]: exponentially scaled modified Bessel functions,
//!   the Bessel integrals that appear in the Stein solution, and a catalogue
//!   of Bessel inequalities that can be checked on a grid.
//! - [`svg_distribution`]: the SVG(r, σ, μ) and VG(r, θ, σ, μ) families.
//! - [`stein_solver`]: the solution of the SVG Stein equation and its
//!   derivatives for a given test function.
//! - [`transforms`]: zero-bias, square-bias and centered-equilibrium
//!   transformations.
//! - [`distances`]: empirical Kolmogorov and Wasserstein distances.
//! - [`bounds`]: closed-form error bounds.
//! - [`experiments`]: seeded Monte Carlo harnesses.

pub mod bounds;
pub mod cli;
pub mod distances;
pub mod experiments;
pub mod quadrature;
pub mod special_functions;
pub mod stein_solver;
pub mod svg_distribution;
pub mod transforms;

mod rng;

pub use bounds::{BoundId, BoundReport};
pub use distances::{Metric, MetricValue};
pub use special_functions::ScaledValue;
pub use stein_solver::{SteinSolution, TestFunction};
pub use svg_distribution::{SvgParams, VgParams};
pub use transforms::{DistributionSpec, TransformKind};

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular value: {0}")]
    Singular(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("quadrature did not converge (value {value:e}, error estimate {error:e})")]
    Quadrature { value: f64, error: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

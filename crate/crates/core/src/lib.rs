//! Numerical toolkit for the equilibrium system
//!
//! ```text
//!     -Δh + h = μ,        div(T_h) = 0,
//! ```
//!
//! where `h` is a scalar field on a planar domain, `μ` is the Radon measure
//! it generates, and `T_h = 2∇h⊗∇h − (|∇h|² + h²)I` is the stress-energy
//! tensor of the energy `∫(|∇h|² + h²)`.
//!
//! The crate builds the classical explicit solution families (a slab kink,
//! an obstacle-problem minimizer, a Bessel-matched annulus field, n-line
//! singular fields), extracts their vorticity measures distributionally,
//! and verifies the identities those fields satisfy: weak divergence of the
//! stress tensor, the complex form of the equation, the Pohozaev identity,
//! and the curve/flat decomposition of the measure.

pub mod battery;
pub mod fields;
pub mod measure;
pub mod obstacle;
pub mod radial;
pub mod specfun;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("geometry mismatch: {0}")]
    Geometry(String),
    #[error("test function support violation: {0}")]
    Support(String),
    #[error("no matching outer radius: {0}")]
    NoMatch(String),
    #[error("relaxation did not converge: residual {residual:.3e} after {iterations} sweeps")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("field vanishes: {0}")]
    Vanishing(String),
    #[error("base value mismatch: {0}")]
    BaseMismatch(String),
    #[error("curl inconsistency: {0}")]
    Curl(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed artifact: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

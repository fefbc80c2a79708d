//! Simulator for the periodically kicked harmonic oscillator.
//!
//! The crate evolves the same system along three routes and provides the
//! tooling to compare them:
//!
//! * [`classical`] — stroboscopic phase-space maps (conservative, damped,
//!   scaled, diffusive), weighted trajectory ensembles, backward density
//!   rendering, Lyapunov exponents and bifurcation scans;
//! * [`quantum`] — density operators and state vectors in a truncated Fock
//!   basis, the kick unitary, exact damping/diffusion channels, a generic
//!   Lindblad integrator, Wigner and characteristic functions;
//! * [`charfn`] — closed-form Bessel-sum characteristic functions together
//!   with breaking-time formulas and the dissipative region classifier.
//!
//! [`analysis`] ties the classical and quantum routes together: it measures
//! the breaking time at which their second moments separate and sweeps it
//! over the Lamb-Dicke parameter, the damping strength or the diffusion
//! coefficient.
//!
//! All dynamics are expressed through the dimensionless parameter set in
//! [`params`]; randomness is routed through the splittable streams in
//! [`rng`] so that ensemble results do not depend on thread scheduling.

pub mod analysis;
pub mod charfn;
pub mod classical;
pub mod io;
pub mod params;
pub mod quantum;
pub mod rng;

mod bessel;
mod linalg;
mod parallel;

pub use params::{ClassicalState, DimensionlessParams, Frame, PhysicalParams};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (non-positive mass, overdamped regime, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A state was used in an operation expecting a different coordinate frame.
    #[error("frame mismatch: expected {expected:?}, got {got:?}")]
    FrameMismatch {
        expected: params::Frame,
        got: params::Frame,
    },

    /// Fock-space population reached the truncation edge.
    #[error("truncation-unsafe state at kick {kick}: tail population {tail:.3e} > {tol:.1e}")]
    TruncationUnsafe { kick: usize, tail: f64, tol: f64 },

    /// An evolution left the numerically trustworthy regime.
    #[error("numerical abort: {0}")]
    Numerical(String),

    /// The multi-index Bessel sum would visit more nodes than allowed.
    #[error("term budget exceeded: needed more than {budget} terms")]
    TermBudget { budget: u64 },

    /// An ensemble operation received no trajectories.
    #[error("empty ensemble")]
    EmptyEnsemble,

    /// Too few usable data points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed checkpoint or data file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

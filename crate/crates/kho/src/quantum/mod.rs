//! Truncated-Fock-space engine for the kicked oscillator.
//!
//! One kick of the open quantum map is `ρ -> 𝓔(U_k ρ U_k†)` with the kick
//! unitary `U_k = exp(-i K_q cos(η X̂))` and `𝓔` the exact inter-kick
//! channel: a harmonic rotation composed with the zero-temperature
//! attenuation channel (dissipative reservoir) or with the Gaussian
//! additive-noise channel (diffusive reservoir). A fixed-step Lindblad
//! integrator provides the independent cross-check for both channels.

mod channels;
mod evolve;
mod lindblad;
mod operators;
mod state;
mod wigner;

pub use channels::{
    apply_amplitude_damping, apply_diffusion_channel, EnvKind, EnvironmentSpec,
};
pub use evolve::{
    default_fock_dim, evolve_density, evolve_density_while, evolve_pure, evolve_pure_while,
    FOCK_SCALE,
};
pub use lindblad::{lindblad_integrate, StepControl};
pub use operators::{apply_harmonic, apply_harmonic_pure, build_kick_unitary, ChebyshevKick};
pub use state::{moments, moments_pure, DensityOperator, MomentRecord, PureState, StateTolerances};
pub use wigner::{char_fn_from_state, quadrature_density, wigner, CharFnValue, WignerGrid};

pub use crate::linalg::trace_norm_diff;

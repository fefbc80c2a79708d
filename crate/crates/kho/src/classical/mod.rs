//! Classical stroboscopic dynamics of the kicked oscillator.
//!
//! The per-kick update is always kick → rotation → contraction (and, for
//! noisy dynamics, an exact Gaussian diffusion increment after the
//! rotation), so states are sampled just before each kick in every map
//! variant and on the quantum side alike.

mod bifurcation;
mod density;
mod ensemble;
mod lyapunov;
mod map;

pub use bifurcation::{bifurcation_scan, BifurcationPoint, BifurcationSettings};
pub use density::{render_density_backward, DensityGrid, GridSpec};
pub use ensemble::{ClassicalMoments, GaussianSpec, WeightedEnsemble, VACUUM_VARIANCE};
pub use lyapunov::{lyapunov_exponent, LyapunovConfig, LyapunovResult};
pub use map::KickedMap;

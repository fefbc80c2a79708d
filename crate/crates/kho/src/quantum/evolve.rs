//! Kicked evolution drivers.

use ndarray::Array2;
use num_complex::Complex64;

use crate::linalg;
use crate::params::DimensionlessParams;
use crate::quantum::channels::{
    apply_amplitude_damping, apply_diffusion_channel, EnvKind, EnvironmentSpec,
};
use crate::quantum::operators::{
    apply_harmonic, apply_harmonic_pure, build_kick_unitary, ChebyshevKick,
};
use crate::quantum::state::{
    moments, moments_pure, DensityOperator, MomentRecord, PureState, StateTolerances,
};
use crate::{Error, Result};

/// Default truncation scale: `N = ceil(FOCK_SCALE / η²)`. Phase-space
/// extent in `(v̄, ū)` does not depend on η, so the photon number needed
/// grows as `1/η²`; the constant is sized for the 50-kick runs at K = 2.
pub const FOCK_SCALE: f64 = 64.0;

/// Dense kick unitaries are built up to this dimension; above it the
/// state-vector path switches to the Chebyshev applicator.
const DENSE_KICK_MAX: usize = 2048;

/// Default Fock dimension for a given Lamb-Dicke parameter.
pub fn default_fock_dim(eta: f64) -> usize {
    ((FOCK_SCALE / (eta * eta)).ceil() as usize).clamp(128, 1 << 17)
}

fn kick_and_angle(d: &DimensionlessParams, env: &EnvironmentSpec) -> (f64, f64) {
    match env.kind {
        EnvKind::Dissipative => (d.quantum_kick_damped(), d.alpha_bar),
        _ => (d.quantum_kick, d.alpha),
    }
}

/// Evolves a density operator through `kicks` kicks: kick unitary, then
/// the exact inter-kick channel. Moments are recorded before the first
/// kick and after each one; a truncation-unsafe state aborts with the kick
/// index reached.
pub fn evolve_density(
    rho: DensityOperator,
    d: &DimensionlessParams,
    env: &EnvironmentSpec,
    kicks: usize,
    tol: &StateTolerances,
) -> Result<(DensityOperator, Vec<MomentRecord>)> {
    evolve_density_while(rho, d, env, kicks, tol, |_| true)
}

/// [`evolve_density`] with an early-exit hook: `keep_going` sees each
/// per-kick moment record and may stop the evolution.
pub fn evolve_density_while(
    mut rho: DensityOperator,
    d: &DimensionlessParams,
    env: &EnvironmentSpec,
    kicks: usize,
    tol: &StateTolerances,
    mut keep_going: impl FnMut(&MomentRecord) -> bool,
) -> Result<(DensityOperator, Vec<MomentRecord>)> {
    env.validate()?;
    let n = rho.dim();
    if n > 4096 {
        return Err(Error::InvalidParameter(format!(
            "dense density evolution at N = {n} is impractical; use the pure-state path"
        )));
    }
    let (kq, angle) = kick_and_angle(d, env);
    let u = build_kick_unitary(d.lamb_dicke, kq, n)?;
    let u_dag = linalg::dagger(&u);
    rho.validate(tol, 0)?;
    let mut records = Vec::with_capacity(kicks + 1);
    records.push(moments(&rho, 0));
    for kick in 1..=kicks {
        let kicked = linalg::matmul(&linalg::matmul(&u, rho.matrix()), &u_dag);
        *rho.matrix_mut() = kicked;
        match env.kind {
            EnvKind::None => apply_harmonic(rho.matrix_mut(), angle),
            EnvKind::Dissipative => {
                apply_amplitude_damping(&mut rho, env.rate_tau(), angle)?
            }
            EnvKind::Diffusive => {
                apply_harmonic(rho.matrix_mut(), angle);
                apply_diffusion_channel(&mut rho, env.rate_tau()).map_err(|e| match e {
                    Error::TruncationUnsafe { tail, tol, .. } => {
                        Error::TruncationUnsafe { kick, tail, tol }
                    }
                    other => other,
                })?
            }
        }
        rho.validate(tol, kick)?;
        let record = moments(&rho, kick);
        records.push(record);
        if !keep_going(&record) {
            break;
        }
    }
    Ok((rho, records))
}

enum PureKick {
    Dense(Array2<Complex64>),
    Chebyshev(ChebyshevKick),
}

/// Evolves a state vector through the closed (no-reservoir) map. Much
/// cheaper than the density route and the only practical engine at the
/// large truncations small η demands.
pub fn evolve_pure(
    psi: PureState,
    d: &DimensionlessParams,
    kicks: usize,
    tol: &StateTolerances,
) -> Result<(PureState, Vec<MomentRecord>)> {
    evolve_pure_while(psi, d, kicks, tol, |_| true)
}

/// [`evolve_pure`] with an early-exit hook.
pub fn evolve_pure_while(
    mut psi: PureState,
    d: &DimensionlessParams,
    kicks: usize,
    tol: &StateTolerances,
    mut keep_going: impl FnMut(&MomentRecord) -> bool,
) -> Result<(PureState, Vec<MomentRecord>)> {
    let n = psi.dim();
    let kick_op = if n <= DENSE_KICK_MAX {
        PureKick::Dense(build_kick_unitary(d.lamb_dicke, d.quantum_kick, n)?)
    } else {
        PureKick::Chebyshev(ChebyshevKick::new(d.lamb_dicke, d.quantum_kick, n)?)
    };
    let angle = d.alpha;
    let mut records = Vec::with_capacity(kicks + 1);
    records.push(moments_pure(&psi, 0));
    for kick in 1..=kicks {
        let kicked = match &kick_op {
            PureKick::Dense(u) => u.dot(psi.amplitudes()),
            PureKick::Chebyshev(c) => c.apply(psi.amplitudes()),
        };
        *psi.amplitudes_mut() = kicked;
        apply_harmonic_pure(psi.amplitudes_mut(), angle);
        let norm_drift = (psi.norm_sqr() - 1.0).abs();
        if norm_drift > tol.trace {
            return Err(Error::Numerical(format!(
                "norm drift {norm_drift:.3e} at kick {kick}"
            )));
        }
        let tail = psi.tail_population();
        if tail > tol.tail {
            return Err(Error::TruncationUnsafe {
                kick,
                tail,
                tol: tol.tail,
            });
        }
        let record = moments_pure(&psi, kick);
        records.push(record);
        if !keep_going(&record) {
            break;
        }
    }
    Ok((psi, records))
}

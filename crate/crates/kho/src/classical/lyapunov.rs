//! Largest Lyapunov exponent by tangent-vector renormalization.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::classical::ensemble::VACUUM_VARIANCE;
use crate::classical::KickedMap;
use crate::rng::{Domain, StreamSeeds};
use crate::{parallel, Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LyapunovConfig {
    /// Number of initial conditions drawn from the initial Gaussian.
    pub trajectories: usize,
    /// Map iterations per trajectory; at least 1000.
    pub iterations: usize,
    /// Variance per coordinate of the Gaussian the initial conditions are
    /// drawn from.
    pub variance: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            trajectories: 10_000,
            iterations: 1_000_000,
            variance: VACUUM_VARIANCE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LyapunovResult {
    /// Ensemble average, nats per kick.
    pub average: f64,
    pub per_trajectory: Vec<f64>,
    pub trajectories: usize,
    pub iterations: usize,
}

/// Largest Lyapunov exponent of the map, averaged over an ensemble of
/// initial conditions.
///
/// Each trajectory carries a tangent vector through the Jacobian
/// `e^{-Γτ/2} R(θ) [[1,0],[K cos v, 1]]`, renormalized every kick; the
/// per-trajectory exponent is the mean log stretch per kick.
pub fn lyapunov_exponent(
    map: &KickedMap,
    cfg: &LyapunovConfig,
    seeds: &StreamSeeds,
) -> Result<LyapunovResult> {
    if cfg.iterations < 1000 {
        return Err(Error::InvalidParameter(
            "lyapunov estimate needs at least 1000 iterations".into(),
        ));
    }
    if cfg.trajectories == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if map.is_diffusive() {
        return Err(Error::InvalidParameter(
            "lyapunov exponent is defined for the deterministic maps".into(),
        ));
    }
    let sigma = cfg.variance.sqrt();
    let per: Vec<Result<f64>> = parallel::map_range(cfg.trajectories, |t| {
        let mut rng = seeds.trajectory(Domain::LyapunovInit, t as u64);
        let gv: f64 = rng.sample(StandardNormal);
        let gu: f64 = rng.sample(StandardNormal);
        let (mut v, mut u) = (sigma * gv, sigma * gu);
        let (mut w1, mut w2) = (1.0f64, 0.0f64);
        let mut log_sum = 0.0f64;
        for k in 0..cfg.iterations {
            let w = map.tangent_step(v, (w1, w2));
            let norm = w.0.hypot(w.1);
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Numerical(format!(
                    "tangent vector degenerate at iteration {k}"
                )));
            }
            log_sum += norm.ln();
            w1 = w.0 / norm;
            w2 = w.1 / norm;
            let s = map.step_coords(v, u);
            v = s.0;
            u = s.1;
            if !v.is_finite() || !u.is_finite() {
                return Err(Error::Numerical(format!(
                    "trajectory diverged at iteration {k}"
                )));
            }
        }
        Ok(log_sum / cfg.iterations as f64)
    });
    let mut per_trajectory = Vec::with_capacity(cfg.trajectories);
    for r in per {
        per_trajectory.push(r?);
    }
    let average = per_trajectory.iter().sum::<f64>() / per_trajectory.len() as f64;
    Ok(LyapunovResult {
        average,
        per_trajectory,
        trajectories: cfg.trajectories,
        iterations: cfg.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{AngleSpec, DimensionlessParams};
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn damped_rotation_is_exact() {
        // K' = 0: the tangent map is e^{-g} R, so every step stretches by
        // exactly e^{-g} and the exponent is -g.
        let d = DimensionlessParams::from_damped_kick(
            0.0,
            AngleSpec::Angle(FRAC_PI_3),
            0.5,
            0.3,
            0.0,
        )
        .unwrap();
        let map = KickedMap::dissipative(&d);
        let cfg = LyapunovConfig {
            trajectories: 4,
            iterations: 2000,
            variance: VACUUM_VARIANCE,
        };
        let res = lyapunov_exponent(&map, &cfg, &StreamSeeds::new(0)).unwrap();
        assert!((res.average - (-0.3)).abs() < 1e-6);
        // The average equals the mean of the per-trajectory values.
        let mean: f64 = res.per_trajectory.iter().sum::<f64>() / res.per_trajectory.len() as f64;
        assert!((res.average - mean).abs() < 1e-12);
    }

    #[test]
    fn conservative_zero_kick_is_neutral() {
        let d = DimensionlessParams::from_kick(0.0, AngleSpec::Symmetry(6), 0.5, 0.0, 0.0)
            .unwrap();
        let map = KickedMap::conservative(&d);
        let cfg = LyapunovConfig {
            trajectories: 2,
            iterations: 5000,
            variance: VACUUM_VARIANCE,
        };
        let res = lyapunov_exponent(&map, &cfg, &StreamSeeds::new(0)).unwrap();
        assert!(res.average.abs() < 1e-6);
    }

    #[test]
    fn strange_attractor_regime_is_chaotic() {
        // Small-sample version of the strong-damping anchor; the full pass
        // lives in the acceptance suite.
        let d = DimensionlessParams::from_damped_kick(
            6.0,
            AngleSpec::Symmetry(6),
            0.5,
            0.36,
            0.0,
        )
        .unwrap();
        let map = KickedMap::dissipative(&d);
        let cfg = LyapunovConfig {
            trajectories: 64,
            iterations: 20_000,
            variance: VACUUM_VARIANCE,
        };
        let res = lyapunov_exponent(&map, &cfg, &StreamSeeds::new(0)).unwrap();
        assert!(
            res.average > 0.5 && res.average < 0.9,
            "lambda = {}",
            res.average
        );
    }

    #[test]
    fn strong_damping_window_is_periodic() {
        let d = DimensionlessParams::from_damped_kick(
            6.0,
            AngleSpec::Symmetry(6),
            0.5,
            0.8,
            0.0,
        )
        .unwrap();
        let map = KickedMap::dissipative(&d);
        let cfg = LyapunovConfig {
            trajectories: 32,
            iterations: 20_000,
            variance: VACUUM_VARIANCE,
        };
        let res = lyapunov_exponent(&map, &cfg, &StreamSeeds::new(0)).unwrap();
        assert!(res.average < 0.0, "lambda = {}", res.average);
    }

    #[test]
    fn preconditions_enforced() {
        let d = DimensionlessParams::from_kick(2.0, AngleSpec::Symmetry(6), 0.5, 0.0, 0.0)
            .unwrap();
        let map = KickedMap::conservative(&d);
        let cfg = LyapunovConfig {
            trajectories: 1,
            iterations: 10,
            variance: VACUUM_VARIANCE,
        };
        assert!(lyapunov_exponent(&map, &cfg, &StreamSeeds::new(0)).is_err());
    }
}

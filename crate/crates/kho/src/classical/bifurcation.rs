//! Bifurcation scan of the damped map over the dissipation strength.

use crate::classical::KickedMap;
use crate::params::{AngleSpec, DimensionlessParams};
use crate::{parallel, Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct BifurcationSettings {
    /// Total iterations per damping value.
    pub transient: usize,
    /// How many trailing `u` values to keep.
    pub recorded: usize,
    /// Common initial condition in the dissipative frame; must avoid the
    /// fixed point at the origin.
    pub start: (f64, f64),
    /// Orbits whose coordinates exceed this magnitude are flagged
    /// divergent.
    pub divergence_threshold: f64,
}

impl Default for BifurcationSettings {
    fn default() -> Self {
        Self {
            transient: 1_000_000,
            recorded: 1000,
            start: (0.5, 0.5),
            divergence_threshold: 1e12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BifurcationPoint {
    pub half_damping: f64,
    /// The last `recorded` values of the `u` coordinate; empty when the
    /// orbit diverged.
    pub samples: Vec<f64>,
    pub divergent: bool,
}

/// Iterates the damped map `transient` times per damping value and records
/// the trailing `recorded` values of `u`.
pub fn bifurcation_scan(
    kick_damped: f64,
    angle: f64,
    dampings: &[f64],
    settings: &BifurcationSettings,
) -> Result<Vec<BifurcationPoint>> {
    if settings.recorded == 0 || settings.transient < settings.recorded {
        return Err(Error::InvalidParameter(
            "transient must be at least the recorded count".into(),
        ));
    }
    let results: Vec<Result<BifurcationPoint>> = parallel::map_range(dampings.len(), |idx| {
        let g = dampings[idx];
        let d = DimensionlessParams::from_damped_kick(
            kick_damped,
            AngleSpec::Angle(angle),
            1.0, // the Lamb-Dicke parameter does not enter the damped map
            g,
            0.0,
        )?;
        let map = KickedMap::dissipative(&d);
        let (mut v, mut u) = settings.start;
        let mut samples = Vec::with_capacity(settings.recorded);
        let skip = settings.transient - settings.recorded;
        let mut divergent = false;
        for k in 0..settings.transient {
            let s = map.step_coords(v, u);
            v = s.0;
            u = s.1;
            if !v.is_finite()
                || !u.is_finite()
                || v.abs() > settings.divergence_threshold
                || u.abs() > settings.divergence_threshold
            {
                divergent = true;
                samples.clear();
                break;
            }
            if k >= skip {
                samples.push(u);
            }
        }
        Ok(BifurcationPoint {
            half_damping: g,
            samples,
            divergent,
        })
    });
    results.into_iter().collect()
}

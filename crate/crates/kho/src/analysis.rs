//! Quantum-classical comparison: relative distance, breaking time,
//! parameter sweeps and the scaling fit.
//!
//! A comparison run pairs the scaled classical map over the vacuum-matched
//! Gaussian ensemble with the Fock-space evolution from the vacuum, records
//! `⟨Δv̄²⟩` on both sides after every kick, and reports the first kick at
//! which the relative distance `d_r = |var_cl - var_q| / var_cl` exceeds
//! the threshold ε. A run that never crosses within the kick budget yields
//! an explicitly unbounded breaking time, never a sentinel number.

use crate::classical::{ClassicalMoments, GaussianSpec, KickedMap, WeightedEnsemble};
use crate::params::{AngleSpec, DimensionlessParams, Frame};
use crate::quantum::{
    default_fock_dim, evolve_density_while, evolve_pure_while, DensityOperator, EnvKind,
    EnvironmentSpec, PureState, StateTolerances,
};
use crate::rng::{Domain, StreamSeeds};
use crate::{parallel, Error, Result};

/// Relative distance between classical and quantum variances.
pub fn relative_distance(var_cl: f64, var_q: f64) -> Result<f64> {
    if !(var_cl > 0.0) {
        return Err(Error::Numerical(format!(
            "classical variance underflow: {var_cl}"
        )));
    }
    Ok((var_cl - var_q).abs() / var_cl)
}

/// Breaking time in kicks; unbounded verdicts carry the budget they were
/// established under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakingTime {
    Finite(usize),
    Unbounded { budget: usize },
}

impl BreakingTime {
    pub fn kicks(&self) -> Option<usize> {
        match self {
            BreakingTime::Finite(k) => Some(*k),
            BreakingTime::Unbounded { .. } => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            BreakingTime::Finite(k) => *k as f64,
            BreakingTime::Unbounded { .. } => f64::INFINITY,
        }
    }
}

/// One kick of the paired moment trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrSample {
    pub kick: usize,
    pub var_cl: f64,
    pub var_q: f64,
    pub dr: f64,
}

#[derive(Debug, Clone)]
pub struct BreakingTimeResult {
    pub tau: BreakingTime,
    pub epsilon: f64,
    /// `d_r` per kick, up to the crossing (or the full budget).
    pub trace: Vec<DrSample>,
    /// Paired classical/quantum moment series over the same kicks.
    pub classical_moments: Vec<ClassicalMoments>,
    pub quantum_var_v: Vec<f64>,
}

impl BreakingTimeResult {
    pub fn max_dr(&self) -> f64 {
        self.trace.iter().map(|s| s.dr).fold(0.0, f64::max)
    }

    /// Crossing kick for a different threshold, evaluated on the recorded
    /// trace. Meaningful for `eps <= self.epsilon` when the run stopped
    /// early, and for any ε when it ran to budget.
    pub fn crossing_for(&self, eps: f64, budget: usize) -> BreakingTime {
        for s in &self.trace {
            if s.dr > eps {
                return BreakingTime::Finite(s.kick);
            }
        }
        BreakingTime::Unbounded { budget }
    }
}

/// Inputs of one quantum-classical comparison.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonConfig {
    pub params: DimensionlessParams,
    pub env_kind: EnvKind,
    /// Kick budget for the unbounded verdict.
    pub budget: usize,
    /// Relative-distance threshold.
    pub epsilon: f64,
    /// Monte Carlo sample count for the classical side.
    pub classical_samples: usize,
    /// Fock truncation; `None` picks `default_fock_dim(η)`.
    pub fock_dim: Option<usize>,
    pub seed: u64,
    /// Stop the quantum run at the crossing (cheaper) or always run the
    /// full budget (needed to evaluate larger thresholds afterwards).
    pub early_stop: bool,
    pub tolerances: StateTolerances,
}

impl ComparisonConfig {
    pub fn new(params: DimensionlessParams, env_kind: EnvKind) -> Self {
        Self {
            params,
            env_kind,
            budget: 50,
            epsilon: 0.1,
            classical_samples: 100_000,
            fock_dim: None,
            seed: 0,
            early_stop: true,
            tolerances: StateTolerances::default(),
        }
    }

    fn environment(&self) -> EnvironmentSpec {
        match self.env_kind {
            EnvKind::None => EnvironmentSpec::none(),
            EnvKind::Dissipative => {
                EnvironmentSpec::dissipative(self.params.damping_gamma_tau())
            }
            EnvKind::Diffusive => EnvironmentSpec::diffusive(self.params.gamma_tau()),
        }
    }

    fn classical_map(&self) -> Result<KickedMap> {
        Ok(match self.env_kind {
            EnvKind::None => KickedMap::scaled(&self.params),
            EnvKind::Dissipative => KickedMap::scaled_damped(&self.params),
            EnvKind::Diffusive => KickedMap::scaled_diffusive(&self.params)?,
        })
    }
}

/// Runs the paired evolution and measures the breaking time: the first
/// kick index with `d_r > ε`.
pub fn measure_breaking_time(cfg: &ComparisonConfig) -> Result<BreakingTimeResult> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {}",
            cfg.epsilon
        )));
    }
    if cfg.budget == 0 {
        return Err(Error::InvalidParameter("kick budget must be >= 1".into()));
    }
    let seeds = StreamSeeds::new(cfg.seed);
    let spec = GaussianSpec::vacuum_matched();

    // Classical side: full budget (cheap relative to the quantum run).
    let map = cfg.classical_map()?;
    let mut ensemble = WeightedEnsemble::sample_gaussian_matched(
        &spec,
        cfg.classical_samples,
        Frame::Scaled,
        &seeds,
    )?;
    let classical = ensemble.evolve(&map, cfg.budget, Some(&seeds))?;

    // Quantum side from the vacuum, stopping at the crossing if allowed.
    let n = cfg.fock_dim.unwrap_or_else(|| default_fock_dim(cfg.params.lamb_dicke));
    let env = cfg.environment();
    let mut trace: Vec<DrSample> = Vec::new();
    let quantum_var_v: Vec<f64>;
    let mut moment_mismatch: Option<f64> = None;
    {
        let keep_going = |rec: &crate::quantum::MomentRecord| -> bool {
            if rec.kick == 0 {
                return true;
            }
            let cl = &classical[rec.kick];
            let dr = (cl.var_v - rec.var_v).abs() / cl.var_v;
            trace.push(DrSample {
                kick: rec.kick,
                var_cl: cl.var_v,
                var_q: rec.var_v,
                dr,
            });
            !(cfg.early_stop && dr > cfg.epsilon)
        };
        let records = match cfg.env_kind {
            EnvKind::None => {
                let (_, recs) = evolve_pure_while(
                    PureState::vacuum(n),
                    &cfg.params,
                    cfg.budget,
                    &cfg.tolerances,
                    keep_going,
                )?;
                recs
            }
            _ => {
                let (_, recs) = evolve_density_while(
                    DensityOperator::vacuum(n),
                    &cfg.params,
                    &env,
                    cfg.budget,
                    &cfg.tolerances,
                    keep_going,
                )?;
                recs
            }
        };
        quantum_var_v = records.iter().map(|r| r.var_v).collect();
        let dv0 = (records[0].var_v - classical[0].var_v).abs();
        if dv0 > 1e-6 {
            moment_mismatch = Some(dv0);
        }
    }
    if let Some(dv0) = moment_mismatch {
        return Err(Error::Numerical(format!(
            "initial classical and quantum moments differ by {dv0:.3e}"
        )));
    }

    let tau = trace
        .iter()
        .find(|s| s.dr > cfg.epsilon)
        .map(|s| BreakingTime::Finite(s.kick))
        .unwrap_or(BreakingTime::Unbounded { budget: cfg.budget });
    Ok(BreakingTimeResult {
        tau,
        epsilon: cfg.epsilon,
        trace,
        classical_moments: classical,
        quantum_var_v,
    })
}

/// Sweep axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Eta,
    GammaTauHalf,
    Diffusion,
}

/// One sweep point; failures are recorded and do not abort the sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub seed: u64,
    pub outcome: std::result::Result<BreakingTimeResult, String>,
}

fn point_config(
    axis: SweepAxis,
    value: f64,
    base: &ComparisonConfig,
    seed: u64,
) -> Result<ComparisonConfig> {
    let mut cfg = *base;
    cfg.seed = seed;
    match axis {
        SweepAxis::Eta => {
            cfg.params = DimensionlessParams::from_kick(
                base.params.kick,
                AngleSpec::Angle(base.params.alpha),
                value,
                base.params.half_damping,
                base.params.diffusion,
            )?;
            // Truncation must follow eta across the sweep.
            cfg.fock_dim = None;
        }
        SweepAxis::GammaTauHalf => {
            cfg.params = DimensionlessParams::from_damped_kick(
                base.params.kick_damped,
                AngleSpec::Angle(base.params.alpha_bar),
                base.params.lamb_dicke,
                value,
                base.params.diffusion,
            )?;
            cfg.env_kind = EnvKind::Dissipative;
        }
        SweepAxis::Diffusion => {
            if value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diffusion must be nonnegative, got {value}"
                )));
            }
            cfg.params.diffusion = value;
            cfg.env_kind = EnvKind::Diffusive;
        }
    }
    Ok(cfg)
}

/// Runs one [`measure_breaking_time`] per axis value; points execute
/// independently and failures are carried in the output.
pub fn sweep(axis: SweepAxis, values: &[f64], base: &ComparisonConfig) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("sweep values must be finite".into()));
    }
    if values.windows(2).any(|w| w[0] > w[1]) && values.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("sweep values must be sorted".into()));
    }
    let master = StreamSeeds::new(base.seed);
    Ok(parallel::map_range(values.len(), |idx| {
        let value = values[idx];
        let seed = master.child(Domain::SweepPoint, idx as u64).master();
        let outcome = point_config(axis, value, base, seed)
            .and_then(|cfg| measure_breaking_time(&cfg))
            .map_err(|e| e.to_string());
        SweepPoint {
            axis_value: value,
            seed,
            outcome,
        }
    }))
}

/// Least-squares affine fit of τ_ħ against `ln(1/η)`.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
}

/// Fits the finite breaking times of an η sweep; needs at least four
/// finite points.
pub fn fit_scaling(etas: &[f64], taus: &[f64]) -> Result<ScalingFit> {
    if etas.len() != taus.len() {
        return Err(Error::InvalidParameter("mismatched fit inputs".into()));
    }
    let pts: Vec<(f64, f64)> = etas
        .iter()
        .zip(taus)
        .filter(|(_, t)| t.is_finite())
        .map(|(&e, &t)| ((1.0 / e).ln(), t))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs >= 4 finite points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::InsufficientData("degenerate abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let residuals: Vec<f64> = pts
        .iter()
        .map(|&(x, y)| y - (intercept + slope * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = pts.iter().map(|&(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ScalingFit {
        slope,
        intercept,
        residuals,
        r_squared,
    })
}

//! Weighted trajectory ensembles and their moment series.
//!
//! Deterministic evolution transports probability along trajectories
//! without ever touching the weights (`P_n(v_n, u_n) = P_0(v_0, u_0)`), so
//! averages are weighted sums over the co-moving points. Diffusive
//! evolution instead uses equal-weight Monte Carlo samples of the initial
//! distribution, each trajectory drawing from its own random stream.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::classical::KickedMap;
use crate::params::Frame;
use crate::rng::{Domain, StreamSeeds};
use crate::{parallel, Error, Result};

/// Trajectories processed per work unit; fixed so that reductions are
/// independent of the thread count.
const CHUNK: usize = 1024;

/// Ensemble variance per coordinate matching the vacuum Wigner function in
/// scaled coordinates.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Isotropic Gaussian phase-space distribution.
#[derive(Debug, Clone, Copy)]
pub struct GaussianSpec {
    pub center_v: f64,
    pub center_u: f64,
    /// Variance per coordinate.
    pub variance: f64,
}

impl GaussianSpec {
    /// Mean zero, variance 1/4 per coordinate: the classical twin of the
    /// vacuum state in scaled coordinates.
    pub fn vacuum_matched() -> Self {
        Self {
            center_v: 0.0,
            center_u: 0.0,
            variance: VACUUM_VARIANCE,
        }
    }

    /// Normalized density value at `(v, u)`.
    pub fn density(&self, v: f64, u: f64) -> f64 {
        let dv = v - self.center_v;
        let du = u - self.center_u;
        (-(dv * dv + du * du) / (2.0 * self.variance)).exp()
            / (std::f64::consts::TAU * self.variance)
    }
}

/// Per-kick weighted means and variances of both coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalMoments {
    pub kick: usize,
    pub mean_v: f64,
    pub mean_u: f64,
    pub var_v: f64,
    pub var_u: f64,
}

/// A set of phase-space points with attached nonnegative weights.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    /// `(v, u)` pairs.
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
    frame: Frame,
    total_weight: f64,
}

impl WeightedEnsemble {
    /// Builds an ensemble from explicit points and weights.
    pub fn new(points: Vec<(f64, f64)>, weights: Vec<f64>, frame: Frame) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::EmptyEnsemble);
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        let total_weight: f64 = weights.iter().sum();
        if total_weight <= 0.0 {
            return Err(Error::InvalidParameter("total weight must be positive".into()));
        }
        Ok(Self {
            points,
            weights,
            frame,
            total_weight,
        })
    }

    /// Equal-weight Monte Carlo sample of a Gaussian distribution.
    pub fn sample_gaussian(
        spec: &GaussianSpec,
        n: usize,
        frame: Frame,
        seeds: &StreamSeeds,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let sigma = spec.variance.sqrt();
        let mut rng = seeds.trajectory(Domain::EnsembleInit, 0);
        let points = (0..n)
            .map(|_| {
                let gv: f64 = rng.sample(StandardNormal);
                let gu: f64 = rng.sample(StandardNormal);
                (spec.center_v + sigma * gv, spec.center_u + sigma * gu)
            })
            .collect();
        Self::new(points, vec![1.0; n], frame)
    }

    /// Monte Carlo sample with its first two moments corrected to the
    /// exact Gaussian values (translate, then rescale per coordinate), so
    /// quantum-classical comparisons start from identical moments.
    pub fn sample_gaussian_matched(
        spec: &GaussianSpec,
        n: usize,
        frame: Frame,
        seeds: &StreamSeeds,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::EmptyEnsemble);
        }
        let mut out = Self::sample_gaussian(spec, n, frame, seeds)?;
        let m = out.moments(0);
        let sv = (spec.variance / m.var_v).sqrt();
        let su = (spec.variance / m.var_u).sqrt();
        for p in &mut out.points {
            p.0 = spec.center_v + (p.0 - m.mean_v) * sv;
            p.1 = spec.center_u + (p.1 - m.mean_u) * su;
        }
        Ok(out)
    }

    /// Uniform grid of trajectories weighted by the initial density; the
    /// transport picture of the deterministic dynamics.
    pub fn gaussian_quadrature_grid(
        spec: &GaussianSpec,
        n_side: usize,
        half_extent_sigmas: f64,
        frame: Frame,
    ) -> Result<Self> {
        if n_side < 2 {
            return Err(Error::EmptyEnsemble);
        }
        let half = half_extent_sigmas * spec.variance.sqrt();
        let step = 2.0 * half / n_side as f64;
        let mut points = Vec::with_capacity(n_side * n_side);
        let mut weights = Vec::with_capacity(n_side * n_side);
        for i in 0..n_side {
            let v = spec.center_v - half + (i as f64 + 0.5) * step;
            for j in 0..n_side {
                let u = spec.center_u - half + (j as f64 + 0.5) * step;
                points.push((v, u));
                weights.push(spec.density(v, u));
            }
        }
        Self::new(points, weights, frame)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted means and variances of the current points.
    pub fn moments(&self, kick: usize) -> ClassicalMoments {
        let mut acc = [0.0f64; 5];
        for (&(v, u), &w) in self.points.iter().zip(&self.weights) {
            acc[0] += w;
            acc[1] += w * v;
            acc[2] += w * u;
            acc[3] += w * v * v;
            acc[4] += w * u * u;
        }
        moments_from_acc(kick, &acc)
    }

    /// Advances every trajectory by `kicks` applications of the map,
    /// recording moments before the first kick and after each one.
    ///
    /// Weights are left untouched. For a diffusive map, `seeds` must be
    /// provided; every trajectory then draws from its own stream so the
    /// result is independent of scheduling.
    pub fn evolve(
        &mut self,
        map: &KickedMap,
        kicks: usize,
        seeds: Option<&StreamSeeds>,
    ) -> Result<Vec<ClassicalMoments>> {
        if self.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if self.frame != map.frame() {
            return Err(Error::FrameMismatch {
                expected: map.frame(),
                got: self.frame,
            });
        }
        let diffusive = map.is_diffusive();
        if diffusive && seeds.is_none() {
            return Err(Error::InvalidParameter(
                "diffusive evolution needs a random stream factory".into(),
            ));
        }
        let sigma = map.noise_variance().sqrt();
        let weights = &self.weights;
        let seeds_copy = seeds.copied();

        // Per chunk, per kick: [sum w, sum wv, sum wu, sum wv^2, sum wu^2].
        let partials = parallel::map_chunks_mut(&mut self.points, CHUNK, |chunk_idx, chunk| {
            let offset = chunk_idx * CHUNK;
            let w_slice = &weights[offset..offset + chunk.len()];
            let mut acc = vec![[0.0f64; 5]; kicks + 1];
            for (j, point) in chunk.iter_mut().enumerate() {
                let w = w_slice[j];
                let (mut v, mut u) = *point;
                accumulate(&mut acc[0], w, v, u);
                let mut rng = seeds_copy
                    .as_ref()
                    .map(|s| s.trajectory(Domain::DiffusiveNoise, (offset + j) as u64));
                for k in 1..=kicks {
                    let stepped = map.step_coords(v, u);
                    v = stepped.0;
                    u = stepped.1;
                    if diffusive {
                        let rng = rng.as_mut().expect("checked above");
                        let dv: f64 = rng.sample(StandardNormal);
                        let du: f64 = rng.sample(StandardNormal);
                        v += sigma * dv;
                        u += sigma * du;
                    }
                    accumulate(&mut acc[k], w, v, u);
                }
                *point = (v, u);
            }
            acc
        });

        // Sequential reduction in chunk order keeps results bit-stable.
        let mut totals = vec![[0.0f64; 5]; kicks + 1];
        for part in &partials {
            for (t, p) in totals.iter_mut().zip(part) {
                for i in 0..5 {
                    t[i] += p[i];
                }
            }
        }
        Ok(totals
            .iter()
            .enumerate()
            .map(|(k, acc)| moments_from_acc(k, acc))
            .collect())
    }
}

#[inline]
fn accumulate(acc: &mut [f64; 5], w: f64, v: f64, u: f64) {
    acc[0] += w;
    acc[1] += w * v;
    acc[2] += w * u;
    acc[3] += w * v * v;
    acc[4] += w * u * u;
}

fn moments_from_acc(kick: usize, acc: &[f64; 5]) -> ClassicalMoments {
    let w = acc[0];
    let mean_v = acc[1] / w;
    let mean_u = acc[2] / w;
    ClassicalMoments {
        kick,
        mean_v,
        mean_u,
        var_v: (acc[3] / w - mean_v * mean_v).max(0.0),
        var_u: (acc[4] / w - mean_u * mean_u).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{AngleSpec, ClassicalState, DimensionlessParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn params(kick: f64, angle: f64) -> DimensionlessParams {
        DimensionlessParams::from_kick(kick, AngleSpec::Angle(angle), 0.5, 0.0, 0.0).unwrap()
    }

    #[test]
    fn initial_moments_match_vacuum_gaussian() {
        let spec = GaussianSpec::vacuum_matched();
        let grid =
            WeightedEnsemble::gaussian_quadrature_grid(&spec, 301, 7.0, Frame::Scaled).unwrap();
        let m = grid.moments(0);
        assert!(m.mean_v.abs() < 1e-12 && m.mean_u.abs() < 1e-12);
        assert!((m.var_v - 0.25).abs() < 1e-6, "var_v={}", m.var_v);
        assert!((m.var_u - 0.25).abs() < 1e-6);

        let seeds = StreamSeeds::new(0);
        let mc = WeightedEnsemble::sample_gaussian(&spec, 100_000, Frame::Scaled, &seeds).unwrap();
        let m = mc.moments(0);
        // 3 sigma statistical windows.
        assert!(m.mean_v.abs() < 3.0 * 0.5 / (100_000f64).sqrt());
        assert!((m.var_v - 0.25).abs() < 3.0 * 0.25 * (2.0f64 / 100_000.0).sqrt());
    }

    #[test]
    fn single_trajectory_period_four() {
        let d = params(0.0, FRAC_PI_2);
        let map = KickedMap::conservative(&d);
        let mut e =
            WeightedEnsemble::new(vec![(1.0, 0.0)], vec![1.0], Frame::Raw).unwrap();
        let moments = e.evolve(&map, 4, None).unwrap();
        assert_eq!(moments.len(), 5);
        assert!((e.points()[0].0 - 1.0).abs() < 1e-14);
        assert!(e.points()[0].1.abs() < 1e-14);
    }

    #[test]
    fn weights_and_total_weight_unchanged() {
        let d = params(2.0, FRAC_PI_3);
        let map = KickedMap::conservative(&d);
        let spec = GaussianSpec::vacuum_matched();
        let mut e =
            WeightedEnsemble::gaussian_quadrature_grid(&spec, 51, 6.0, Frame::Raw).unwrap();
        let before: Vec<f64> = e.weights().to_vec();
        let w0 = e.total_weight();
        e.evolve(&map, 25, None).unwrap();
        assert_eq!(e.weights(), before.as_slice());
        assert_eq!(e.total_weight(), w0);
    }

    #[test]
    fn evolve_agrees_with_single_steps() {
        let d = params(2.0, FRAC_PI_3);
        let map = KickedMap::conservative(&d);
        let pts = vec![(0.3, -0.7), (1.1, 0.2), (-0.4, 0.9)];
        let mut e = WeightedEnsemble::new(pts.clone(), vec![1.0, 2.0, 0.5], Frame::Raw).unwrap();
        e.evolve(&map, 3, None).unwrap();
        for (idx, &(v0, u0)) in pts.iter().enumerate() {
            let mut s = ClassicalState::new(v0, u0, Frame::Raw);
            for _ in 0..3 {
                s = map.step(s).unwrap();
            }
            assert!((e.points()[idx].0 - s.v).abs() < 1e-14);
            assert!((e.points()[idx].1 - s.u).abs() < 1e-14);
        }
    }

    #[test]
    fn diffusive_variance_grows_linearly_without_kicks() {
        // K = 0: after n kicks from a point at the origin the variance per
        // coordinate is n * D (rotation preserves isotropic spread).
        let mut d = params(0.0, FRAC_PI_3);
        d.diffusion = 0.02;
        let map = KickedMap::scaled_diffusive(&d).unwrap();
        let n_samples = 100_000;
        let mut e = WeightedEnsemble::new(
            vec![(0.0, 0.0); n_samples],
            vec![1.0; n_samples],
            Frame::Scaled,
        )
        .unwrap();
        let seeds = StreamSeeds::new(7);
        let kicks = 8;
        let moments = e.evolve(&map, kicks, Some(&seeds)).unwrap();
        let expect = kicks as f64 * d.diffusion;
        // Var(sample variance) ~ 2 var^2 / n.
        let tol = 3.0 * expect * (2.0 / n_samples as f64).sqrt();
        let last = moments.last().unwrap();
        assert!((last.var_v - expect).abs() < tol, "{} vs {expect}", last.var_v);
        assert!((last.var_u - expect).abs() < tol);
    }

    #[test]
    fn diffusive_needs_seeds_and_empty_rejected() {
        let mut d = params(0.0, FRAC_PI_3);
        d.diffusion = 0.02;
        let map = KickedMap::scaled_diffusive(&d).unwrap();
        let mut e =
            WeightedEnsemble::new(vec![(0.0, 0.0)], vec![1.0], Frame::Scaled).unwrap();
        assert!(e.evolve(&map, 1, None).is_err());
        assert!(WeightedEnsemble::new(vec![], vec![], Frame::Scaled).is_err());
    }

    #[test]
    fn diffusive_result_is_reproducible() {
        let mut d = params(2.0, FRAC_PI_3);
        d.diffusion = 0.01;
        let map = KickedMap::scaled_diffusive(&d).unwrap();
        let seeds = StreamSeeds::new(3);
        let spec = GaussianSpec::vacuum_matched();
        let mut a = WeightedEnsemble::sample_gaussian(&spec, 5000, Frame::Scaled, &seeds).unwrap();
        let mut b = a.clone();
        let ma = a.evolve(&map, 6, Some(&seeds)).unwrap();
        let mb = b.evolve(&map, 6, Some(&seeds)).unwrap();
        assert_eq!(ma, mb);
        assert_eq!(a.points(), b.points());
    }
}

//! The stroboscopic kicked-oscillator map in its coordinate frames.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::params::{ClassicalState, DimensionlessParams, Frame};
use crate::{Error, Result};

/// One-kick map `(v, u) -> e^{-Γτ/2} R(θ) (v, u + kick(v))`.
///
/// The kick term is `K sin v` in the raw and dissipative frames and
/// `(K/2η) sin(2η v̄)` in the scaled frame; `R(θ)` is the clockwise rotation
/// matching `v + i u -> e^{-iθ}(v + i u)`. Diffusive variants additionally
/// add an isotropic Gaussian increment after the rotation, which is the
/// exact inter-kick solution of the corresponding Fokker-Planck transport
/// because isotropic diffusion commutes with rotation.
#[derive(Debug, Clone, Copy)]
pub struct KickedMap {
    kick: f64,
    angle: f64,
    half_damping: f64,
    /// Per-kick Gaussian variance added to each coordinate.
    noise_variance: f64,
    frame: Frame,
    two_eta: f64,
}

impl KickedMap {
    /// Undamped map in the raw `(v, u)` frame.
    pub fn conservative(d: &DimensionlessParams) -> Self {
        Self {
            kick: d.kick,
            angle: d.alpha,
            half_damping: 0.0,
            noise_variance: 0.0,
            frame: Frame::Raw,
            two_eta: 2.0 * d.lamb_dicke,
        }
    }

    /// Damped map in the `(v', u')` frame: kick `K' sin v`, rotate by `ᾱ`,
    /// contract by `e^{-Γτ/2}`.
    pub fn dissipative(d: &DimensionlessParams) -> Self {
        Self {
            kick: d.kick_damped,
            angle: d.alpha_bar,
            half_damping: d.half_damping,
            noise_variance: 0.0,
            frame: Frame::Dissipative,
            two_eta: 2.0 * d.lamb_dicke,
        }
    }

    /// Undamped map in scaled `(v̄, ū)` coordinates.
    pub fn scaled(d: &DimensionlessParams) -> Self {
        Self {
            kick: d.kick,
            angle: d.alpha,
            half_damping: 0.0,
            noise_variance: 0.0,
            frame: Frame::Scaled,
            two_eta: 2.0 * d.lamb_dicke,
        }
    }

    /// Damped map in scaled coordinates (kick `K'`, rotation `ᾱ`).
    pub fn scaled_damped(d: &DimensionlessParams) -> Self {
        Self {
            kick: d.kick_damped,
            angle: d.alpha_bar,
            half_damping: d.half_damping,
            noise_variance: 0.0,
            frame: Frame::Scaled,
            two_eta: 2.0 * d.lamb_dicke,
        }
    }

    /// Diffusive map in scaled coordinates; per-kick variance `D = γτ/2`
    /// per coordinate.
    pub fn scaled_diffusive(d: &DimensionlessParams) -> Result<Self> {
        Self::with_noise(Self::scaled(d), d.diffusion)
    }

    /// Diffusive map in the raw frame; per-kick variance `2𝒟τ = 4η²D`.
    pub fn raw_diffusive(d: &DimensionlessParams) -> Result<Self> {
        let variance = 4.0 * d.lamb_dicke * d.lamb_dicke * d.diffusion;
        Self::with_noise(Self::conservative(d), variance)
    }

    fn with_noise(mut base: Self, variance: f64) -> Result<Self> {
        if variance < 0.0 || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "diffusion variance must be nonnegative, got {variance}"
            )));
        }
        base.noise_variance = variance;
        Ok(base)
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn is_diffusive(&self) -> bool {
        self.noise_variance > 0.0
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn kick_strength(&self) -> f64 {
        self.kick
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn half_damping(&self) -> f64 {
        self.half_damping
    }

    fn kick_term(&self, v: f64) -> f64 {
        match self.frame {
            Frame::Raw | Frame::Dissipative => self.kick * v.sin(),
            Frame::Scaled => self.kick / self.two_eta * (self.two_eta * v).sin(),
        }
    }

    /// d(kick_term)/dv at `v`; `K cos v` in all frames (the `2η` factors
    /// cancel in the scaled frame).
    fn kick_slope(&self, v: f64) -> f64 {
        match self.frame {
            Frame::Raw | Frame::Dissipative => self.kick * v.cos(),
            Frame::Scaled => self.kick * (self.two_eta * v).cos(),
        }
    }

    #[inline]
    pub(crate) fn step_coords(&self, v: f64, u: f64) -> (f64, f64) {
        let kicked = u + self.kick_term(v);
        let (sin_a, cos_a) = self.angle.sin_cos();
        let decay = (-self.half_damping).exp();
        (
            decay * (cos_a * v + sin_a * kicked),
            decay * (-sin_a * v + cos_a * kicked),
        )
    }

    /// Deterministic one-kick step. Errors on a frame mismatch.
    pub fn step(&self, s: ClassicalState) -> Result<ClassicalState> {
        s.expect_frame(self.frame)?;
        let (v, u) = self.step_coords(s.v, s.u);
        Ok(ClassicalState::new(v, u, self.frame))
    }

    /// One kick of the diffusive dynamics: deterministic step followed by
    /// independent Gaussian increments on both coordinates. With zero
    /// noise variance this reduces exactly to [`KickedMap::step`].
    pub fn step_diffusive<R: Rng>(&self, s: ClassicalState, rng: &mut R) -> Result<ClassicalState> {
        let stepped = self.step(s)?;
        if self.noise_variance == 0.0 {
            return Ok(stepped);
        }
        let sigma = self.noise_variance.sqrt();
        let dv: f64 = rng.sample(StandardNormal);
        let du: f64 = rng.sample(StandardNormal);
        Ok(ClassicalState::new(
            stepped.v + sigma * dv,
            stepped.u + sigma * du,
            self.frame,
        ))
    }

    /// Exact algebraic inverse: un-damp, rotate back, remove the kick.
    /// Guards against overflow of the `e^{+Γτ/2}` amplification.
    pub fn inverse_step(&self, s: ClassicalState) -> Result<ClassicalState> {
        s.expect_frame(self.frame)?;
        if self.is_diffusive() {
            return Err(Error::InvalidParameter(
                "diffusive dynamics has no deterministic inverse".into(),
            ));
        }
        let grow = self.half_damping.exp();
        let gv = s.v * grow;
        let gu = s.u * grow;
        if !gv.is_finite() || !gu.is_finite() || gv.abs() > 1e300 || gu.abs() > 1e300 {
            return Err(Error::Numerical(format!(
                "inverse step amplification overflow at ({}, {})",
                s.v, s.u
            )));
        }
        let (sin_a, cos_a) = self.angle.sin_cos();
        let v = cos_a * gv - sin_a * gu;
        let kicked = sin_a * gv + cos_a * gu;
        let u = kicked - self.kick_term(v);
        Ok(ClassicalState::new(v, u, self.frame))
    }

    /// Tangent-map Jacobian at pre-kick coordinate `v`:
    /// `e^{-Γτ/2} R(θ) [[1, 0], [K cos v, 1]]`, row-major.
    pub fn jacobian(&self, v: f64) -> [[f64; 2]; 2] {
        let slope = self.kick_slope(v);
        let (sin_a, cos_a) = self.angle.sin_cos();
        let decay = (-self.half_damping).exp();
        [
            [
                decay * (cos_a + sin_a * slope),
                decay * sin_a,
            ],
            [
                decay * (-sin_a + cos_a * slope),
                decay * cos_a,
            ],
        ]
    }

    /// Applies the Jacobian at `v` to a tangent vector.
    #[inline]
    pub(crate) fn tangent_step(&self, v: f64, w: (f64, f64)) -> (f64, f64) {
        let j = self.jacobian(v);
        (
            j[0][0] * w.0 + j[0][1] * w.1,
            j[1][0] * w.0 + j[1][1] * w.1,
        )
    }
}

//! Parameter sets, unit conversions and coordinate frames.
//!
//! Every other module takes a [`DimensionlessParams`] value, so the
//! conventions are fixed in one place:
//!
//! * kick strength `K = A k² / (m ν)` and its damped companion
//!   `K' = A k² / (m Ω)` with `Ω = sqrt(ν² − Γ²/4)`;
//! * rotation angles per kick `α = ν τ` and `ᾱ = Ω τ`;
//! * Lamb-Dicke parameter `η = k sqrt(1 / 2 m ν)` (ħ is fixed to 1, so η²
//!   is the effective Planck constant of the model);
//! * quantum kick coefficient `K_q = K / 2η²`;
//! * `half_damping = Γτ/2` and dimensionless diffusion `D = γτ/2`.
//!
//! Phase-space points carry an explicit [`Frame`] tag. The raw frame is
//! `(v, u) = (k x, k p / m ν)`, the dissipative frame rescales momentum by
//! `ν/Ω`, and the scaled frame is `(v̄, ū) = (v, u) / 2η`, matching
//! `⟨â⟩ = v̄ + i ū` on the quantum side. Cross-frame arithmetic is rejected
//! rather than silently reinterpreted.

use crate::{Error, Result};

/// Raw inputs in physical units. Only ratios enter the dynamics; this type
/// exists so laboratory-style parameter sets can be reduced to
/// [`DimensionlessParams`] in a single audited place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Particle mass `m` (arbitrary mass unit).
    pub mass: f64,
    /// Trap frequency `ν` in rad/time.
    pub trap_freq: f64,
    /// Kick wavevector `k` (1/length).
    pub wavevector: f64,
    /// Kick amplitude `A` (action).
    pub kick_amplitude: f64,
    /// Kick period `τ` (time).
    pub kick_period: f64,
    /// Dissipation rate `Γ` (1/time); zero disables damping.
    pub damping_rate: f64,
    /// Diffusive reservoir rate `γ` (1/time); zero disables diffusion.
    pub diffusive_rate: f64,
    /// Classical diffusion coefficient `𝒟` in `(v, u)` coordinates
    /// (dimensionless area per time). Must equal `γ η²` when both are set.
    pub classical_diffusion: f64,
}

impl PhysicalParams {
    /// Lamb-Dicke parameter `η = k sqrt(1 / 2 m ν)` with ħ = 1.
    pub fn lamb_dicke(&self) -> f64 {
        self.wavevector * (0.5 / (self.mass * self.trap_freq)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("trap_freq", self.trap_freq),
            ("wavevector", self.wavevector),
            ("kick_period", self.kick_period),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let nonneg = [
            ("damping_rate", self.damping_rate),
            ("diffusive_rate", self.diffusive_rate),
            ("classical_diffusion", self.classical_diffusion),
            ("kick_amplitude", self.kick_amplitude),
        ];
        for (name, value) in nonneg {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative and finite, got {value}"
                )));
            }
        }
        if self.damping_rate >= 2.0 * self.trap_freq {
            return Err(Error::InvalidParameter(format!(
                "damping rate {} >= 2 nu = {}: oscillation frequency would be imaginary",
                self.damping_rate,
                2.0 * self.trap_freq
            )));
        }
        // When both the reservoir rate and the classical coefficient are
        // supplied they must describe the same diffusion: gamma = D / eta^2.
        if self.diffusive_rate > 0.0 && self.classical_diffusion > 0.0 {
            let eta = self.lamb_dicke();
            let implied = self.classical_diffusion / (eta * eta);
            let rel = (implied - self.diffusive_rate).abs() / self.diffusive_rate;
            if rel > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "inconsistent diffusion inputs: gamma = {} but D/eta^2 = {}",
                    self.diffusive_rate, implied
                )));
            }
        }
        Ok(())
    }
}

/// Coordinate frame of a classical phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `(v, u) = (k x, k p / m ν)`.
    Raw,
    /// `(v', u') = (k x, k p / m Ω)`; the natural frame of the damped map.
    Dissipative,
    /// `(v̄, ū) = (v, u) / 2η`; matches `⟨â⟩ = v̄ + i ū`.
    Scaled,
}

/// A phase-space point together with its frame tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub v: f64,
    pub u: f64,
    pub frame: Frame,
}

impl ClassicalState {
    pub fn new(v: f64, u: f64, frame: Frame) -> Self {
        Self { v, u, frame }
    }

    /// Checks the frame tag, returning a `FrameMismatch` error on failure.
    pub fn expect_frame(&self, expected: Frame) -> Result<()> {
        if self.frame == expected {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected,
                got: self.frame,
            })
        }
    }
}

/// Derived dimensionless parameter set; the single currency understood by
/// the classical maps, the Fock-space engine and the Bessel-sum engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// Kick strength `K = A k² / m ν`.
    pub kick: f64,
    /// Damped-frame kick strength `K' = A k² / m Ω = K ν / Ω`.
    pub kick_damped: f64,
    /// Rotation per kick `α = ν τ`.
    pub alpha: f64,
    /// Damped rotation per kick `ᾱ = Ω τ`.
    pub alpha_bar: f64,
    /// Symmetry index when `α = 2π/q`; informational only, `alpha` is
    /// authoritative.
    pub symmetry: Option<u32>,
    /// Lamb-Dicke parameter `η`.
    pub lamb_dicke: f64,
    /// Quantum kick coefficient `K_q = K / 2η²`.
    pub quantum_kick: f64,
    /// `Γτ/2`.
    pub half_damping: f64,
    /// Dimensionless diffusion `D = γτ/2` in the scaled frame.
    pub diffusion: f64,
}

/// Rotation angle per kick, either direct or through the web symmetry
/// index `q` (`α = 2π/q` evaluated exactly in floating point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSpec {
    Symmetry(u32),
    Angle(f64),
}

impl AngleSpec {
    fn resolve(self) -> Result<(f64, Option<u32>)> {
        match self {
            AngleSpec::Symmetry(q) => {
                if q < 1 {
                    return Err(Error::InvalidParameter("symmetry index q must be >= 1".into()));
                }
                Ok((std::f64::consts::TAU / q as f64, Some(q)))
            }
            AngleSpec::Angle(a) => {
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "rotation angle must be positive and finite, got {a}"
                    )));
                }
                Ok((a, None))
            }
        }
    }
}

impl DimensionlessParams {
    /// Reduces a physical parameter set. Rejects `Γ ≥ 2ν` and non-positive
    /// mass, frequency, wavevector or period.
    pub fn from_physical(p: &PhysicalParams) -> Result<Self> {
        p.validate()?;
        let eta = p.lamb_dicke();
        let kick = p.kick_amplitude * p.wavevector * p.wavevector / (p.mass * p.trap_freq);
        let omega = (p.trap_freq * p.trap_freq - 0.25 * p.damping_rate * p.damping_rate).sqrt();
        let kick_damped = if p.damping_rate == 0.0 {
            kick
        } else {
            p.kick_amplitude * p.wavevector * p.wavevector / (p.mass * omega)
        };
        let alpha = p.trap_freq * p.kick_period;
        let alpha_bar = if p.damping_rate == 0.0 {
            alpha
        } else {
            omega * p.kick_period
        };
        let diffusive_rate = if p.diffusive_rate > 0.0 {
            p.diffusive_rate
        } else {
            p.classical_diffusion / (eta * eta)
        };
        let out = Self {
            kick,
            kick_damped,
            alpha,
            alpha_bar,
            symmetry: None,
            lamb_dicke: eta,
            quantum_kick: kick / (2.0 * eta * eta),
            half_damping: 0.5 * p.damping_rate * p.kick_period,
            diffusion: 0.5 * diffusive_rate * p.kick_period,
        };
        out.validate()?;
        Ok(out)
    }

    /// Builds the set from the undamped-frame kick strength `K`; the angle
    /// spec fixes `α` and the damped quantities follow from
    /// `ᾱ = sqrt(α² − (Γτ/2)²)`, `K' = K α/ᾱ`.
    pub fn from_kick(
        kick: f64,
        angle: AngleSpec,
        lamb_dicke: f64,
        half_damping: f64,
        diffusion: f64,
    ) -> Result<Self> {
        let (alpha, symmetry) = angle.resolve()?;
        if half_damping >= alpha {
            return Err(Error::InvalidParameter(format!(
                "half_damping {half_damping} >= alpha {alpha}: equivalent to gamma >= 2 nu"
            )));
        }
        let alpha_bar = if half_damping == 0.0 {
            alpha
        } else {
            (alpha * alpha - half_damping * half_damping).sqrt()
        };
        let kick_damped = if half_damping == 0.0 {
            kick
        } else {
            kick * alpha / alpha_bar
        };
        let out = Self {
            kick,
            kick_damped,
            alpha,
            alpha_bar,
            symmetry,
            lamb_dicke,
            quantum_kick: kick / (2.0 * lamb_dicke * lamb_dicke),
            half_damping,
            diffusion,
        };
        out.validate()?;
        Ok(out)
    }

    /// Builds the set from the damped-frame kick strength `K'`; the angle
    /// spec fixes `ᾱ` and `α = sqrt(ᾱ² + (Γτ/2)²)`, `K = K' ᾱ/α`.
    pub fn from_damped_kick(
        kick_damped: f64,
        angle: AngleSpec,
        lamb_dicke: f64,
        half_damping: f64,
        diffusion: f64,
    ) -> Result<Self> {
        let (alpha_bar, symmetry) = angle.resolve()?;
        let alpha = if half_damping == 0.0 {
            alpha_bar
        } else {
            (alpha_bar * alpha_bar + half_damping * half_damping).sqrt()
        };
        let kick = if half_damping == 0.0 {
            kick_damped
        } else {
            kick_damped * alpha_bar / alpha
        };
        let out = Self {
            kick,
            kick_damped,
            alpha,
            alpha_bar,
            symmetry,
            lamb_dicke,
            quantum_kick: kick / (2.0 * lamb_dicke * lamb_dicke),
            half_damping,
            diffusion,
        };
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lamb_dicke > 0.0) || !self.lamb_dicke.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lamb_dicke must be positive, got {}",
                self.lamb_dicke
            )));
        }
        if self.half_damping < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "half_damping must be nonnegative, got {}",
                self.half_damping
            )));
        }
        if self.diffusion < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "diffusion must be nonnegative, got {}",
                self.diffusion
            )));
        }
        for (name, value) in [("kick", self.kick), ("alpha", self.alpha)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Effective chaoticity parameter `K̄ = K sin α`.
    pub fn kbar(&self) -> f64 {
        self.kick * self.alpha.sin()
    }

    /// Damped-frame chaoticity parameter `K̄' = K' sin ᾱ`.
    pub fn kbar_damped(&self) -> f64 {
        self.kick_damped * self.alpha_bar.sin()
    }

    /// `e^{-Γτ/2}`, the per-kick contraction factor.
    pub fn damping_factor(&self) -> f64 {
        (-self.half_damping).exp()
    }

    /// `γτ` for the quantum diffusion channel (`D = γτ/2`).
    pub fn gamma_tau(&self) -> f64 {
        2.0 * self.diffusion
    }

    /// `Γτ` for the quantum damping channel (`half_damping = Γτ/2`).
    pub fn damping_gamma_tau(&self) -> f64 {
        2.0 * self.half_damping
    }

    /// Kick coefficient of the damped-frame quantum map, `K' / 2η²`.
    pub fn quantum_kick_damped(&self) -> f64 {
        self.kick_damped / (2.0 * self.lamb_dicke * self.lamb_dicke)
    }

    /// Converts a state between frames. Raw↔Scaled divides/multiplies both
    /// coordinates by `2η`; Raw↔Dissipative rescales only the momentum-like
    /// coordinate by `ν/Ω = α/ᾱ`.
    pub fn scale_state(&self, s: ClassicalState, target: Frame) -> ClassicalState {
        if s.frame == target {
            return s;
        }
        let two_eta = 2.0 * self.lamb_dicke;
        let nu_over_omega = self.alpha / self.alpha_bar;
        let raw = match s.frame {
            Frame::Raw => (s.v, s.u),
            Frame::Scaled => (s.v * two_eta, s.u * two_eta),
            Frame::Dissipative => (s.v, s.u / nu_over_omega),
        };
        let (v, u) = match target {
            Frame::Raw => raw,
            Frame::Scaled => (raw.0 / two_eta, raw.1 / two_eta),
            Frame::Dissipative => (raw.0, raw.1 * nu_over_omega),
        };
        ClassicalState::new(v, u, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, PI, TAU};

    fn physical(gamma: f64) -> PhysicalParams {
        PhysicalParams {
            mass: 1.0,
            trap_freq: 1.0,
            wavevector: 1.0,
            kick_amplitude: 2.0,
            kick_period: FRAC_PI_3,
            damping_rate: gamma,
            diffusive_rate: 0.0,
            classical_diffusion: 0.0,
        }
    }

    #[test]
    fn zero_damping_degeneracy() {
        let d = DimensionlessParams::from_physical(&physical(0.0)).unwrap();
        assert_eq!(d.kick, d.kick_damped);
        assert_eq!(d.alpha, d.alpha_bar);
        assert_eq!(d.half_damping, 0.0);
    }

    #[test]
    fn half_damping_matches_gamma_tau_over_two() {
        // Gamma = 0.72 / tau so that Gamma tau / 2 = 0.36.
        let mut p = physical(0.0);
        p.damping_rate = 0.72 / p.kick_period;
        let d = DimensionlessParams::from_physical(&p).unwrap();
        assert!((d.half_damping - 0.36).abs() < 1e-15);
    }

    #[test]
    fn quantum_kick_from_eta_and_kick() {
        let d =
            DimensionlessParams::from_kick(2.0, AngleSpec::Symmetry(6), 0.5, 0.0, 0.0).unwrap();
        assert!((d.quantum_kick - 4.0).abs() < 1e-15);
        // Consistency K_q * 2 eta^2 = K.
        let back = d.quantum_kick * 2.0 * d.lamb_dicke * d.lamb_dicke;
        assert!((back - d.kick).abs() / d.kick < 1e-12);
    }

    #[test]
    fn symmetry_sets_alpha_exactly() {
        let d =
            DimensionlessParams::from_kick(1.0, AngleSpec::Symmetry(6), 0.1, 0.0, 0.0).unwrap();
        assert_eq!(d.alpha, TAU / 6.0);
        assert_eq!(d.symmetry, Some(6));
    }

    #[test]
    fn rejects_overdamped_and_nonpositive() {
        let mut p = physical(0.0);
        p.damping_rate = 2.0;
        assert!(DimensionlessParams::from_physical(&p).is_err());
        let mut p = physical(0.0);
        p.mass = 0.0;
        assert!(DimensionlessParams::from_physical(&p).is_err());
        let mut p = physical(0.0);
        p.trap_freq = -1.0;
        assert!(DimensionlessParams::from_physical(&p).is_err());
    }

    #[test]
    fn diffusion_consistency_between_gamma_and_classical_coefficient() {
        let mut p = physical(0.0);
        p.diffusive_rate = 0.4;
        let eta = p.lamb_dicke();
        p.classical_diffusion = 0.4 * eta * eta;
        let d = DimensionlessParams::from_physical(&p).unwrap();
        let expected = 0.5 * 0.4 * p.kick_period;
        assert!((d.diffusion - expected).abs() / expected < 1e-12);
        // D = (cal D / eta^2) * tau / 2 route.
        let implied = p.classical_diffusion / (eta * eta) * p.kick_period / 2.0;
        assert!((d.diffusion - implied).abs() / implied < 1e-12);

        p.classical_diffusion = 0.9 * eta * eta;
        assert!(DimensionlessParams::from_physical(&p).is_err());
    }

    #[test]
    fn damped_kick_grows_with_damping() {
        // K'(Gamma) >= K and K' -> K monotonically as Gamma -> 0.
        let mut last = f64::INFINITY;
        for i in (1..40).rev() {
            let gamma = 1.9 * i as f64 / 40.0;
            let d = DimensionlessParams::from_physical(&physical(gamma)).unwrap();
            assert!(d.kick_damped >= d.kick);
            assert!(d.kick_damped <= last);
            last = d.kick_damped;
        }
        let d0 = DimensionlessParams::from_physical(&physical(1e-8)).unwrap();
        assert!((d0.kick_damped - d0.kick).abs() < 1e-8);
    }

    #[test]
    fn from_damped_kick_round_trips_against_from_kick() {
        let g = 0.36;
        let a = DimensionlessParams::from_kick(2.0, AngleSpec::Symmetry(6), 0.5, g, 0.0).unwrap();
        let b = DimensionlessParams::from_damped_kick(
            a.kick_damped,
            AngleSpec::Angle(a.alpha_bar),
            0.5,
            g,
            0.0,
        )
        .unwrap();
        assert!((b.kick - a.kick).abs() < 1e-12);
        assert!((b.alpha - a.alpha).abs() < 1e-12);
    }

    #[test]
    fn derive_is_bitwise_deterministic() {
        let a = DimensionlessParams::from_physical(&physical(0.7)).unwrap();
        let b = DimensionlessParams::from_physical(&physical(0.7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scale_state_examples() {
        let d =
            DimensionlessParams::from_kick(2.0, AngleSpec::Angle(FRAC_PI_3), 0.5, 0.0, 0.0)
                .unwrap();
        // (v, u) = (1, 0) with eta = 0.5 -> (1, 0) in the scaled frame.
        let s = d.scale_state(ClassicalState::new(1.0, 0.0, Frame::Raw), Frame::Scaled);
        assert!((s.v - 1.0).abs() < 1e-15 && s.u.abs() < 1e-15);
        // Origin is fixed for any eta.
        let o = d.scale_state(ClassicalState::new(0.0, 0.0, Frame::Scaled), Frame::Raw);
        assert_eq!((o.v, o.u), (0.0, 0.0));
    }

    #[test]
    fn scale_round_trip_and_linearity() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..200 {
            let eta = 0.05 + 0.5 * next().abs();
            let d = DimensionlessParams::from_kick(2.0, AngleSpec::Angle(PI / 3.0), eta, 0.2, 0.0)
                .unwrap();
            let s = ClassicalState::new(next(), next(), Frame::Raw);
            for target in [Frame::Scaled, Frame::Dissipative] {
                let back = d.scale_state(d.scale_state(s, target), Frame::Raw);
                assert!((back.v - s.v).abs() < 1e-14 && (back.u - s.u).abs() < 1e-14);
            }
            // Linearity: scale(a s) = a scale(s).
            let a = 3.25;
            let scaled = d.scale_state(s, Frame::Scaled);
            let scaled_a = d.scale_state(
                ClassicalState::new(a * s.v, a * s.u, Frame::Raw),
                Frame::Scaled,
            );
            assert!((scaled_a.v - a * scaled.v).abs() < 1e-12);
            assert!((scaled_a.u - a * scaled.u).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_tag_is_enforced() {
        let s = ClassicalState::new(1.0, 2.0, Frame::Raw);
        assert!(s.expect_frame(Frame::Raw).is_ok());
        assert!(matches!(
            s.expect_frame(Frame::Scaled),
            Err(Error::FrameMismatch { .. })
        ));
    }
}

//! Exact inter-kick reservoir channels.
//!
//! Dissipative reservoir: the zero-temperature attenuation channel with
//! transmission `T = e^{-Γτ}`, composed with the harmonic rotation. Its
//! Kraus operators lower `k` quanta:
//!
//! ```text
//! rho'_mn = Σ_k sqrt(C(m+k,k) C(n+k,k)) (1-T)^k T^{(m+n)/2} rho_{m+k,n+k}
//! ```
//!
//! Diffusive reservoir: the equal-rate heating/cooling pair acts on the
//! characteristic function as `C(λ) -> C(λ) e^{-γτ|λ|²}`, i.e. classical
//! Gaussian additive noise with `n_add = γτ`. That channel factors exactly
//! into attenuation by `T = 1/(1+γτ)` followed by a quantum-limited
//! amplifier with gain `G = 1+γτ`, both with closed-form Kraus sums in the
//! Fock basis.

use ndarray::Array2;
use num_complex::Complex64;

use crate::quantum::operators::apply_harmonic;
use crate::quantum::state::{DensityOperator, StateTolerances};
use crate::{parallel, Error, Result};

/// Reservoir selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    None,
    Dissipative,
    Diffusive,
}

/// Reservoir kind plus its rate and the inter-kick duration.
#[derive(Debug, Clone, Copy)]
pub struct EnvironmentSpec {
    pub kind: EnvKind,
    /// Γ for the dissipative reservoir, γ for the diffusive one; ignored
    /// for `EnvKind::None`.
    pub rate: f64,
    /// Duration of the free evolution between kicks.
    pub kick_period: f64,
}

impl EnvironmentSpec {
    pub fn none() -> Self {
        Self {
            kind: EnvKind::None,
            rate: 0.0,
            kick_period: 1.0,
        }
    }

    /// Dissipative reservoir given the dimensionless product `Γτ`.
    pub fn dissipative(gamma_tau: f64) -> Self {
        Self {
            kind: EnvKind::Dissipative,
            rate: gamma_tau,
            kick_period: 1.0,
        }
    }

    /// Diffusive reservoir given the dimensionless product `γτ`.
    pub fn diffusive(gamma_tau: f64) -> Self {
        Self {
            kind: EnvKind::Diffusive,
            rate: gamma_tau,
            kick_period: 1.0,
        }
    }

    pub fn rate_tau(&self) -> f64 {
        self.rate * self.kick_period
    }

    pub fn validate(&self) -> Result<()> {
        if self.rate < 0.0 || !self.rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reservoir rate must be nonnegative, got {}",
                self.rate
            )));
        }
        if self.kick_period <= 0.0 {
            return Err(Error::InvalidParameter("kick period must be positive".into()));
        }
        Ok(())
    }
}

/// Zero-temperature attenuation with transmission `T = e^{-gamma_tau}`.
pub(crate) fn apply_loss(rho: &Array2<Complex64>, gamma_tau: f64) -> Array2<Complex64> {
    let n = rho.nrows();
    if gamma_tau == 0.0 {
        return rho.clone();
    }
    let t = (-gamma_tau).exp();
    let sqrt_t = (-gamma_tau / 2.0).exp();
    let one_minus_t = 1.0 - t;
    // sqrt(T)^j for j ≤ 2n.
    let mut pow = vec![1.0f64; 2 * n];
    for j in 1..2 * n {
        pow[j] = pow[j - 1] * sqrt_t;
    }
    let mut out = Array2::<Complex64>::zeros((n, n));
    {
        let slice = out.as_slice_mut().expect("contiguous");
        parallel::for_chunks_mut(slice, n, |m, row| {
            for nn in 0..n {
                let mut coef = pow[m + nn];
                let mut acc = coef * rho[[m, nn]];
                let kmax = n - 1 - m.max(nn);
                for k in 0..kmax {
                    coef *= one_minus_t
                        * (((m + k + 1) * (nn + k + 1)) as f64).sqrt()
                        / (k + 1) as f64;
                    acc += coef * rho[[m + k + 1, nn + k + 1]];
                }
                row[nn] = acc;
            }
        });
    }
    out
}

/// Quantum-limited amplifier with gain `G ≥ 1`.
pub(crate) fn apply_gain(rho: &Array2<Complex64>, gain: f64) -> Array2<Complex64> {
    let n = rho.nrows();
    if gain == 1.0 {
        return rho.clone();
    }
    let g1 = gain - 1.0;
    // G^{-j/2} for j ≤ 2n + 2.
    let inv_sqrt_g = 1.0 / gain.sqrt();
    let mut pow = vec![1.0f64; 2 * n + 2];
    for j in 1..2 * n + 2 {
        pow[j] = pow[j - 1] * inv_sqrt_g;
    }
    let mut out = Array2::<Complex64>::zeros((n, n));
    {
        let slice = out.as_slice_mut().expect("contiguous");
        parallel::for_chunks_mut(slice, n, |p, row| {
            for q in 0..n {
                let mut coef = pow[p + q + 2];
                let mut acc = coef * rho[[p, q]];
                let kmax = p.min(q);
                for k in 0..kmax {
                    coef *= g1 * (((p - k) * (q - k)) as f64).sqrt() / (k + 1) as f64;
                    acc += coef * rho[[p - k - 1, q - k - 1]];
                }
                row[q] = acc;
            }
        });
    }
    out
}

/// Exact inter-kick dissipative channel: harmonic rotation by `angle`
/// composed with zero-temperature attenuation over `Γτ = gamma_tau`, so
/// `⟨â⟩ -> ⟨â⟩ e^{-i angle} e^{-Γτ/2}` with the vacuum as the fixed point
/// of the damping part.
pub fn apply_amplitude_damping(
    rho: &mut DensityOperator,
    gamma_tau: f64,
    angle: f64,
) -> Result<()> {
    if gamma_tau < 0.0 || !gamma_tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma_tau must be nonnegative, got {gamma_tau}"
        )));
    }
    let before = rho.trace().re;
    let mut damped = apply_loss(rho.matrix(), gamma_tau);
    apply_harmonic(&mut damped, angle);
    let after: Complex64 = damped.diag().sum();
    if (after.re - before).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "amplitude damping trace drift {:.3e}",
            after.re - before
        )));
    }
    *rho.matrix_mut() = damped;
    Ok(())
}

/// Exact diffusion channel over one kick period:
/// `C(λ) -> C(λ) e^{-γτ |λ|²}`, equivalently `⟨â†â⟩ -> ⟨â†â⟩ + γτ`.
pub fn apply_diffusion_channel(rho: &mut DensityOperator, gamma_tau: f64) -> Result<()> {
    if gamma_tau < 0.0 || !gamma_tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma_tau must be nonnegative, got {gamma_tau}"
        )));
    }
    if gamma_tau == 0.0 {
        return Ok(());
    }
    let before = rho.trace().re;
    let gain = 1.0 + gamma_tau;
    let attenuated = apply_loss(rho.matrix(), gain.ln());
    let heated = apply_gain(&attenuated, gain);
    let after: Complex64 = heated.diag().sum();
    if (after.re - before).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "diffusion channel trace drift {:.3e}; state too close to the truncation edge",
            after.re - before
        )));
    }
    *rho.matrix_mut() = heated;
    let tol = StateTolerances::default();
    let tail = rho.tail_population();
    if tail > tol.tail {
        return Err(Error::TruncationUnsafe {
            kick: 0,
            tail,
            tol: tol.tail,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::{moments, DensityOperator, PureState};
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn zero_rate_is_pure_rotation() {
        let beta = Complex64::new(1.0, 0.5);
        let mut rho = DensityOperator::coherent(beta, 64);
        apply_amplitude_damping(&mut rho, 0.0, FRAC_PI_3).unwrap();
        let m = moments(&rho, 0);
        let expect = beta * Complex64::from_polar(1.0, -FRAC_PI_3);
        assert!((m.mean_v - expect.re).abs() < 1e-10);
        assert!((m.mean_u - expect.im).abs() < 1e-10);
    }

    #[test]
    fn vacuum_is_fixed_point_of_damping() {
        let mut rho = DensityOperator::vacuum(32);
        apply_amplitude_damping(&mut rho, 0.9, 0.0).unwrap();
        assert!((rho.matrix()[[0, 0]].re - 1.0).abs() < 1e-14);
        let m = moments(&rho, 0);
        assert!(m.mean_n.abs() < 1e-14);
    }

    #[test]
    fn coherent_state_stays_coherent_under_damping() {
        let beta = Complex64::new(1.4, -0.6);
        let (gamma_tau, angle) = (0.72, FRAC_PI_3);
        let n = 96;
        let mut rho = DensityOperator::coherent(beta, n);
        apply_amplitude_damping(&mut rho, gamma_tau, angle).unwrap();
        let target = beta
            * Complex64::from_polar((-gamma_tau / 2.0).exp(), -angle);
        let expect = DensityOperator::coherent(target, n);
        let max_dev = rho
            .matrix()
            .iter()
            .zip(expect.matrix().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-10, "max deviation {max_dev}");
    }

    #[test]
    fn damping_contracts_expectation_exactly() {
        // Ehrenfest contract on a non-classical superposition.
        let n = 48;
        let mut amps = ndarray::Array1::<Complex64>::zeros(n);
        amps[0] = Complex64::new(0.6, 0.0);
        amps[3] = Complex64::new(0.0, 0.64);
        amps[7] = Complex64::new(0.48, 0.0);
        let psi = PureState::from_amplitudes(amps).unwrap();
        let mut rho = psi.to_density();
        let norm = rho.trace().re;
        *rho.matrix_mut() = rho.matrix().mapv(|z| z / norm);
        let m0 = moments(&rho, 0);
        let a0 = Complex64::new(m0.mean_v, m0.mean_u);
        let (gamma_tau, angle) = (0.5, 0.9);
        apply_amplitude_damping(&mut rho, gamma_tau, angle).unwrap();
        let m1 = moments(&rho, 0);
        let a1 = Complex64::new(m1.mean_v, m1.mean_u);
        let expect = a0 * Complex64::from_polar((-gamma_tau / 2.0).exp(), -angle);
        assert!((a1 - expect).norm() < 1e-8, "{a1} vs {expect}");
    }

    #[test]
    fn diffusion_identity_at_zero_and_exact_heating() {
        let mut rho = DensityOperator::vacuum(64);
        apply_diffusion_channel(&mut rho, 0.0).unwrap();
        assert!((rho.matrix()[[0, 0]].re - 1.0).abs() < 1e-15);

        apply_diffusion_channel(&mut rho, 0.1).unwrap();
        let m = moments(&rho, 0);
        assert!((m.mean_n - 0.1).abs() < 1e-8, "n = {}", m.mean_n);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diffusion_raises_quadrature_variance_by_half_rate() {
        // <dv^2> grows by gamma_tau / 2 for any input state.
        let gamma_tau = 0.26;
        for rho0 in [
            DensityOperator::coherent(Complex64::new(1.1, 0.4), 96),
            DensityOperator::fock(2, 96),
        ] {
            let mut rho = rho0;
            let m0 = moments(&rho, 0);
            apply_diffusion_channel(&mut rho, gamma_tau).unwrap();
            let m1 = moments(&rho, 0);
            assert!(
                (m1.var_v - m0.var_v - gamma_tau / 2.0).abs() < 1e-8,
                "dvar = {}",
                m1.var_v - m0.var_v
            );
            assert!((m1.var_u - m0.var_u - gamma_tau / 2.0).abs() < 1e-8);
            assert!((m1.mean_n - m0.mean_n - gamma_tau).abs() < 1e-8);
        }
    }

    #[test]
    fn heating_near_truncation_edge_is_flagged() {
        let n = 16;
        let mut rho = DensityOperator::fock(n - 3, n);
        let err = apply_diffusion_channel(&mut rho, 0.5);
        assert!(err.is_err());
    }

    #[test]
    fn negative_rates_rejected() {
        let mut rho = DensityOperator::vacuum(16);
        assert!(apply_amplitude_damping(&mut rho, -0.1, 0.0).is_err());
        assert!(apply_diffusion_channel(&mut rho, -0.1).is_err());
    }
}

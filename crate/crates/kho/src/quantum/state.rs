//! Density operators, state vectors and their validation.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{linalg, Error, Result};

/// Acceptance thresholds for evolved states.
#[derive(Debug, Clone, Copy)]
pub struct StateTolerances {
    /// Allowed |Tr ρ - 1|.
    pub trace: f64,
    /// Allowed max |ρ - ρ†| entry.
    pub hermiticity: f64,
    /// Eigenvalues below this abort.
    pub eigenvalue_floor: f64,
    /// Allowed population in the top n/8 levels.
    pub tail: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self {
            trace: 1e-8,
            hermiticity: 1e-10,
            eigenvalue_floor: -1e-8,
            tail: 1e-6,
        }
    }
}

/// Hermitian, unit-trace matrix in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: Array2<Complex64>,
}

impl DensityOperator {
    pub fn from_matrix(mat: Array2<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::InvalidParameter("density matrix must be square".into()));
        }
        Ok(Self { mat })
    }

    pub fn vacuum(n: usize) -> Self {
        Self::fock(0, n)
    }

    pub fn fock(level: usize, n: usize) -> Self {
        assert!(level < n, "Fock level outside truncation");
        let mut mat = Array2::<Complex64>::zeros((n, n));
        mat[[level, level]] = Complex64::new(1.0, 0.0);
        Self { mat }
    }

    pub fn coherent(beta: Complex64, n: usize) -> Self {
        PureState::coherent(beta, n).to_density()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr rho^2 = sum |rho_mn|^2 for Hermitian rho.
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let dev = (self.mat[[r, c]] - self.mat[[c, r]].conj()).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    /// Population in the top `n/8` Fock levels.
    pub fn tail_population(&self) -> f64 {
        let n = self.dim();
        let cut = n - n / 8;
        (cut..n).map(|k| self.mat[[k, k]].re).sum()
    }

    /// Highest level holding non-negligible population.
    pub fn effective_top_level(&self, cutoff: f64) -> usize {
        let n = self.dim();
        let mut acc = 0.0;
        for k in (0..n).rev() {
            acc += self.mat[[k, k]].re.max(0.0);
            if acc > cutoff {
                return k;
            }
        }
        0
    }

    /// Trace, hermiticity and tail checks (O(N²)).
    pub fn validate(&self, tol: &StateTolerances, kick: usize) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::Numerical(format!(
                "trace drift at kick {kick}: Tr rho = {tr}"
            )));
        }
        if self.hermiticity_defect() > tol.hermiticity {
            return Err(Error::Numerical(format!(
                "hermiticity defect {} at kick {kick}",
                self.hermiticity_defect()
            )));
        }
        let tail = self.tail_population();
        if tail > tol.tail {
            return Err(Error::TruncationUnsafe {
                kick,
                tail,
                tol: tol.tail,
            });
        }
        Ok(())
    }

    /// Spectrum check (O(N³)); intended for moderate dimensions.
    pub fn validate_spectrum(&self, tol: &StateTolerances) -> Result<()> {
        let evals = linalg::hermitian_eigenvalues(&self.mat)?;
        if let Some(&min) = evals.first() {
            if min < tol.eigenvalue_floor {
                return Err(Error::Numerical(format!(
                    "negative eigenvalue {min} below floor {}",
                    tol.eigenvalue_floor
                )));
            }
        }
        Ok(())
    }
}

/// State vector in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Array1<Complex64>,
}

impl PureState {
    pub fn from_amplitudes(amps: Array1<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        Ok(Self { amps })
    }

    pub fn vacuum(n: usize) -> Self {
        Self::fock(0, n)
    }

    pub fn fock(level: usize, n: usize) -> Self {
        assert!(level < n, "Fock level outside truncation");
        let mut amps = Array1::<Complex64>::zeros(n);
        amps[level] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Coherent state |β⟩ truncated to `n` levels.
    pub fn coherent(beta: Complex64, n: usize) -> Self {
        let mut amps = Array1::<Complex64>::zeros(n);
        let mut amp = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
        for k in 0..n {
            amps[k] = amp;
            amp = amp * beta / ((k + 1) as f64).sqrt();
        }
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Array1<Complex64> {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tail_population(&self) -> f64 {
        let n = self.dim();
        let cut = n - n / 8;
        (cut..n).map(|k| self.amps[k].norm_sqr()).sum()
    }

    pub fn to_density(&self) -> DensityOperator {
        let n = self.dim();
        let mut mat = Array2::<Complex64>::zeros((n, n));
        for r in 0..n {
            for c in 0..n {
                mat[[r, c]] = self.amps[r] * self.amps[c].conj();
            }
        }
        DensityOperator { mat }
    }
}

/// Scaled-quadrature means and variances plus the photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    pub kick: usize,
    /// ⟨v̄⟩ = Re ⟨â⟩.
    pub mean_v: f64,
    /// ⟨ū⟩ = Im ⟨â⟩.
    pub mean_u: f64,
    /// ⟨Δv̄²⟩ with v̂̄ = (â + â†)/2.
    pub var_v: f64,
    /// ⟨Δū²⟩ with û̄ = (â - â†)/2i.
    pub var_u: f64,
    /// ⟨â†â⟩.
    pub mean_n: f64,
}

fn moments_from_expectations(
    kick: usize,
    mean_a: Complex64,
    mean_aa: Complex64,
    mean_n: f64,
) -> MomentRecord {
    let mean_v = mean_a.re;
    let mean_u = mean_a.im;
    // <vbar^2> = (2 Re<a^2> + 2<n> + 1)/4, <ubar^2> = (2<n> + 1 - 2 Re<a^2>)/4.
    let vv = (2.0 * mean_aa.re + 2.0 * mean_n + 1.0) / 4.0;
    let uu = (2.0 * mean_n + 1.0 - 2.0 * mean_aa.re) / 4.0;
    MomentRecord {
        kick,
        mean_v,
        mean_u,
        var_v: (vv - mean_v * mean_v).max(0.0),
        var_u: (uu - mean_u * mean_u).max(0.0),
        mean_n,
    }
}

/// Moments of a density operator.
pub fn moments(rho: &DensityOperator, kick: usize) -> MomentRecord {
    let n = rho.dim();
    let m = rho.matrix();
    let mut mean_a = Complex64::new(0.0, 0.0);
    let mut mean_aa = Complex64::new(0.0, 0.0);
    let mut mean_n = 0.0f64;
    for k in 0..n {
        if k >= 1 {
            mean_a += (k as f64).sqrt() * m[[k, k - 1]];
        }
        if k >= 2 {
            mean_aa += ((k * (k - 1)) as f64).sqrt() * m[[k, k - 2]];
        }
        mean_n += k as f64 * m[[k, k]].re;
    }
    moments_from_expectations(kick, mean_a, mean_aa, mean_n)
}

/// Moments of a pure state.
pub fn moments_pure(psi: &PureState, kick: usize) -> MomentRecord {
    let n = psi.dim();
    let a = psi.amplitudes();
    let mut mean_a = Complex64::new(0.0, 0.0);
    let mut mean_aa = Complex64::new(0.0, 0.0);
    let mut mean_n = 0.0f64;
    for k in 0..n {
        if k >= 1 {
            mean_a += (k as f64).sqrt() * a[k - 1].conj() * a[k];
        }
        if k >= 2 {
            mean_aa += ((k * (k - 1)) as f64).sqrt() * a[k - 2].conj() * a[k];
        }
        mean_n += k as f64 * a[k].norm_sqr();
    }
    moments_from_expectations(kick, mean_a, mean_aa, mean_n)
}

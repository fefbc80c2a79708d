//! Wigner function, characteristic function and quadrature densities.
//!
//! Everything here reduces to overlaps with displacement operators:
//!
//! * `C(λ) = Tr[ρ D(λ)]` (symmetric-order characteristic function),
//! * `W(β) = (2/π) Tr[ρ D(2β) Π]` (displaced parity), normalized so
//!   `∫ W d²β = 1` with vacuum peak `2/π`.
//!
//! Matrix elements of `D(γ)` are generated diagonal-by-diagonal with the
//! orthonormal associated-Laguerre recurrence; a power-of-1e260 scaling
//! ladder keeps the recurrence alive through underflow valleys so large
//! truncations and small displacements coexist safely.

use ndarray::Array1;
use num_complex::Complex64;

pub use crate::classical::GridSpec;
use crate::quantum::state::{DensityOperator, StateTolerances};
use crate::{parallel, Error, Result};

/// One sample of the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnValue {
    pub lambda: Complex64,
    pub value: Complex64,
}

/// Real quasi-probability raster in `(v̄, ū)`.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub spec: GridSpec,
    /// Row-major with the u index fastest: `values[i * n_u + j]`.
    pub values: Vec<f64>,
    /// Set when a cell edge exceeds 0.5 in either direction.
    pub coarse_warning: bool,
}

impl WignerGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.n_u + j]
    }

    /// Grid quadrature of `∫ W dv̄ dū`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of cells above `frac` of the maximum.
    pub fn support_fraction(&self, frac: f64) -> f64 {
        let cut = frac * self.max_value();
        let hits = self.values.iter().filter(|&&x| x > cut).count();
        hits as f64 / self.values.len() as f64
    }
}

/// Rescaling unit for the diagonal recurrence.
const SCALE: f64 = 1e260;

/// `Σ_{m,n} ρ_nm (±1)^n D_mn(γ)`; the parity insertion turns the
/// characteristic-function kernel into the Wigner kernel.
fn displacement_overlap(rho: &DensityOperator, gamma: Complex64, parity: bool) -> Complex64 {
    let n = rho.dim();
    let mat = rho.matrix();
    let abs = gamma.norm();
    if abs == 0.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let sign = if parity && k % 2 == 1 { -1.0 } else { 1.0 };
            acc += sign * mat[[k, k]];
        }
        return acc;
    }
    let x = abs * abs;
    let ln_abs = abs.ln();
    let ln_scale = SCALE.ln();
    let phase = gamma / abs;
    let neg_conj_phase = -phase.conj();

    let mut total = Complex64::new(0.0, 0.0);
    let mut phase_pow = Complex64::new(1.0, 0.0);
    let mut neg_conj_pow = Complex64::new(1.0, 0.0);
    let mut ln_fact_half = 0.0f64; // (1/2) ln(d!)
    let breakoff_d = x + 8.0 * (x + 1.0).sqrt() + 24.0;

    for d in 0..n {
        if d > 0 {
            ln_fact_half += 0.5 * (d as f64).ln();
            phase_pow *= phase;
            neg_conj_pow *= neg_conj_phase;
        }
        // r_0 = |γ|^d e^{-x/2} / sqrt(d!), tracked as stored * SCALE^{-exp}.
        let mut ln0 = d as f64 * ln_abs - 0.5 * x - ln_fact_half;
        let mut scale_exp = 0i32;
        while ln0 < -600.0 {
            ln0 += ln_scale;
            scale_exp += 1;
        }
        let mut prev = 0.0f64;
        let mut cur = ln0.exp();
        let mut diag_max = 0.0f64;
        let top = n - d;
        for k in 0..top {
            let actual = match scale_exp {
                0 => cur,
                1 => cur / SCALE,
                _ => 0.0,
            };
            if actual != 0.0 {
                diag_max = diag_max.max(actual.abs());
                if d == 0 {
                    let sign = if parity && k % 2 == 1 { -1.0 } else { 1.0 };
                    total += sign * actual * mat[[k, k]];
                } else {
                    let sign_up = if parity && k % 2 == 1 { -1.0 } else { 1.0 };
                    let sign_dn = if parity && (k + d) % 2 == 1 { -1.0 } else { 1.0 };
                    total += sign_up * actual * phase_pow * mat[[k, k + d]];
                    total += sign_dn * actual * neg_conj_pow * mat[[k + d, k]];
                }
            }
            // r_{k+1} from (r_k, r_{k-1}).
            let kf = k as f64;
            let df = d as f64;
            let next = ((2.0 * kf + df + 1.0 - x) * cur
                - (kf * (kf + df)).sqrt() * prev)
                / (((kf + 1.0) * (kf + 1.0 + df)).sqrt());
            prev = cur;
            cur = next;
            if scale_exp > 0 {
                let mag = cur.abs().max(prev.abs());
                if mag > 1.0 {
                    cur /= SCALE;
                    prev /= SCALE;
                    scale_exp -= 1;
                } else if mag < 1.0 / SCALE && mag > 0.0 {
                    cur *= SCALE;
                    prev *= SCALE;
                    scale_exp += 1;
                }
            } else if cur.abs().max(prev.abs()) < 1.0 / SCALE {
                cur *= SCALE;
                prev *= SCALE;
                scale_exp += 1;
            }
        }
        if d as f64 > breakoff_d && diag_max < 1e-18 {
            break;
        }
    }
    total
}

/// `C(λ) = Tr[ρ e^{λ↠- λ*â}]` by the displacement matrix elements in the
/// truncated basis.
pub fn char_fn_from_state(rho: &DensityOperator, lambda: Complex64) -> Result<CharFnValue> {
    let n = rho.dim();
    let tol = StateTolerances::default();
    let tail = rho.tail_population();
    if tail > tol.tail {
        return Err(Error::TruncationUnsafe {
            kick: 0,
            tail,
            tol: tol.tail,
        });
    }
    if lambda.norm() > 2.0 * (n as f64).sqrt() {
        return Err(Error::Numerical(format!(
            "|lambda| = {:.3} exceeds the safe displacement range for N = {n}",
            lambda.norm()
        )));
    }
    Ok(CharFnValue {
        lambda,
        value: displacement_overlap(rho, lambda, false),
    })
}

/// Wigner function on a phase-space raster via the displaced-parity form.
pub fn wigner(rho: &DensityOperator, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let coarse_warning = spec.cell_width_v() > 0.5 || spec.cell_width_u() > 0.5;
    let n_u = spec.n_u;
    let norm = 2.0 / std::f64::consts::PI;
    let values = parallel::map_range(spec.len(), |idx| {
        let (i, j) = (idx / n_u, idx % n_u);
        let (v, u) = spec.node(i, j);
        let gamma = Complex64::new(2.0 * v, 2.0 * u);
        norm * displacement_overlap(rho, gamma, true).re
    });
    Ok(WignerGrid {
        spec: *spec,
        values,
        coarse_warning,
    })
}

/// Probability density of the `v̄` quadrature (`v̂̄ = (â + â†)/2`) at the
/// given points, evaluated with Hermite-function wavefunctions; serves as
/// the independent marginal oracle for the Wigner raster.
pub fn quadrature_density(rho: &DensityOperator, points: &[f64]) -> Vec<f64> {
    let n = rho.dim();
    let mat = rho.matrix();
    points
        .iter()
        .map(|&y| {
            // phi_0 = (2/pi)^{1/4} e^{-y^2}; phi_{n+1} = (2y phi_n - sqrt(n) phi_{n-1})/sqrt(n+1).
            let mut phi = Array1::<f64>::zeros(n);
            phi[0] = (2.0 / std::f64::consts::PI).powf(0.25) * (-y * y).exp();
            if n > 1 {
                phi[1] = 2.0 * y * phi[0] / 1.0f64.sqrt();
            }
            for k in 1..n - 1 {
                phi[k + 1] =
                    (2.0 * y * phi[k] - (k as f64).sqrt() * phi[k - 1]) / ((k + 1) as f64).sqrt();
            }
            let mut acc = 0.0f64;
            for r in 0..n {
                let mut w = Complex64::new(0.0, 0.0);
                for c in 0..n {
                    w += mat[[r, c]] * phi[c];
                }
                acc += phi[r] * w.re;
            }
            acc
        })
        .collect()
}

//! Phase-space density rasters.
//!
//! Forward evolution of a fine grid disperses neighboring points, so
//! distributions are rendered backwards: pick the grid at kick `n`, pull
//! every node back through the exact inverse map and evaluate the initial
//! density at the preimage.

use crate::classical::ensemble::GaussianSpec;
use crate::classical::{KickedMap, WeightedEnsemble};
use crate::params::Frame;
use crate::{parallel, Error, Result};

/// Rectangular raster over a phase-space window; values live at cell
/// centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub v_min: f64,
    pub v_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub n_v: usize,
    pub n_u: usize,
}

impl GridSpec {
    pub fn square(half_extent: f64, n: usize) -> Self {
        Self {
            v_min: -half_extent,
            v_max: half_extent,
            u_min: -half_extent,
            u_max: half_extent,
            n_v: n,
            n_u: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_v < 2 || self.n_u < 2 || self.v_max <= self.v_min || self.u_max <= self.u_min {
            return Err(Error::InvalidParameter("degenerate grid spec".into()));
        }
        Ok(())
    }

    pub fn cell_width_v(&self) -> f64 {
        (self.v_max - self.v_min) / self.n_v as f64
    }

    pub fn cell_width_u(&self) -> f64 {
        (self.u_max - self.u_min) / self.n_u as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width_v() * self.cell_width_u()
    }

    /// Center of cell `(i, j)`, `i` along v and `j` along u.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.v_min + (i as f64 + 0.5) * self.cell_width_v(),
            self.u_min + (j as f64 + 0.5) * self.cell_width_u(),
        )
    }

    pub fn len(&self) -> usize {
        self.n_v * self.n_u
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Nonnegative density values on a [`GridSpec`], row-major with the u
/// index fastest: `values[i * n_u + j]`.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub frame: Frame,
}

impl DensityGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.n_u + j]
    }

    /// Total mass under the raster (`Σ value · cell area`).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Fraction of cells with value above `frac * max`.
    pub fn support_fraction(&self, frac: f64) -> f64 {
        let cut = frac * self.max_value();
        let hits = self.values.iter().filter(|&&x| x > cut).count();
        hits as f64 / self.values.len() as f64
    }

    /// Histogram of an ensemble on the grid, normalized to unit mass when
    /// all weight falls inside the window.
    pub fn histogram(ensemble: &WeightedEnsemble, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut values = vec![0.0f64; spec.len()];
        let dv = spec.cell_width_v();
        let du = spec.cell_width_u();
        for (&(v, u), &w) in ensemble.points().iter().zip(ensemble.weights()) {
            let i = ((v - spec.v_min) / dv).floor();
            let j = ((u - spec.u_min) / du).floor();
            if i >= 0.0 && j >= 0.0 && (i as usize) < spec.n_v && (j as usize) < spec.n_u {
                values[i as usize * spec.n_u + j as usize] += w;
            }
        }
        let norm = ensemble.total_weight() * spec.cell_area();
        for x in &mut values {
            *x /= norm;
        }
        Ok(Self {
            spec: *spec,
            values,
            frame: ensemble.frame(),
        })
    }
}

/// Renders the density after `kicks` applications of a deterministic map
/// by evaluating the initial density at the n-fold preimage of every node.
pub fn render_density_backward(
    map: &KickedMap,
    kicks: usize,
    initial: &GaussianSpec,
    spec: &GridSpec,
) -> Result<DensityGrid> {
    spec.validate()?;
    if map.is_diffusive() {
        return Err(Error::InvalidParameter(
            "backward rendering requires a deterministic map".into(),
        ));
    }
    let n_u = spec.n_u;
    let values_res: Vec<Result<f64>> = parallel::map_range(spec.len(), |idx| {
        let (i, j) = (idx / n_u, idx % n_u);
        let (mut v, mut u) = spec.node(i, j);
        for _ in 0..kicks {
            let s = map.inverse_step(crate::params::ClassicalState::new(v, u, map.frame()))?;
            v = s.v;
            u = s.u;
        }
        Ok(initial.density(v, u))
    });
    let mut values = Vec::with_capacity(values_res.len());
    for r in values_res {
        values.push(r?);
    }
    Ok(DensityGrid {
        spec: *spec,
        values,
        frame: map.frame(),
    })
}

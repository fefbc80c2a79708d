//! File formats: CSV emission and the density-operator checkpoint.
//!
//! All CSV files are comma separated with a header row naming exactly the
//! documented columns. Floats are written with Rust's shortest round-trip
//! formatting; unbounded breaking times are written as the literal `inf`
//! together with the budget column.

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::analysis::{BreakingTimeResult, SweepPoint};
use crate::classical::{BifurcationPoint, ClassicalMoments, DensityGrid, WeightedEnsemble};
use crate::quantum::{CharFnValue, DensityOperator, MomentRecord, WignerGrid};
use crate::{Error, Result};

pub const TRAJECTORY_HEADER: &str = "kick,v,u,weight";
pub const MOMENTS_HEADER: &str = "kick,mean_v,mean_u,var_v,var_u";
pub const DENSITY_HEADER: &str = "v,u,value";
pub const LYAPUNOV_HEADER: &str = "gamma_tau_half,lambda";
pub const BIFURCATION_HEADER: &str = "gamma_tau_half,u";
pub const CHARFN_HEADER: &str = "re_lambda,im_lambda,re_C,im_C,err_bound";
pub const SWEEP_HEADER: &str = "axis_value,tau_hbar,max_dr,budget,epsilon,seed";
pub const DR_TRACE_HEADER: &str = "kick,var_cl,var_q,dr";

/// Snapshot of an ensemble at a given kick, one row per trajectory.
pub fn write_trajectories<W: Write>(
    out: &mut W,
    kick: usize,
    ensemble: &WeightedEnsemble,
) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (&(v, u), &w) in ensemble.points().iter().zip(ensemble.weights()) {
        writeln!(out, "{kick},{v},{u},{w}")?;
    }
    Ok(())
}

/// Stroboscopic points of many trajectories (web / attractor plots).
pub fn write_trajectory_series<W: Write>(
    out: &mut W,
    rows: &[(usize, f64, f64, f64)],
) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for &(kick, v, u, w) in rows {
        writeln!(out, "{kick},{v},{u},{w}")?;
    }
    Ok(())
}

pub fn write_classical_moments<W: Write>(
    out: &mut W,
    series: &[ClassicalMoments],
) -> Result<()> {
    writeln!(out, "{MOMENTS_HEADER}")?;
    for m in series {
        writeln!(
            out,
            "{},{},{},{},{}",
            m.kick, m.mean_v, m.mean_u, m.var_v, m.var_u
        )?;
    }
    Ok(())
}

pub fn write_quantum_moments<W: Write>(out: &mut W, series: &[MomentRecord]) -> Result<()> {
    writeln!(out, "{MOMENTS_HEADER}")?;
    for m in series {
        writeln!(
            out,
            "{},{},{},{},{}",
            m.kick, m.mean_v, m.mean_u, m.var_v, m.var_u
        )?;
    }
    Ok(())
}

pub fn write_density_grid<W: Write>(out: &mut W, grid: &DensityGrid) -> Result<()> {
    writeln!(out, "{DENSITY_HEADER}")?;
    for i in 0..grid.spec.n_v {
        for j in 0..grid.spec.n_u {
            let (v, u) = grid.spec.node(i, j);
            writeln!(out, "{v},{u},{}", grid.value(i, j))?;
        }
    }
    Ok(())
}

pub fn write_wigner_grid<W: Write>(out: &mut W, grid: &WignerGrid) -> Result<()> {
    writeln!(out, "{DENSITY_HEADER}")?;
    for i in 0..grid.spec.n_v {
        for j in 0..grid.spec.n_u {
            let (v, u) = grid.spec.node(i, j);
            writeln!(out, "{v},{u},{}", grid.value(i, j))?;
        }
    }
    Ok(())
}

pub fn write_lyapunov<W: Write>(out: &mut W, rows: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "{LYAPUNOV_HEADER}")?;
    for &(g, l) in rows {
        writeln!(out, "{g},{l}")?;
    }
    Ok(())
}

pub fn write_bifurcation<W: Write>(out: &mut W, points: &[BifurcationPoint]) -> Result<()> {
    writeln!(out, "{BIFURCATION_HEADER}")?;
    for p in points {
        for &u in &p.samples {
            writeln!(out, "{},{}", p.half_damping, u)?;
        }
    }
    Ok(())
}

/// λ-grid characteristic-function samples with their error estimates.
pub fn write_charfn<W: Write>(out: &mut W, rows: &[(CharFnValue, f64)]) -> Result<()> {
    writeln!(out, "{CHARFN_HEADER}")?;
    for (c, err) in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            c.lambda.re, c.lambda.im, c.value.re, c.value.im, err
        )?;
    }
    Ok(())
}

pub fn write_dr_trace<W: Write>(out: &mut W, result: &BreakingTimeResult) -> Result<()> {
    writeln!(out, "{DR_TRACE_HEADER}")?;
    for s in &result.trace {
        writeln!(out, "{},{},{},{}", s.kick, s.var_cl, s.var_q, s.dr)?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(
    out: &mut W,
    points: &[SweepPoint],
    budget: usize,
    epsilon: f64,
) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for p in points {
        match &p.outcome {
            Ok(res) => {
                let tau = match res.tau.kicks() {
                    Some(k) => k.to_string(),
                    None => "inf".to_string(),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.axis_value,
                    tau,
                    res.max_dr(),
                    budget,
                    epsilon,
                    p.seed
                )?;
            }
            Err(msg) => {
                writeln!(
                    out,
                    "{},error,{},{},{},{}",
                    p.axis_value,
                    msg.replace(',', ";"),
                    budget,
                    epsilon,
                    p.seed
                )?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Binary density-operator checkpoint.
// ---------------------------------------------------------------------------

/// Magic bytes of the checkpoint format.
pub const CHECKPOINT_MAGIC: [u8; 8] = *b"KHORHO\0\0";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Layout: magic (8 bytes), version (u32 LE), N (u32 LE), then N² complex
/// doubles row-major as (re, im) little-endian pairs.
pub fn write_density_operator<W: Write>(out: &mut W, rho: &DensityOperator) -> Result<()> {
    out.write_all(&CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(rho.dim() as u32).to_le_bytes())?;
    for z in rho.matrix().iter() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_density_operator<R: Read>(input: &mut R) -> Result<DensityOperator> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("bad checkpoint magic".into()));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    if n == 0 || n > 1 << 17 {
        return Err(Error::Format(format!("implausible dimension {n}")));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut pair = [0u8; 16];
    for _ in 0..n * n {
        input.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[0..8].try_into().expect("slice of 8"));
        let im = f64::from_le_bytes(pair[8..16].try_into().expect("slice of 8"));
        data.push(Complex64::new(re, im));
    }
    let mat = Array2::from_shape_vec((n, n), data)
        .map_err(|e| Error::Format(format!("shape error: {e}")))?;
    DensityOperator::from_matrix(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let rho = DensityOperator::coherent(Complex64::new(0.7, -0.4), 24);
        let mut buf = Vec::new();
        write_density_operator(&mut buf, &rho).unwrap();
        let back = read_density_operator(&mut buf.as_slice()).unwrap();
        assert_eq!(back.dim(), 24);
        for (a, b) in rho.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a, b);
        }
        // Rewriting reproduces identical bytes.
        let mut buf2 = Vec::new();
        write_density_operator(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        let mut bad = b"NOTMAGIC".to_vec();
        bad.extend_from_slice(&[0u8; 16]);
        assert!(read_density_operator(&mut bad.as_slice()).is_err());
    }

    #[test]
    fn headers_match_schemas() {
        let mut buf = Vec::new();
        write_lyapunov(&mut buf, &[(0.1, -0.1)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "gamma_tau_half,lambda");
        assert_eq!(lines.next().unwrap(), "0.1,-0.1");
    }
}

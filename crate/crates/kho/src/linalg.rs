//! Small dense linear-algebra kernels used by the Fock-space engine.
//!
//! Kept self-contained (no LAPACK linkage): the matrices here are at most a
//! few thousand square, and the two eigenproblems we need — a real
//! symmetric tridiagonal matrix and eigenvalues of a complex Hermitian
//! matrix — have compact classical algorithms (implicit-shift QL and
//! cyclic Jacobi).

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

/// Chunk of rows handed to one matmul task; fixed so results do not depend
/// on the thread count.
const MATMUL_ROW_CHUNK: usize = 64;

/// `a * b` for dense complex matrices, parallelized over row blocks.
pub(crate) fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, k) = a.dim();
    let (kb, m) = b.dim();
    assert_eq!(k, kb, "matmul dimension mismatch");
    let mut out = Array2::<Complex64>::zeros((n, m));
    // Collect row blocks first so the closure only writes its own chunk.
    {
        let out_slice = out
            .as_slice_mut()
            .expect("freshly allocated arrays are contiguous");
        crate::parallel::for_chunks_mut(out_slice, MATMUL_ROW_CHUNK * m, |i, chunk| {
            let r0 = i * MATMUL_ROW_CHUNK;
            let rows = chunk.len() / m;
            let a_block = a.slice(s![r0..r0 + rows, ..]);
            let mut c_block =
                ndarray::ArrayViewMut2::from_shape((rows, m), chunk).expect("chunk shape");
            ndarray::linalg::general_mat_mul(
                Complex64::new(1.0, 0.0),
                &a_block,
                &b.view(),
                Complex64::new(0.0, 0.0),
                &mut c_block,
            );
        });
    }
    out
}

/// Conjugate transpose.
pub(crate) fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

/// Eigendecomposition of a real symmetric tridiagonal matrix by the
/// implicit-shift QL algorithm.
///
/// `diag` has length n; `off[i]` couples i and i+1 (length n-1). Returns
/// ascending eigenvalues; when `vectors` is true also the orthogonal matrix
/// whose column j is the eigenvector of eigenvalue j.
pub(crate) fn sym_tridiag_eigen(
    diag: &[f64],
    off: &[f64],
    vectors: bool,
) -> Result<(Vec<f64>, Option<Array2<f64>>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n-1");
    let mut d = diag.to_vec();
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(off);
    let mut v = if vectors {
        Some(Array2::<f64>::eye(n))
    } else {
        None
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Numerical(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = v.as_mut() {
                    for k in 0..n {
                        f = z[[k, i + 1]];
                        z[[k, i + 1]] = s * z[[k, i]] + c * f;
                        z[[k, i]] = c * z[[k, i]] - s * f;
                    }
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let evals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vecs = v.map(|z| {
        let mut sorted = Array2::<f64>::zeros((n, n));
        for (jnew, &jold) in order.iter().enumerate() {
            sorted.column_mut(jnew).assign(&z.column(jold));
        }
        sorted
    });
    Ok((evals, vecs))
}

/// Eigenvalues of a complex Hermitian matrix via cyclic Jacobi rotations.
/// Adequate for the modest dimensions used in channel cross-checks.
pub(crate) fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let tol = 1e-14 * norm;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            let mut evals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
            evals.sort_by(f64::total_cmp);
            return Ok(evals);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let r = apq.norm();
                if r <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / r;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns: M <- M J with J_pp=c, J_pq=s*phase, J_qp=-s*conj(phase), J_qq=c.
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * c - mkq * s * phase.conj();
                    m[[k, q]] = mkp * s * phase + mkq * c;
                }
                // Rows: M <- J^dagger M.
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = mpk * c - mqk * s * phase;
                    m[[q, k]] = mpk * s * phase.conj() + mqk * c;
                }
            }
        }
    }
    Err(Error::Numerical("Jacobi eigenvalue sweep did not converge".into()))
}

/// Sum of absolute eigenvalues of the Hermitian difference `a - b`
/// (trace-norm distance without the conventional 1/2).
pub fn trace_norm_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<f64> {
    let diff = a - b;
    Ok(hermitian_eigenvalues(&diff)?.iter().map(|x| x.abs()).sum())
}


#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn tridiag_small_known() {
        // [[2,1,0],[1,2,1],[0,1,2]] has eigenvalues 2-sqrt2, 2, 2+sqrt2.
        let (evals, vecs) = sym_tridiag_eigen(&[2.0, 2.0, 2.0], &[1.0, 1.0], true).unwrap();
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (a, b) in evals.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let v = vecs.unwrap();
        // Orthogonality and reconstruction.
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| v[[k, i]] * v[[k, j]]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tridiag_position_operator_reconstructs() {
        // X = a + a^dagger truncated at n = 40.
        let n = 40;
        let d = vec![0.0; n];
        let off: Vec<f64> = (1..n).map(|i| (i as f64).sqrt()).collect();
        let (evals, vecs) = sym_tridiag_eigen(&d, &off, true).unwrap();
        let v = vecs.unwrap();
        // Spectrum is symmetric about zero.
        for i in 0..n {
            assert!((evals[i] + evals[n - 1 - i]).abs() < 1e-10);
        }
        // V diag(evals) V^T reproduces the tridiagonal matrix.
        for r in 0..n {
            for c in 0..n {
                let mut x = 0.0;
                for k in 0..n {
                    x += v[[r, k]] * evals[k] * v[[c, k]];
                }
                let expect = if r + 1 == c {
                    off[r]
                } else if c + 1 == r {
                    off[c]
                } else {
                    0.0
                };
                assert!((x - expect).abs() < 1e-10, "({r},{c}): {x} vs {expect}");
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_known() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2.
        let a = array![[one, i], [-i, one]];
        let ev = hermitian_eigenvalues(&a).unwrap();
        assert!((ev[0] - 0.0).abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_random_trace_checks() {
        // Compare sum and sum of squares of eigenvalues against traces.
        let n = 24;
        let mut seed = 12345u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut g = Array2::<Complex64>::zeros((n, n));
        for r in 0..n {
            for c in 0..n {
                g[[r, c]] = Complex64::new(next(), next());
            }
        }
        let h = &g + &dagger(&g);
        let ev = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = (0..n).map(|k| h[[k, k]].re).sum();
        let tr2: f64 = matmul(&h, &h).diag().iter().map(|z| z.re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-9 * (1.0 + tr.abs()));
        let s2: f64 = ev.iter().map(|x| x * x).sum();
        assert!((s2 - tr2).abs() < 1e-9 * (1.0 + tr2.abs()));
    }

    #[test]
    fn matmul_matches_manual() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = array![[one, i], [Complex64::new(0.0, 0.0), one * 2.0]];
        let b = array![[one, one], [i, -i]];
        let c = matmul(&a, &b);
        assert!((c[[0, 0]] - (one + i * i)).norm() < 1e-15);
        assert!((c[[0, 1]] - (one + i * (-i))).norm() < 1e-15);
        assert!((c[[1, 0]] - i * 2.0).norm() < 1e-15);
        assert!((c[[1, 1]] - (-i) * 2.0).norm() < 1e-15);
    }

    #[test]
    fn expm_identity_and_rotation() {
        use test_support::expm;
        // expm(0) = I.
        let z = Array2::<Complex64>::zeros((3, 3));
        let e = expm(&z);
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((e[[r, c]].re - expect).abs() < 1e-14);
                assert!(e[[r, c]].im.abs() < 1e-14);
            }
        }
        // expm(i theta sigma_x) = cos theta I + i sin theta sigma_x.
        let theta = 0.7;
        let it = Complex64::new(0.0, theta);
        let a = array![
            [Complex64::new(0.0, 0.0), it],
            [it, Complex64::new(0.0, 0.0)]
        ];
        let e = expm(&a);
        assert!((e[[0, 0]].re - theta.cos()).abs() < 1e-13);
        assert!((e[[0, 1]].im - theta.sin()).abs() < 1e-13);
    }
}

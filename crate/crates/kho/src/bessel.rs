//! Integer-order Bessel functions of the first kind.
//!
//! The multi-index characteristic-function sums need all orders
//! `J_0(z) .. J_m(z)` at a fixed argument, which is exactly what Miller's
//! downward recurrence produces in one pass: recurse
//! `J_{m-1} = (2m/z) J_m - J_{m+1}` from an overshoot order with arbitrary
//! seed values, then normalize with `J_0 + 2 Σ_k J_{2k} = 1`.

/// Returns `[J_0(z), J_1(z), ..., J_{m_max}(z)]`.
///
/// Accurate to ~1e-13 absolute for |z| up to a few thousand.
pub fn jn_array(z: f64, m_max: usize) -> Vec<f64> {
    let az = z.abs();
    let mut out = vec![0.0f64; m_max + 1];
    if az == 0.0 {
        out[0] = 1.0;
        return out;
    }

    // Overshoot start order: past the turning point m ~ z the functions
    // decay super-exponentially, so a modest margin reaches full accuracy.
    let base = (m_max as f64).max(az).ceil() as usize;
    let mut start = base + 18 + 2 * (base as f64).sqrt().ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let mut next = 0.0f64; // J_{start+1} (seed)
    let mut curr = 1e-240f64; // J_{start} (seed)
    let mut norm = if start % 2 == 0 { 2.0 * curr } else { 0.0 };
    if start <= m_max {
        out[start] = curr;
    }
    for m in (1..=start).rev() {
        let prev = (2.0 * m as f64 / az) * curr - next;
        next = curr;
        curr = prev;
        let order = m - 1;
        if order <= m_max {
            out[order] = curr;
        }
        if order % 2 == 0 {
            norm += if order == 0 { curr } else { 2.0 * curr };
        }
        if curr.abs() > 1e250 {
            next /= 1e250;
            curr /= 1e250;
            norm /= 1e250;
            for x in &mut out {
                *x /= 1e250;
            }
        }
    }

    for x in &mut out {
        *x /= norm;
    }
    if z < 0.0 {
        for (m, x) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *x = -*x;
            }
        }
    }
    out
}

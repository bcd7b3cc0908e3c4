use crate::{Error, Result};

fn phi(z: f64) -> f64 {
    z - z.ln() - 1.0
}

/// Bisect `phi(z) = e0` on `[lo, hi]`, where `phi - e0` changes sign, down
/// to adjacent floating-point numbers.
fn bisect(e0: f64, mut lo: f64, mut hi: f64) -> f64 {
    let positive_at_lo = phi(lo) > e0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (phi(mid) > e0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (phi(lo) - e0).abs() <= (phi(hi) - e0).abs() {
        lo
    } else {
        hi
    }
}

/// The two roots `α₁ ≤ 1 ≤ α₂` of `z − ln z − 1 = e0`.
pub fn equilibrium_roots(e0: f64) -> Result<(f64, f64)> {
    if !(e0 >= 0.0) || !e0.is_finite() {
        return Err(Error::Domain(format!("e0 must be finite and >= 0 (got {e0})")));
    }
    if e0 == 0.0 {
        return Ok((1.0, 1.0));
    }
    let mut lo = 0.5;
    while phi(lo) <= e0 {
        lo *= 0.5;
        if lo == 0.0 {
            return Err(Error::Domain(format!("lower root of e0 = {e0} underflows")));
        }
    }
    let mut hi = 2.0;
    while phi(hi) <= e0 {
        hi *= 2.0;
    }
    Ok((bisect(e0, lo, 1.0), bisect(e0, 1.0, hi)))
}

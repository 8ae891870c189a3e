//! Bracketed bisection.

use crate::error::{Error, Result};

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub iterations: usize,
    /// Width of the final bracket.
    pub width: f64,
}

/// Bisects `f` on `[lo, hi]` until the bracket is narrower than `abs_tol`
/// or cannot be split further in floating point.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs. An exact zero at
/// either end is returned immediately.
pub fn bisect<F>(f: F, lo: f64, hi: f64, abs_tol: f64) -> Result<Bisection>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Bisection {
            root: lo,
            iterations: 0,
            width: 0.0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Bisection {
            root: hi,
            iterations: 0,
            width: 0.0,
        });
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let lo_negative = f_lo < 0.0;
    let mut iterations = 0;
    // 2100 halvings exhaust any f64 interval.
    while hi - lo > abs_tol && iterations < 2100 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(Bisection {
                root: mid,
                iterations,
                width: 0.0,
            });
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection {
        root: lo + 0.5 * (hi - lo),
        iterations,
        width: hi - lo,
    })
}

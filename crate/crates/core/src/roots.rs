//! Bracketing and bisection for strictly monotone scalar maps.

use crate::error::{Error, Result};

pub(crate) const MAX_DOUBLINGS: u32 = 1000;

/// Expands `[-1, 1]` by doubling each end until a strictly decreasing `f`
/// is non-negative at the left end and non-positive at the right end.
pub(crate) fn bracket_decreasing<F>(mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    let mut doublings = 0;
    loop {
        let at_lo = f(lo);
        if at_lo.is_nan() {
            return Err(Error::Bracket { doublings });
        }
        if at_lo >= 0.0 {
            break;
        }
        lo *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !lo.is_finite() {
            return Err(Error::Bracket { doublings });
        }
    }
    loop {
        let at_hi = f(hi);
        if at_hi.is_nan() {
            return Err(Error::Bracket { doublings });
        }
        if at_hi <= 0.0 {
            break;
        }
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Bracket { doublings });
        }
    }
    Ok((lo, hi))
}

/// Bisection for a decreasing `f` with `f(lo) >= 0 >= f(hi)`.
///
/// Stops when the bracket is narrower than `width` or can no longer be
/// split in floating point. Pass `width = 0.0` to bisect to exhaustion.
pub(crate) fn bisect_decreasing<F>(mut f: F, mut lo: f64, mut hi: f64, width: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    for _ in 0..4096 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        if value == 0.0 {
            return mid;
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `log(sum_i exp(x_i))` without overflow.
pub(crate) fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    max + iter.map(|v| (v - max).exp()).sum::<f64>().ln()
}

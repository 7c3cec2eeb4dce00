//! Bracketing root finders for monotone scalar equations.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

/// Where the midpoint of a bracket is placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Midpoint {
    Arithmetic,
    /// Geometric mean when both ends are positive and far apart, arithmetic otherwise.
    /// Resolves roots many decades below the upper end within the iteration cap.
    Geometric,
}

/// Solves `f(x) = 0` for a non-decreasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) <= 0 <= f(hi)`; anything else means the caller's monotone
/// model is broken and is reported as [`Error::BracketViolation`]. Stops when
/// `|f(x)| <= tol` or the bracket has collapsed to adjacent floats.
pub fn bisect_increasing<T, F>(f: F, lo: T, hi: T, tol: T, midpoint: Midpoint) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if !(f_lo < T::zero() && f_hi > T::zero()) {
        return Err(Error::BracketViolation {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            f_lo: f_lo.to_f64_lossy(),
            f_hi: f_hi.to_f64_lossy(),
        });
    }
    let two = T::lit(2.0);
    let spread = T::lit(16.0);
    let mut best = (f_lo.abs(), lo);
    if f_hi.abs() < best.0 {
        best = (f_hi.abs(), hi);
    }
    for _ in 0..MAX_ITERATIONS {
        let mid = match midpoint {
            Midpoint::Geometric if lo > T::zero() && hi > spread * lo => lo.sqrt() * hi.sqrt(),
            Midpoint::Geometric if lo == T::zero() && hi > T::zero() => {
                // jump several decades at once while the lower end is still zero
                let candidate = hi * T::lit(1e-8);
                if candidate > T::min_positive_value() {
                    candidate
                } else {
                    (lo + hi) / two
                }
            }
            _ => lo + (hi - lo) / two,
        };
        if !(mid > lo && mid < hi) {
            break;
        }
        let value = f(mid);
        if value.is_nan() {
            return Err(Error::NotConverged(format!("NaN residual at {}", mid)));
        }
        if value.abs() < best.0 {
            best = (value.abs(), mid);
        }
        if value.abs() <= tol {
            return Ok(mid);
        }
        if value < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

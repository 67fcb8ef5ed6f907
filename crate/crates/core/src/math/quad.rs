//! Composite Simpson quadrature on a uniform grid.

use crate::error::{CoreError, Result};

/// Integrate `f` over [lo, hi] with the given (even, positive) panel count.
/// Exact for cubics.
pub fn simpson_integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    if panels == 0 || panels % 2 != 0 {
        return Err(CoreError::InvalidArgument(
            "simpson_integrate: panel count must be even and positive",
        ));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CoreError::InvalidArgument(
            "simpson_integrate: require finite lo < hi",
        ));
    }
    let h = (hi - lo) / panels as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..panels {
        let x = lo + h * i as f64;
        sum += f(x) * if i % 2 == 0 { 2.0 } else { 4.0 };
    }
    Ok(sum * h / 3.0)
}

//! Adaptive Simpson quadrature.
//!
//! The integrands in this crate are smooth power-sums of log10(T) except at
//! extension knees, which callers handle by splitting the interval. Plain
//! adaptive Simpson with the usual |S2 - S1|/15 error estimate converges in a
//! handful of levels on such pieces.

use crate::error::{Error, Result};

/// Default relative tolerance. Tighter than the 1e-6 accuracy the crate
/// guarantees so that interval-additivity identities hold to ~1e-9.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Hard cap on recursion depth; 2^MAX_DEPTH panels is far beyond anything a
/// smooth integrand needs.
pub const MAX_DEPTH: u32 = 52;

/// Subdivision levels forced before the error estimate may accept a panel.
/// The |S2 - S1|/15 estimate can coincide accidentally where the fourth
/// derivative changes sign; insisting on 2^MIN_DEPTH panels first makes a
/// simultaneous coincidence across all of them vanishingly unlikely.
const MIN_DEPTH: u32 = 5;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
    forced: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if forced == 0 && delta.abs() <= 15.0 * abs_tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::IntegrationFailure {
            tol: abs_tol,
            max_depth: MAX_DEPTH,
            estimate: left + right,
        });
    }
    let next_forced = forced.saturating_sub(1);
    let l = step(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1, next_forced)?;
    let r = step(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1, next_forced)?;
    Ok(l + r)
}

/// Integrate `f` over `[a, b]` to the given relative tolerance.
///
/// `a == b` returns zero; `a > b` returns the negated integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive_simpson(f, b, a, rel_tol).map(|v| -v);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    // Scale once from the first estimate; floor keeps a zero integrand trivial.
    let abs_tol = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    step(&f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH, MIN_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_integrand() {
        let v = adaptive_simpson(|_| 1.0, 10.0, 20.0, DEFAULT_REL_TOL).unwrap();
        assert_relative_eq!(v, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn cubic_is_exact() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, DEFAULT_REL_TOL).unwrap();
        assert_relative_eq!(v, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let v = adaptive_simpson(|x| x.exp(), 0.0, 1.0, DEFAULT_REL_TOL).unwrap();
        assert_relative_eq!(v, 1f64.exp() - 1.0, max_relative = 1e-10);
    }

    #[test]
    fn reversed_bounds_negate() {
        let fwd = adaptive_simpson(|x| x.sin(), 0.0, 3.0, DEFAULT_REL_TOL).unwrap();
        let rev = adaptive_simpson(|x| x.sin(), 3.0, 0.0, DEFAULT_REL_TOL).unwrap();
        assert_relative_eq!(fwd, -rev, max_relative = 1e-12);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(
            adaptive_simpson(|x| x, 5.0, 5.0, DEFAULT_REL_TOL).unwrap(),
            0.0
        );
    }
}

use num_traits::Zero;

use super::func::Func1D;
use super::poly::PiecewisePoly;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::rational::{to_f64, Rational};

/// Absolute tolerance of the adaptive Simpson rule, per unit of measure.
pub const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_MAX_DEPTH: u32 = 50;

/// Finite `(lo, hi)` of every part, after the measure checks.
fn finite_parts(domain: &IntervalSet) -> Result<(Vec<(Rational, Rational)>, Rational)> {
    let measure = domain.measure().ok_or(Error::InfiniteMeasure)?;
    if measure.is_zero() {
        return Err(Error::ZeroMeasure);
    }
    let parts = domain
        .parts()
        .iter()
        .filter_map(|part| part.bounds())
        .map(|b| {
            let lo = b.lo().finite().ok_or(Error::InfiniteMeasure)?.clone();
            let hi = b.hi().finite().ok_or(Error::InfiniteMeasure)?.clone();
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((parts, measure))
}

/// Exact mean of `p` over `domain`.
pub fn quad_mean_poly(p: &PiecewisePoly, domain: &IntervalSet) -> Result<Rational> {
    let (parts, measure) = finite_parts(domain)?;
    let mut total = Rational::zero();
    for (lo, hi) in &parts {
        total += p.integral(lo, hi)?;
    }
    Ok(total / measure)
}

/// Mean of `f` over `domain` by adaptive Simpson.
pub fn quad_mean_func(f: &Func1D, domain: &IntervalSet) -> Result<f64> {
    let (parts, measure) = finite_parts(domain)?;
    let measure = to_f64(&measure);
    let total: f64 = parts
        .iter()
        .map(|(lo, hi)| {
            let (a, b) = (to_f64(lo), to_f64(hi));
            adaptive_simpson(&|x| f.eval(x), a, b, SIMPSON_TOL * (b - a))
        })
        .sum();
    Ok(total / measure)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

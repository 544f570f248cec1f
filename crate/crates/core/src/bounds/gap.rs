use super::func::Func1D;
use crate::error::{Error, Result};

/// Number of points at which monotonicity of `f′` is sampled. A guard, not a
/// proof: a derivative that misbehaves between samples goes unnoticed.
pub const MONOTONE_SAMPLES: usize = 1024;

/// Relative width at which bisection for `c*` stops.
pub const BISECTION_TOL: f64 = 1e-14;

/// Sharp upper bound on the Jensen gap over `[a, b]`, attained by the
/// two-point system `(a: p, b: q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBound {
    pub c_star: f64,
    pub p: f64,
    pub q: f64,
    pub gap: f64,
    /// `f′` equals the secant slope on a whole subinterval; `c_star` is the
    /// midpoint of that plateau. The gap does not depend on the choice.
    pub plateau: bool,
    /// The derivative came from finite differences.
    pub derivative_approximated: bool,
}

/// Two-point gap `p f(a) + q f(b) − f(pa + qb)`.
pub fn two_point_gap(f: &Func1D, a: f64, b: f64, p: f64) -> f64 {
    let q = 1.0 - p;
    p * f.eval(a) + q * f.eval(b) - f.eval(p * a + q * b)
}

pub fn jensen_gap_bound(f: &Func1D, a: f64, b: f64) -> Result<GapBound> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::EmptyInterval);
    }
    let width = b - a;
    let approximated = f.derivative_is_approximate();
    let slack = if approximated { 1e-7 } else { 1e-12 };
    let mut prev = f64::NEG_INFINITY;
    for k in 0..MONOTONE_SAMPLES {
        let x = a + width * (k as f64 + 0.5) / MONOTONE_SAMPLES as f64;
        let d = f.deriv(x);
        if d.is_nan() || d < prev - slack * prev.abs().max(1.0) {
            return Err(Error::NotMonotoneDerivative(x));
        }
        prev = prev.max(d);
    }

    let slope = (f.eval(b) - f.eval(a)) / width;
    let tol = BISECTION_TOL * width;
    // Leftmost point with f′ ≥ slope and rightmost with f′ ≤ slope.
    let bisect = |below: &dyn Fn(f64) -> bool| {
        let (mut lo, mut hi) = (a, b);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let left = bisect(&|x| f.deriv(x) < slope);
    let right = bisect(&|x| f.deriv(x) <= slope);
    let plateau = right - left > 1e-9 * width;
    let c_star = 0.5 * (left + right);
    let p = (b - c_star) / width;
    Ok(GapBound {
        c_star,
        p,
        q: 1.0 - p,
        gap: two_point_gap(f, a, b, p),
        plateau,
        derivative_approximated: approximated,
    })
}

/// Ratio bound for arithmetic over geometric mean on `[1, 1 + r]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmGmBound {
    pub rho: f64,
    pub ratio_bound: f64,
    pub weight_a: f64,
    pub weight_b: f64,
}

pub fn amgm_bound(r: f64) -> Result<AmGmBound> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonpositiveR(r));
    }
    let l = r.ln_1p();
    let rho = l / r;
    Ok(AmGmBound {
        rho,
        ratio_bound: (rho - 1.0).exp() / rho,
        weight_a: 1.0 + 1.0 / r - 1.0 / l,
        weight_b: 1.0 / l - 1.0 / r,
    })
}

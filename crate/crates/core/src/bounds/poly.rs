use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub const MAX_DEGREE: usize = 8;

/// Maximum bisection depth of the nonnegativity test before giving up on a
/// sign change that never resolves (an irrational double root).
const BERNSTEIN_DEPTH: u32 = 30;

/// Polynomial pieces over rational breakpoints. Coefficients are in the global
/// variable `x`, ascending powers: `[c₀, c₁, …]` means `c₀ + c₁x + …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    breaks: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
}

fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    r
}

/// Coefficients of `p(lo + (hi − lo)t)` in `t`.
fn to_local(coeffs: &[Rational], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let h = hi - lo;
    // Taylor shift by `lo`, then scale by powers of `h`.
    let mut a = coeffs.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = &a[j + 1] * lo;
            a[j] += t;
        }
    }
    let mut scale = Rational::one();
    for c in a.iter_mut() {
        *c *= &scale;
        scale *= &h;
    }
    a
}

fn bernstein(local: &[Rational]) -> Vec<Rational> {
    let n = local.len() - 1;
    (0..=n)
        .map(|k| {
            (0..=k)
                .map(|j| binomial(k, j) / binomial(n, j) * &local[j])
                .sum()
        })
        .collect()
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> Result<Self> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPoly("breakpoints must be strictly increasing, at least two".into()));
        }
        if pieces.len() + 1 != breaks.len() {
            return Err(Error::InvalidPoly(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len() - 1,
                pieces.len()
            )));
        }
        if let Some(p) = pieces.iter().find(|p| p.is_empty() || p.len() > MAX_DEGREE + 1) {
            return Err(Error::InvalidPoly(format!(
                "piece with {} coefficients; degree must be between 0 and {MAX_DEGREE}",
                p.len()
            )));
        }
        Ok(PiecewisePoly { breaks, pieces })
    }

    /// Single polynomial on `[lo, hi]`.
    pub fn single(lo: Rational, hi: Rational, coeffs: Vec<Rational>) -> Result<Self> {
        Self::new(vec![lo, hi], vec![coeffs])
    }

    /// Uniform probability density on `[lo, hi]`.
    pub fn uniform(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidPoly("uniform density needs lo < hi".into()));
        }
        let h = Rational::one() / (&hi - &lo);
        Self::single(lo, hi, vec![h])
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        (&self.breaks[0], &self.breaks[self.breaks.len() - 1])
    }

    pub fn covers(&self, lo: &Rational, hi: &Rational) -> bool {
        let (a, b) = self.support();
        a <= lo && hi <= b
    }

    /// Value at `x`; at an interior breakpoint the right piece is used.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let (a, b) = self.support();
        if x < a || x > b {
            return None;
        }
        let k = self.breaks.partition_point(|t| t <= x).clamp(1, self.pieces.len());
        Some(horner(&self.pieces[k - 1], x))
    }

    pub fn eval_f64(&self, x: f64) -> Option<f64> {
        let (a, b) = self.support();
        if x < to_f64(a) || x > to_f64(b) {
            return None;
        }
        let k = self.breaks.partition_point(|t| to_f64(t) <= x).clamp(1, self.pieces.len());
        Some(
            self.pieces[k - 1]
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + to_f64(c)),
        )
    }

    /// Pieces clipped to `[lo, hi]` as `(piece_lo, piece_hi, coeffs)`.
    fn clipped<'a>(
        &'a self,
        lo: &'a Rational,
        hi: &'a Rational,
    ) -> impl Iterator<Item = (Rational, Rational, &'a [Rational])> + 'a {
        self.pieces.iter().enumerate().filter_map(move |(k, c)| {
            let l = (&self.breaks[k]).max(lo).clone();
            let h = (&self.breaks[k + 1]).min(hi).clone();
            (l < h).then_some((l, h, c.as_slice()))
        })
    }

    /// `∫_lo^hi xᵉ p(x) dx`, exact. Requires `[lo, hi]` inside the support.
    pub fn integral_moment(&self, lo: &Rational, hi: &Rational, e: usize) -> Result<Rational> {
        if lo > hi {
            return Err(Error::EmptyInterval);
        }
        if !self.covers(lo, hi) {
            return Err(Error::InvalidPoly(format!("[{lo}, {hi}] leaves the support")));
        }
        let mut total = Rational::zero();
        for (l, h, coeffs) in self.clipped(lo, hi) {
            for (j, c) in coeffs.iter().enumerate() {
                let k = j + e + 1;
                let kk = Rational::from_integer(k.into());
                total += c * (num_traits::pow(h.clone(), k) - num_traits::pow(l.clone(), k)) / kk;
            }
        }
        Ok(total)
    }

    pub fn integral(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        self.integral_moment(lo, hi, 0)
    }

    /// Finds a point of `[lo, hi]` where `p < 0`, or `None` if `p ≥ 0` there.
    ///
    /// Bernstein coefficients on each piece give a sufficient test; pieces
    /// that fail it are bisected. A sign change that survives to the depth
    /// limit without a negative sample is accepted as a tangency.
    pub fn find_negative(&self, lo: &Rational, hi: &Rational) -> Option<Rational> {
        self.clipped(lo, hi)
            .find_map(|(l, h, c)| negative_on(c, &l, &h, BERNSTEIN_DEPTH))
    }
}

fn negative_on(coeffs: &[Rational], lo: &Rational, hi: &Rational, depth: u32) -> Option<Rational> {
    for x in [lo, hi] {
        if horner(coeffs, x).is_negative() {
            return Some(x.clone());
        }
    }
    let b = bernstein(&to_local(coeffs, lo, hi));
    if b.iter().all(|c| !c.is_negative()) {
        return None;
    }
    let mid = (lo + hi) / Rational::from_integer(2.into());
    if horner(coeffs, &mid).is_negative() {
        return Some(mid);
    }
    if depth == 0 {
        return None;
    }
    negative_on(coeffs, lo, &mid, depth - 1).or_else(|| negative_on(coeffs, &mid, hi, depth - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn validation() {
        assert!(PiecewisePoly::new(ints(&[0]), vec![]).is_err());
        assert!(PiecewisePoly::new(ints(&[0, 1]), vec![vec![]]).is_err());
        assert!(PiecewisePoly::new(ints(&[0, 1]), vec![ints(&[0; 10])]).is_err());
        assert!(PiecewisePoly::new(ints(&[1, 0]), vec![ints(&[1])]).is_err());
        assert!(PiecewisePoly::new(ints(&[0, 1, 2]), vec![ints(&[1])]).is_err());
        assert!(PiecewisePoly::new(ints(&[0, 1]), vec![ints(&[0; 9])]).is_ok());
    }

    #[test]
    fn eval_and_integrals() {
        let sq = PiecewisePoly::single(int(0), int(1), ints(&[0, 0, 1])).unwrap();
        assert_eq!(sq.integral(&int(0), &int(1)).unwrap(), rat(1, 3));
        assert_eq!(sq.integral_moment(&int(0), &int(1), 1).unwrap(), rat(1, 4));
        assert_eq!(sq.eval(&rat(1, 2)), Some(rat(1, 4)));
        assert_eq!(sq.eval(&int(2)), None);
        assert!(sq.integral(&int(0), &int(2)).is_err());

        // |x| on [-1, 1] as two pieces
        let abs = PiecewisePoly::new(ints(&[-1, 0, 1]), vec![ints(&[0, -1]), ints(&[0, 1])]).unwrap();
        assert_eq!(abs.integral(&int(-1), &int(1)).unwrap(), int(1));
        assert_eq!(abs.integral(&rat(-1, 2), &rat(1, 4)).unwrap(), rat(5, 32));
        assert_eq!(abs.eval(&int(0)), Some(int(0)));
        assert_eq!(abs.eval_f64(-0.5), Some(0.5));
    }

    #[test]
    fn local_coefficients() {
        // x² on [1, 3]: (1 + 2t)² = 1 + 4t + 4t²
        assert_eq!(to_local(&ints(&[0, 0, 1]), &int(1), &int(3)), ints(&[1, 4, 4]));
        // Bernstein of t² on [0,1]: (0, 0, 1)
        assert_eq!(bernstein(&ints(&[0, 0, 1])), ints(&[0, 0, 1]));
    }

    #[test]
    fn nonnegativity() {
        // (x − 1/2)² touches zero at a subdivision point
        let p = PiecewisePoly::single(int(0), int(1), vec![rat(1, 4), int(-1), int(1)]).unwrap();
        assert_eq!(p.find_negative(&int(0), &int(1)), None);
        // (x − 1/3)² touches zero off the dyadic grid
        let p = PiecewisePoly::single(int(0), int(1), vec![rat(1, 9), rat(-2, 3), int(1)]).unwrap();
        assert_eq!(p.find_negative(&int(0), &int(1)), None);
        // x² − 1/100 dips below zero near 0
        let p = PiecewisePoly::single(int(-1), int(1), vec![rat(-1, 100), int(0), int(1)]).unwrap();
        let x = p.find_negative(&int(-1), &int(1)).unwrap();
        assert!(p.eval(&x).unwrap().is_negative());
        assert_eq!(p.find_negative(&rat(1, 2), &int(1)), None);
    }
}

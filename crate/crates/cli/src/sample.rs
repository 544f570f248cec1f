//! Seeded random instances used by `verify` to spot-check the properties an
//! output promises.

use barydecomp_core::rational::{int, Rational};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DEN: i64 = 64;

/// `lo + (hi − lo)·k/DEN` for uniform `k ∈ 0..=DEN`.
pub fn rat_between(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let k = rng.gen_range(0..=DEN);
    lo + (hi - lo) * Rational::new(k.into(), DEN.into())
}

/// Positive weights `k/DEN`, normalized to sum 1.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let raw: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(1..=DEN))).collect();
    let total: Rational = raw.iter().sum();
    raw.into_iter().map(|w| w / &total).collect()
}

/// Mixture of two-point systems `(a: p, b: q)` with `pa + qb = c`, flattened
/// into `(position, mass)` pairs. `pairs` holds `(a, b)` with `a ≤ c ≤ b`,
/// `a < b` or `a = b = c`.
pub fn mix_pairs(rng: &mut ChaCha8Rng, pairs: &[(Rational, Rational)], c: &Rational) -> Vec<(Rational, Rational)> {
    let w = simplex(rng, pairs.len());
    let mut out = Vec::with_capacity(2 * pairs.len());
    for ((a, b), w) in pairs.iter().zip(w) {
        if a == b {
            out.push((a.clone(), w));
            continue;
        }
        let p = (b - c) / (b - a);
        let q = Rational::one() - &p;
        if !p.is_zero() {
            out.push((a.clone(), &w * p));
        }
        if !q.is_zero() {
            out.push((b.clone(), w * q));
        }
    }
    out
}

/// Three-point weights with mean `c` on `x₁ < x₂ < x₃` (`x₁ ≤ c ≤ x₃`),
/// drawing the middle weight from a grid. `None` if the draw is infeasible.
pub fn three_point(
    rng: &mut ChaCha8Rng,
    xs: [&Rational; 3],
    c: &Rational,
) -> Option<[Rational; 3]> {
    let [x1, x2, x3] = xs;
    let l2 = Rational::new(rng.gen_range(0..=DEN).into(), DEN.into());
    let rest = Rational::one() - &l2;
    let l3 = (c - &l2 * x2 - &rest * x1) / (x3 - x1);
    let l1 = rest - &l3;
    (l1 >= Rational::zero() && l3 >= Rational::zero()).then_some([l1, l2, l3])
}

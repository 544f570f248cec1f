//! Convexity at a point, weighted convexity, conditional convex hulls and
//! membership propagation for functions tabulated on a finite domain.
//!
//! All arithmetic is exact. Float samples enter through
//! [`TabulatedFunction::from_fn`], which converts each value to its exact
//! rational image.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::interval::IntervalE;
use crate::pointmass1d::{barycenter, decompose_pairs, transport, Decomposition1D, System1D};
use crate::rational::{from_f64, to_f64, Rational};

/// `f: D -> R` on a finite, strictly increasing domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedFunction {
    domain: Vec<Rational>,
    values: Vec<Rational>,
}

impl TabulatedFunction {
    pub fn new(domain: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidFunction("empty domain".into()));
        }
        if domain.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} positions but {} values",
                domain.len(),
                values.len()
            )));
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("domain must be strictly increasing".into()));
        }
        Ok(TabulatedFunction { domain, values })
    }

    /// Tabulates a float function; each sample is converted exactly.
    pub fn from_fn(domain: Vec<Rational>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = domain
            .iter()
            .map(|x| from_f64(f(to_f64(x))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &[Rational] {
        &self.domain
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        self.domain.binary_search(x).ok()
    }

    pub fn value_at(&self, x: &Rational) -> Option<&Rational> {
        self.index_of(x).map(|i| &self.values[i])
    }

    fn in_hull(&self, c: &Rational) -> bool {
        &self.domain[0] <= c && c <= &self.domain[self.domain.len() - 1]
    }
}

/// Outcome of a predicate, with the violating positions when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Vec<Rational>>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: Vec<Rational>) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// Two-point mixture `(a: p, b: q)` with mean `c`, `a < c < b`.
#[derive(Debug, Clone)]
struct AdmissiblePair {
    a: usize,
    b: usize,
    p: Rational,
    q: Rational,
}

/// Pairs `a < c < b` of domain indices, plus the degenerate pair `a = b = c`
/// when `c` is in the domain. Ordered by left index descending, then right
/// index ascending.
fn admissible_pairs(f: &TabulatedFunction, c: &Rational) -> Vec<AdmissiblePair> {
    let d = &f.domain;
    let z = d.partition_point(|x| x < c);
    let first_right = z + usize::from(z < d.len() && &d[z] == c);
    let mut pairs = Vec::new();
    if let Some(i) = f.index_of(c) {
        pairs.push(AdmissiblePair {
            a: i,
            b: i,
            p: Rational::one(),
            q: Rational::zero(),
        });
    }
    for a in (0..z).rev() {
        for b in first_right..d.len() {
            let span = &d[b] - &d[a];
            pairs.push(AdmissiblePair {
                a,
                b,
                p: (&d[b] - c) / &span,
                q: (c - &d[a]) / span,
            });
        }
    }
    pairs
}

impl AdmissiblePair {
    fn value(&self, f: &TabulatedFunction) -> Rational {
        &self.p * &f.values[self.a] + &self.q * &f.values[self.b]
    }

    fn contains(&self, inner: &AdmissiblePair) -> bool {
        self.a <= inner.a && inner.b <= self.b
    }

    fn is_degenerate(&self) -> bool {
        self.a == self.b
    }
}

/// Three-slope criterion on adjacent triples.
pub fn is_convex_on(f: &TabulatedFunction, strict: bool) -> Verdict {
    let (x, y) = (&f.domain, &f.values);
    for i in 1..x.len().saturating_sub(1) {
        let left = (&y[i] - &y[i - 1]) / (&x[i] - &x[i - 1]);
        let right = (&y[i + 1] - &y[i]) / (&x[i + 1] - &x[i]);
        let ok = if strict { left < right } else { left <= right };
        if !ok {
            return Verdict::fail(vec![x[i - 1].clone(), x[i].clone(), x[i + 1].clone()]);
        }
    }
    Verdict::pass()
}

pub fn is_convex_at(f: &TabulatedFunction, c: &Rational, strict: bool) -> Result<Verdict> {
    is_convex_at_with(f, c, strict, Strategy::default())
}

/// Every mixture `p f(a) + q f(b)` with `pa + qb = c` is at least `f(c)`
/// (strictly greater unless `a = b`).
pub fn is_convex_at_with(
    f: &TabulatedFunction,
    c: &Rational,
    strict: bool,
    strategy: Strategy,
) -> Result<Verdict> {
    let fc = f
        .value_at(c)
        .ok_or_else(|| Error::CNotInDomain(c.to_string()))?
        .clone();
    let pairs: Vec<AdmissiblePair> = admissible_pairs(f, c)
        .into_iter()
        .filter(|p| !p.is_degenerate())
        .collect();
    let bad = exec::find_first(strategy, pairs.len(), |k| {
        let v = pairs[k].value(f);
        let ok = if strict { v > fc } else { v >= fc };
        (!ok).then(|| vec![f.domain[pairs[k].a].clone(), f.domain[pairs[k].b].clone()])
    });
    Ok(bad.map_or_else(Verdict::pass, |(_, w)| Verdict::fail(w)))
}

pub fn is_weighted_convex_at(f: &TabulatedFunction, c: &Rational, strict: bool) -> Result<Verdict> {
    is_weighted_convex_at_with(f, c, strict, Strategy::default())
}

/// For every nested pair of admissible pairs `[a₀,b₀] ⊆ [a₁,b₁]` with mean
/// `c`, the inner mixture does not exceed the outer one. Brute force over all
/// 4-tuples. Witness: `[a₀, b₀, a₁, b₁]`.
pub fn is_weighted_convex_at_with(
    f: &TabulatedFunction,
    c: &Rational,
    strict: bool,
    strategy: Strategy,
) -> Result<Verdict> {
    if !f.in_hull(c) {
        return Err(Error::COutOfHull(c.to_string()));
    }
    let pairs = admissible_pairs(f, c);
    let values: Vec<Rational> = pairs.iter().map(|p| p.value(f)).collect();
    let bad = exec::find_first(strategy, pairs.len(), |outer| {
        let po = &pairs[outer];
        pairs.iter().enumerate().find_map(|(inner, pi)| {
            if inner == outer || !po.contains(pi) {
                return None;
            }
            let ok = if strict {
                values[inner] < values[outer]
            } else {
                values[inner] <= values[outer]
            };
            (!ok).then(|| {
                let d = &f.domain;
                vec![d[pi.a].clone(), d[pi.b].clone(), d[po.a].clone(), d[po.b].clone()]
            })
        })
    });
    Ok(bad.map_or_else(Verdict::pass, |(_, w)| Verdict::fail(w)))
}

/// Weighted convexity at `c` implies convexity at `c`; returns whether the
/// implication holds for this instance.
pub fn weighted_implies_pointwise_check(f: &TabulatedFunction, c: &Rational) -> Result<bool> {
    if f.index_of(c).is_none() {
        return Err(Error::CNotInDomain(c.to_string()));
    }
    let weighted = is_weighted_convex_at(f, c, false)?.holds;
    let pointwise = is_convex_at(f, c, false)?.holds;
    let weighted_strict = is_weighted_convex_at(f, c, true)?.holds;
    let pointwise_strict = is_convex_at(f, c, true)?.holds;
    Ok((!weighted || pointwise) && (!weighted_strict || pointwise_strict))
}

/// Two-point conditional values at `c` and their hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullResult {
    /// Sorted, distinct values `p f(a) + q f(b)` with `pa + qb = c`.
    pub finite_values: Vec<Rational>,
    /// `[min, max]` of `finite_values`; equals the full conditional hull at `c`.
    pub hull: IntervalE,
}

pub fn f2_star(f: &TabulatedFunction, c: &Rational) -> Result<HullResult> {
    if !f.in_hull(c) {
        return Err(Error::COutOfHull(c.to_string()));
    }
    let mut values: Vec<Rational> = admissible_pairs(f, c).iter().map(|p| p.value(f)).collect();
    values.sort();
    values.dedup();
    let hull = IntervalE::closed(values[0].clone(), values[values.len() - 1].clone());
    Ok(HullResult {
        finite_values: values,
        hull,
    })
}

/// Closed hull of the achievable Jensen gaps `Σλf(x) - f(Σλx)` with mean in
/// `B`, computed from two-point gaps.
pub fn gap_set(f: &TabulatedFunction, b: &[Rational]) -> Result<IntervalE> {
    if b.is_empty() {
        return Err(Error::EmptyB);
    }
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for c in b {
        let fc = f
            .value_at(c)
            .ok_or_else(|| Error::BNotInDomain(c.to_string()))?;
        let h = f2_star(f, c)?;
        let min = &h.finite_values[0] - fc;
        let max = &h.finite_values[h.finite_values.len() - 1] - fc;
        lo = Some(lo.map_or(min.clone(), |l| l.min(min)));
        hi = Some(hi.map_or(max.clone(), |h| h.max(max)));
    }
    Ok(IntervalE::closed(lo.unwrap(), hi.unwrap()))
}

/// Certificate that `value` is a convex combination of pair values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationCertificate {
    pub decomposition: Decomposition1D,
    /// `pₛf(aᵢ) + qₛf(aⱼ) + g(c)`, one per component.
    pub pair_values: Vec<Rational>,
    /// `f(c) + g(c)` when mass sits at the barycenter.
    pub fixed_value: Option<Rational>,
}

impl PropagationCertificate {
    /// `Σ wₛ·pair_valueₛ` plus the fixed share.
    pub fn recombined(&self) -> Rational {
        let d = &self.decomposition;
        let mut total: Rational = d
            .components
            .iter()
            .zip(&self.pair_values)
            .map(|(comp, v)| &comp.weight * v)
            .sum();
        if let Some(v) = &self.fixed_value {
            total += &d.fixed_mass_at_c / &d.source_total_mass * v;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub value: Rational,
    pub inside: bool,
    /// Whether every two-point value at the barycenter over the whole domain
    /// lies in `J`. When true, `inside` is guaranteed.
    pub pair_condition: bool,
    pub certificate: PropagationCertificate,
}

/// Evaluates `Σλᵢf(xᵢ) + g(Σλᵢxᵢ)` for the normalized system `s` and tests
/// membership in `j`, with the pair-decomposition certificate.
pub fn propagate_membership(
    f: &TabulatedFunction,
    g: impl Fn(&Rational) -> Option<Rational>,
    j: &IntervalE,
    s: &System1D,
) -> Result<Propagation> {
    let fv = |x: &Rational| {
        f.value_at(x)
            .cloned()
            .ok_or_else(|| Error::MissingValue(x.to_string()))
    };
    let c = barycenter(s);
    let gc = g(&c).ok_or_else(|| Error::MissingG(c.to_string()))?;
    let total = s.total_mass();
    let mut value = gc.clone();
    for (x, m) in s.points() {
        value += m / &total * fv(x)?;
    }

    let d = decompose_pairs(s);
    let pair_values = d
        .components
        .iter()
        .map(|comp| Ok(&comp.left_frac * fv(&comp.left_pos)? + &comp.right_frac * fv(&comp.right_pos)? + &gc))
        .collect::<Result<Vec<_>>>()?;
    let fixed_value = if d.fixed_mass_at_c.is_positive() {
        Some(fv(&c)? + &gc)
    } else {
        None
    };
    let pair_condition = if f.in_hull(&c) {
        f2_star(f, &c)?
            .finite_values
            .iter()
            .all(|v| j.contains(&(v + &gc)))
    } else {
        false
    };
    Ok(Propagation {
        inside: j.contains(&value),
        value,
        pair_condition,
        certificate: PropagationCertificate {
            decomposition: d,
            pair_values,
            fixed_value,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSample {
    pub value: Rational,
    pub inside: bool,
    /// Transport matrix, rows outer positions, columns inner positions.
    pub transport: Vec<Vec<Rational>>,
    /// Per inner point: `(Σᵢλᵢⱼf(aᵢ))/qⱼ + g(bⱼ)`.
    pub column_values: Vec<Rational>,
}

/// `Σpᵢf(aᵢ) + Σqⱼg(bⱼ)` for an outer system and a nested inner system with
/// the same barycenter, tested against `j`. Both systems are normalized first.
pub fn two_sample_membership(
    outer: &System1D,
    f: impl Fn(&Rational) -> Option<Rational>,
    inner: &System1D,
    g: impl Fn(&Rational) -> Option<Rational>,
    j: &IntervalE,
) -> Result<TwoSample> {
    let (outer, inner) = (outer.normalized(), inner.normalized());
    let matrix = transport(&outer, &inner)?;
    let fv = outer
        .positions()
        .map(|a| f(a).ok_or_else(|| Error::MissingValue(a.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let gv = inner
        .positions()
        .map(|b| g(b).ok_or_else(|| Error::MissingValue(b.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let value: Rational = outer
        .points()
        .iter()
        .zip(&fv)
        .map(|((_, p), v)| p * v)
        .chain(inner.points().iter().zip(&gv).map(|((_, q), v)| q * v))
        .sum();
    let column_values = inner
        .points()
        .iter()
        .enumerate()
        .map(|(col, (_, q))| {
            let mixed: Rational = matrix.iter().zip(&fv).map(|(row, v)| &row[col] * v).sum();
            mixed / q + &gv[col]
        })
        .collect();
    Ok(TwoSample {
        inside: j.contains(&value),
        value,
        transport: matrix,
        column_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn tab(domain: &[i64], values: &[i64]) -> TabulatedFunction {
        TabulatedFunction::new(
            domain.iter().map(|&x| int(x)).collect(),
            values.iter().map(|&x| int(x)).collect(),
        )
        .unwrap()
    }

    fn neg_sinc(x: f64) -> f64 {
        if x == 0.0 {
            -1.0
        } else {
            -x.sin() / x
        }
    }

    #[test]
    fn convex_on_examples() {
        let sq = tab(&[-2, -1, 0, 1, 2], &[4, 1, 0, 1, 4]);
        assert!(is_convex_on(&sq, false).holds && is_convex_on(&sq, true).holds);
        let abs = tab(&[-1, 0, 1], &[1, 0, 1]);
        assert!(is_convex_on(&abs, true).holds);
        let bump = tab(&[-1, 0, 1], &[0, 1, 0]);
        let v = is_convex_on(&bump, false);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(vec![int(-1), int(0), int(1)]));
        let line = tab(&[0, 1, 2], &[0, 1, 2]);
        assert!(is_convex_on(&line, false).holds && !is_convex_on(&line, true).holds);
    }

    #[test]
    fn convex_at_examples() {
        let ind = tab(&[-1, 0, 1], &[1, 0, 1]);
        assert!(is_convex_at(&ind, &int(0), false).unwrap().holds);
        let single = tab(&[3], &[-7]);
        assert!(is_convex_at(&single, &int(3), true).unwrap().holds);
        assert_eq!(
            is_convex_at(&single, &int(4), false),
            Err(Error::CNotInDomain("4".into()))
        );

        let grid: Vec<Rational> = (-8..=8)
            .map(|k| from_f64(k as f64 * std::f64::consts::FRAC_PI_4).unwrap())
            .collect();
        let f = TabulatedFunction::from_fn(grid, neg_sinc).unwrap();
        assert!(is_convex_at(&f, &int(0), true).unwrap().holds);
        // but not convex on the whole grid
        assert!(!is_convex_on(&f, false).holds);
    }

    #[test]
    fn weighted_convex_examples() {
        let sq = tab(&[-2, -1, 1, 2], &[4, 1, 1, 4]);
        assert!(is_weighted_convex_at(&sq, &int(0), true).unwrap().holds);
        let two = tab(&[-1, 1], &[5, -3]);
        assert!(is_weighted_convex_at(&two, &int(0), true).unwrap().holds);
        assert_eq!(
            is_weighted_convex_at(&two, &int(2), false),
            Err(Error::COutOfHull("2".into()))
        );

        let pi = std::f64::consts::PI;
        let grid: Vec<Rational> = [-2.0 * pi, -1.5 * pi, 1.5 * pi, 2.0 * pi]
            .iter()
            .map(|&x| from_f64(x).unwrap())
            .collect();
        let f = TabulatedFunction::from_fn(grid.clone(), neg_sinc).unwrap();
        let v = is_weighted_convex_at(&f, &int(0), false).unwrap();
        assert!(!v.holds);
        // inner [-3π/2, 3π/2] sits inside an outer pair with a smaller mixture
        let w = v.witness.unwrap();
        assert_eq!((&w[0], &w[1]), (&grid[1], &grid[2]));
        assert!(w[2] <= w[0] && w[1] <= w[3]);
        let inner = to_f64(f.value_at(&grid[2]).unwrap());
        assert!((inner - 2.0 / (3.0 * pi)).abs() < 1e-15);
    }

    #[test]
    fn weighted_implies_pointwise() {
        let sq = tab(&[-2, -1, 0, 1, 2], &[4, 1, 0, 1, 4]);
        assert!(is_weighted_convex_at(&sq, &int(0), false).unwrap().holds);
        assert!(weighted_implies_pointwise_check(&sq, &int(0)).unwrap());
        let grid: Vec<Rational> = (-8..=8)
            .map(|k| from_f64(k as f64 * std::f64::consts::FRAC_PI_4).unwrap())
            .collect();
        let f = TabulatedFunction::from_fn(grid, neg_sinc).unwrap();
        assert!(!is_weighted_convex_at(&f, &int(0), false).unwrap().holds);
        assert!(weighted_implies_pointwise_check(&f, &int(0)).unwrap());
    }

    #[test]
    fn f2_star_examples() {
        let ind0 = tab(&[-2, -1, 0, 1, 2], &[0, 0, 1, 0, 0]);
        let h = f2_star(&ind0, &int(0)).unwrap();
        assert_eq!(h.finite_values, vec![int(0), int(1)]);
        assert_eq!(h.hull, IntervalE::closed(int(0), int(1)));

        let h = f2_star(&ind0, &int(-2)).unwrap();
        assert_eq!(h.finite_values, vec![int(0)]);
        assert_eq!(h.hull, IntervalE::point(int(0)));

        let sq = tab(&[-1, 0, 2], &[1, 0, 4]);
        let h = f2_star(&sq, &int(0)).unwrap();
        assert_eq!(h.finite_values, vec![int(0), int(2)]);
        assert_eq!(h.hull, IntervalE::closed(int(0), int(2)));

        // c outside the domain but inside its hull
        let h = f2_star(&sq, &int(1)).unwrap();
        assert_eq!(h.finite_values, vec![int(2), int(3)]);
        assert!(f2_star(&sq, &int(3)).is_err());
    }

    #[test]
    fn gap_set_examples() {
        let abs = tab(&[-1, 0, 1], &[1, 0, 1]);
        assert_eq!(gap_set(&abs, &[int(0)]).unwrap(), IntervalE::closed(int(0), int(1)));
        let line = tab(&[-3, 0, 1, 5], &[-6, 0, 2, 10]);
        assert_eq!(
            gap_set(&line, &[int(0), int(1)]).unwrap(),
            IntervalE::point(int(0))
        );
        let ind0 = tab(&[-2, -1, 0, 1, 2], &[0, 0, 1, 0, 0]);
        assert_eq!(gap_set(&ind0, &[int(0)]).unwrap(), IntervalE::closed(int(-1), int(0)));
        assert_eq!(gap_set(&ind0, &[]), Err(Error::EmptyB));
        assert!(matches!(gap_set(&ind0, &[rat(1, 2)]), Err(Error::BNotInDomain(_))));
    }

    #[test]
    fn propagate_floor_example() {
        let grid = vec![rat(1, 2), rat(3, 2), rat(5, 2)];
        let f = TabulatedFunction::new(grid.clone(), vec![int(0), int(1), int(2)]).unwrap();
        let floor = |x: &Rational| Some(-Rational::from_integer(x.floor().to_integer()));
        let j = IntervalE::open(int(-1), int(1));
        let s = System1D::uniform(grid).unwrap();
        let out = propagate_membership(&f, floor, &j, &s).unwrap();
        assert_eq!(out.value, int(0));
        assert!(out.inside);
        assert_eq!(out.certificate.recombined(), out.value);
    }

    #[test]
    fn propagate_single_point() {
        let f = tab(&[0, 1], &[3, 5]);
        let s = System1D::new([(int(1), int(2))]).unwrap();
        let out = propagate_membership(&f, |_| Some(int(1)), &IntervalE::real_line(), &s).unwrap();
        assert_eq!(out.value, int(6));
        assert!(out.certificate.decomposition.components.is_empty());
        assert_eq!(out.certificate.recombined(), int(6));
        assert_eq!(
            propagate_membership(&f, |_| None, &IntervalE::real_line(), &s),
            Err(Error::MissingG("1".into()))
        );
    }

    #[test]
    fn two_sample_square_example() {
        let outer = System1D::new([(int(0), rat(1, 2)), (int(4), rat(1, 2))]).unwrap();
        let inner = System1D::new([(int(1), rat(1, 2)), (int(3), rat(1, 2))]).unwrap();
        let sq = |x: &Rational| Some(x * x);
        let neg_sq = |x: &Rational| Some(-(x * x));
        let out = two_sample_membership(&outer, sq, &inner, neg_sq, &IntervalE::at_least(int(0))).unwrap();
        assert_eq!(out.value, int(3));
        assert!(out.inside);
        let recombined: Rational = out
            .column_values
            .iter()
            .zip(inner.points())
            .map(|(v, (_, q))| v * q)
            .sum();
        assert_eq!(recombined, out.value);

        let point = System1D::new([(int(2), int(1))]).unwrap();
        let out = two_sample_membership(&point, sq, &point, |_| Some(int(1)), &IntervalE::real_line()).unwrap();
        assert_eq!(out.value, int(5));
    }

    #[test]
    fn strategies_give_identical_verdicts() {
        let f = tab(&[-4, -3, -1, 0, 2, 3, 5], &[3, -1, 2, 0, 7, -2, 4]);
        for c in [int(0), rat(1, 2)] {
            assert_eq!(
                is_weighted_convex_at_with(&f, &c, false, Strategy::Sequential),
                is_weighted_convex_at_with(&f, &c, false, Strategy::Parallel)
            );
        }
        assert_eq!(
            is_convex_at_with(&f, &int(0), false, Strategy::Sequential),
            is_convex_at_with(&f, &int(0), false, Strategy::Parallel)
        );
    }
}

//! Point-mass systems on the real line and their pair decompositions.
//!
//! Every system with barycenter `c` splits uniquely into two-point systems
//! that all balance at `c`, built innermost pair first. Pair splitting
//! against several targets ([`refine_pair`]) and the mass-transport matrix
//! between an outer and a nested inner system ([`transport`]) are built from
//! that decomposition.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Rational, Scalar};

/// A finite list of `(position, mass)` pairs with strictly positive masses.
///
/// Canonical form: positions strictly increasing; duplicate positions are
/// merged by summing their masses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct System1D {
    points: Vec<(Rational, Rational)>,
}

impl System1D {
    pub fn new(points: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (pos, mass) in points {
            if !mass.is_positive() {
                return Err(Error::NonPositiveMass);
            }
            *merged.entry(pos).or_insert_with(Rational::zero) += mass;
        }
        if merged.is_empty() {
            return Err(Error::EmptySystem);
        }
        Ok(System1D {
            points: merged.into_iter().collect(),
        })
    }

    /// Equal masses `1/n` at each position.
    pub fn uniform(positions: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let positions: Vec<Rational> = positions.into_iter().collect();
        let mass = Rational::one() / Rational::from_usize(positions.len().max(1));
        Self::new(positions.into_iter().map(|p| (p, mass.clone())))
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = &Rational> {
        self.points.iter().map(|(p, _)| p)
    }

    pub fn total_mass(&self) -> Rational {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn min_position(&self) -> &Rational {
        &self.points[0].0
    }

    pub fn max_position(&self) -> &Rational {
        &self.points[self.points.len() - 1].0
    }

    /// Same positions, masses divided by the total.
    pub fn normalized(&self) -> System1D {
        let total = self.total_mass();
        System1D {
            points: self
                .points
                .iter()
                .map(|(p, m)| (p.clone(), m / &total))
                .collect(),
        }
    }

    pub fn mass_at(&self, pos: &Rational) -> Option<&Rational> {
        self.points
            .binary_search_by(|(p, _)| p.cmp(pos))
            .ok()
            .map(|i| &self.points[i].1)
    }
}

/// Center of mass `Σ mᵢaᵢ / Σ mᵢ`, exact.
pub fn barycenter(s: &System1D) -> Rational {
    let moment: Rational = s.points.iter().map(|(p, m)| p * m).sum();
    moment / s.total_mass()
}

/// A two-point system `(left_pos: left_frac, right_pos: right_frac)` carrying
/// share `weight` of the source mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairComponent {
    pub weight: Rational,
    pub left_pos: Rational,
    pub left_frac: Rational,
    pub right_pos: Rational,
    pub right_frac: Rational,
}

impl PairComponent {
    pub fn mean(&self) -> Rational {
        &self.left_frac * &self.left_pos + &self.right_frac * &self.right_pos
    }

    pub fn span(&self) -> Rational {
        &self.right_pos - &self.left_pos
    }

    /// `p f(a) + q f(b)` with `f` given as a lookup.
    pub fn mix<T: Scalar>(&self, f: impl Fn(&Rational) -> Option<T>) -> Result<T> {
        let fa = f(&self.left_pos).ok_or_else(|| Error::MissingValue(self.left_pos.to_string()))?;
        let fb = f(&self.right_pos).ok_or_else(|| Error::MissingValue(self.right_pos.to_string()))?;
        Ok(T::from_rational(&self.left_frac) * fa + T::from_rational(&self.right_frac) * fb)
    }
}

/// Result of [`decompose_pairs`].
///
/// `weight`s are pair masses divided by `source_total_mass`; mass sitting
/// exactly at the barycenter is kept aside in `fixed_mass_at_c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition1D {
    pub barycenter: Rational,
    pub fixed_mass_at_c: Rational,
    pub components: Vec<PairComponent>,
    pub source_total_mass: Rational,
}

/// Decomposes `s` into two-point systems sharing its barycenter.
///
/// A pair `(aᵢ, aⱼ)` balances at `c` exactly when it takes equal moment
/// `mass·|a − c|` from both sides. So the decomposition is the merge of the
/// cumulative moments on either side of `c`, each walked outward from the
/// innermost point: every merged step is one pair, and a side advances when
/// its current point's moment is used up. The left positions come out
/// non-increasing, the right positions non-decreasing, and the spans strictly
/// increasing.
///
/// The walk runs on integers: positions and masses are scaled by the lcm of
/// their denominators and positions are measured as `u = T·X − S` (`T`, `S`
/// the scaled total mass and moment), so `c` sits at `u = 0`.
pub fn decompose_pairs(s: &System1D) -> Decomposition1D {
    let c = barycenter(s);
    let total = s.total_mass();
    let fixed = s.mass_at(&c).cloned().unwrap_or_else(Rational::zero);

    let scale = |f: fn(&(Rational, Rational)) -> &Rational| {
        let l = s.points.iter().fold(BigInt::one(), |l, p| l.lcm(f(p).denom()));
        s.points
            .iter()
            .map(|p| f(p).numer() * (&l / f(p).denom()))
            .collect::<Vec<BigInt>>()
    };
    let xs = scale(|p| &p.0);
    let ms = scale(|p| &p.1);
    let t: BigInt = ms.iter().sum();
    let moment: BigInt = xs.iter().zip(&ms).map(|(x, m)| x * m).sum();
    let u: Vec<BigInt> = xs.iter().map(|x| &t * x - &moment).collect();
    let side_moment = |k: usize| &ms[k] * u[k].abs();

    let n = s.points.len();
    let z = u.partition_point(|v| v.is_negative());
    let first_right = z + usize::from(fixed.is_positive());
    let mut components = Vec::new();

    // i counts points still available on the left; j indexes the right side.
    let (mut i, mut j) = (z, first_right);
    if i > 0 && j < n {
        let (mut left, mut right) = (side_moment(i - 1), side_moment(j));
        loop {
            let step = left.clone().min(right.clone());
            let (below, above) = (-&u[i - 1], &u[j]);
            let span = &below + above;
            components.push(PairComponent {
                weight: Rational::new(&step * &span, &below * above * &t),
                left_pos: s.points[i - 1].0.clone(),
                left_frac: Rational::new(above.clone(), span.clone()),
                right_pos: s.points[j].0.clone(),
                right_frac: Rational::new(below, span),
            });
            left -= &step;
            right -= &step;
            if left.is_zero() {
                i -= 1;
            }
            if right.is_zero() {
                j += 1;
            }
            if i == 0 || j == n {
                break;
            }
            if left.is_zero() {
                left = side_moment(i - 1);
            }
            if right.is_zero() {
                right = side_moment(j);
            }
        }
    }
    debug_assert!(i == 0 && j == n, "moments must balance");

    Decomposition1D {
        barycenter: c,
        fixed_mass_at_c: fixed,
        components,
        source_total_mass: total,
    }
}

/// Rebuilds the source system from a decomposition.
pub fn recompose(d: &Decomposition1D) -> Result<System1D> {
    let mut points = Vec::with_capacity(2 * d.components.len() + 1);
    if d.fixed_mass_at_c.is_positive() {
        points.push((d.barycenter.clone(), d.fixed_mass_at_c.clone()));
    }
    for comp in &d.components {
        let mass = &comp.weight * &d.source_total_mass;
        points.push((comp.left_pos.clone(), &mass * &comp.left_frac));
        points.push((comp.right_pos.clone(), &mass * &comp.right_frac));
    }
    System1D::new(points)
}

/// Named structural checks of `d` against its source `s`.
///
/// Covers recomposition, pair means, mass conservation, the component-count
/// bounds, the ordering/nesting structure and the per-pair mass caps.
pub fn check_decomposition(s: &System1D, d: &Decomposition1D) -> Vec<(&'static str, bool)> {
    let c = &d.barycenter;
    let total = &d.source_total_mass;
    let comps = &d.components;

    let recomposes = recompose(d).map(|r| &r == s).unwrap_or(false);
    let pair_means = comps.iter().all(|p| &p.mean() == c);
    let fractions = comps.iter().all(|p| {
        p.left_frac.is_positive()
            && p.right_frac.is_positive()
            && (&p.left_frac + &p.right_frac).is_one()
            && p.left_pos < p.right_pos
            && p.weight.is_positive()
    });
    let mass: Rational = comps
        .iter()
        .map(|p| &p.weight * (&p.left_frac + &p.right_frac) * total)
        .sum::<Rational>()
        + &d.fixed_mass_at_c;
    let conserves = &mass == total && &s.total_mass() == total;

    let n = s.len() - usize::from(d.fixed_mass_at_c.is_positive());
    let z = s.points.partition_point(|(p, _)| p < c);
    let m = comps.len();
    let count_bounds = if n == 0 {
        m == 0
    } else {
        z.max(n - z) <= m && m < n
    };

    let monotone = comps.windows(2).all(|w| {
        w[1].left_pos <= w[0].left_pos && w[0].right_pos <= w[1].right_pos && w[0].span() < w[1].span()
    });
    let nested = comps
        .iter()
        .all(|p| &p.left_pos < c && c < &p.right_pos);

    let caps = comps.iter().all(|p| {
        let pm = &p.weight * total;
        s.mass_at(&p.left_pos).is_some_and(|l| &pm * &p.left_frac <= *l)
            && s.mass_at(&p.right_pos).is_some_and(|r| &pm * &p.right_frac <= *r)
    });
    let fixed_ok = match s.mass_at(c) {
        Some(m) => m == &d.fixed_mass_at_c,
        None => d.fixed_mass_at_c.is_zero(),
    };

    vec![
        ("recomposition", recomposes),
        ("pair_barycenter", pair_means),
        ("pair_fractions", fractions),
        ("mass_conservation", conserves),
        ("component_count_bounds", count_bounds),
        ("monotone_structure", monotone),
        ("nesting", nested),
        ("per_pair_caps", caps),
        ("fixed_mass_at_c", fixed_ok),
    ]
}

/// Splits the pair `(a: p, b: q)` into sub-pairs with means `cᵢ` and total
/// masses `wᵢ`: returns `(pᵢ, qᵢ) = (wᵢθᵢ, wᵢ(1-θᵢ))` where
/// `θᵢa + (1-θᵢ)b = cᵢ`.
pub fn refine_pair(
    a: &Rational,
    b: &Rational,
    p: &Rational,
    q: &Rational,
    targets: &[(Rational, Rational)],
) -> Result<Vec<(Rational, Rational)>> {
    if a >= b {
        return Err(Error::InvalidPair(format!("need a < b, got {a} >= {b}")));
    }
    if !p.is_positive() || !q.is_positive() || !(p + q).is_one() {
        return Err(Error::InvalidPair("need p, q > 0 and p + q = 1".into()));
    }
    if targets.iter().any(|(_, w)| !w.is_positive()) {
        return Err(Error::NonPositiveMass);
    }
    let weight_sum: Rational = targets.iter().map(|(_, w)| w).sum();
    if !weight_sum.is_one() {
        return Err(Error::NotNormalized(weight_sum.to_string()));
    }
    if let Some((c, _)) = targets.iter().find(|(c, _)| !(a < c && c < b)) {
        return Err(Error::TargetOutOfRange(c.to_string()));
    }
    let mean: Rational = targets.iter().map(|(c, w)| c * w).sum();
    if mean != p * a + q * b {
        return Err(Error::InconsistentMean);
    }
    Ok(split_against(a, b, targets))
}

fn split_against(a: &Rational, b: &Rational, targets: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let span = b - a;
    targets
        .iter()
        .map(|(c, w)| {
            let theta = (b - c) / &span;
            (w * &theta, w * (Rational::one() - theta))
        })
        .collect()
}

/// Transport matrix `λᵢⱼ ≥ 0` between an outer and an inner normalized
/// system with equal barycenters, where no outer position lies strictly
/// inside the inner span.
///
/// Row sums are the outer masses, column sums the inner masses, and column
/// `j` balances at `bⱼ`. Rows and columns follow ascending position order.
pub fn transport(outer: &System1D, inner: &System1D) -> Result<Vec<Vec<Rational>>> {
    for s in [outer, inner] {
        let t = s.total_mass();
        if !t.is_one() {
            return Err(Error::NotNormalized(t.to_string()));
        }
    }
    let c = barycenter(outer);
    if c != barycenter(inner) {
        return Err(Error::BarycenterMismatch);
    }
    let (lo, hi) = (inner.min_position(), inner.max_position());
    if let Some(a) = outer.positions().find(|a| lo < *a && *a < hi) {
        return Err(Error::InnerNotNested(a.to_string()));
    }

    let row_of = |pos: &Rational| {
        outer
            .points
            .binary_search_by(|(p, _)| p.cmp(pos))
            .expect("component positions come from the outer system")
    };
    let mut matrix = vec![vec![Rational::zero(); inner.len()]; outer.len()];
    let d = decompose_pairs(outer);
    if d.fixed_mass_at_c.is_positive() {
        // Only possible when the inner system is concentrated at c.
        let r = row_of(&c);
        for (j, (_, qj)) in inner.points.iter().enumerate() {
            matrix[r][j] += &d.fixed_mass_at_c * qj;
        }
    }
    for comp in &d.components {
        let (li, ri) = (row_of(&comp.left_pos), row_of(&comp.right_pos));
        for (j, (pj, qj)) in split_against(&comp.left_pos, &comp.right_pos, &inner.points)
            .into_iter()
            .enumerate()
        {
            matrix[li][j] += &comp.weight * pj;
            matrix[ri][j] += &comp.weight * qj;
        }
    }
    Ok(matrix)
}

/// Checks row sums, column sums, non-negativity and column barycenters of a
/// transport matrix.
pub fn check_transport(outer: &System1D, inner: &System1D, matrix: &[Vec<Rational>]) -> Vec<(&'static str, bool)> {
    let shape = matrix.len() == outer.len() && matrix.iter().all(|r| r.len() == inner.len());
    if !shape {
        return vec![("shape", false)];
    }
    let nonneg = matrix.iter().flatten().all(|x| !x.is_negative());
    let rows = matrix
        .iter()
        .zip(&outer.points)
        .all(|(row, (_, p))| &row.iter().sum::<Rational>() == p);
    let cols = (0..inner.len()).all(|j| {
        let col: Rational = matrix.iter().map(|r| &r[j]).sum();
        col == inner.points[j].1
    });
    let bary = (0..inner.len()).all(|j| {
        let mass: Rational = matrix.iter().map(|r| &r[j]).sum();
        let moment: Rational = matrix
            .iter()
            .zip(&outer.points)
            .map(|(r, (a, _))| &r[j] * a)
            .sum();
        !mass.is_zero() && moment / mass == inner.points[j].0
    });
    vec![
        ("shape", true),
        ("nonnegative", nonneg),
        ("row_sums", rows),
        ("column_sums", cols),
        ("column_barycenters", bary),
    ]
}

/// Both sides of `Σλₖf(aₖ) + g(c) = Σ wₛ[pₛf(aᵢ) + qₛf(aⱼ) + g(c)]` with
/// normalized masses. Mass held at `c` enters the right side as the
/// degenerate pair `(c: 1)`.
pub fn verify_sum_identity<T: Scalar>(
    d: &Decomposition1D,
    f: impl Fn(&Rational) -> Option<T>,
    g_at_c: T,
) -> Result<(T, T)> {
    let source = recompose(d)?;
    let total = &d.source_total_mass;
    let lookup = |x: &Rational| f(x).ok_or_else(|| Error::MissingValue(x.to_string()));

    let mut lhs = g_at_c.clone();
    for (pos, mass) in source.points() {
        lhs = lhs + T::from_rational(&(mass / total)) * lookup(pos)?;
    }

    let mut rhs = T::zero();
    if d.fixed_mass_at_c.is_positive() {
        let share = T::from_rational(&(&d.fixed_mass_at_c / total));
        rhs = rhs + share * (lookup(&d.barycenter)? + g_at_c.clone());
    }
    for comp in &d.components {
        let pair = comp.mix(|x| f(x))? + g_at_c.clone();
        rhs = rhs + T::from_rational(&comp.weight) * pair;
    }
    Ok((lhs, rhs))
}

//! Intervals over the extended rationals, normalized interval unions, and the
//! sufficient conditions under which a family of intervals has an interval as
//! its union.
//!
//! Endpoints are exact ([`Ext`]); there are no float endpoints. Connectivity
//! is decided for finite families only.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;

use crate::error::{Error, Result};
use crate::rational::{Ext, Rational};

/// Endpoints of a non-empty interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bounds {
    lo: Ext,
    hi: Ext,
    lo_closed: bool,
    hi_closed: bool,
}

impl Bounds {
    pub fn lo(&self) -> &Ext {
        &self.lo
    }
    pub fn hi(&self) -> &Ext {
        &self.hi
    }
    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }
    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }
}

/// An interval of the extended real line with independently open or closed
/// endpoints, or the empty set.
///
/// Non-empty intervals satisfy `lo <= hi`; a degenerate interval `lo == hi`
/// is a closed point; infinite endpoints are open.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntervalE {
    Empty,
    NonEmpty(Bounds),
}

impl IntervalE {
    pub fn new(lo: Ext, hi: Ext, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo_closed && !lo.is_finite() || hi_closed && !hi.is_finite() {
            return Err(Error::InvalidInterval(
                "infinite endpoints must be open".into(),
            ));
        }
        if lo == Ext::PosInf || hi == Ext::NegInf {
            return Err(Error::InvalidInterval(format!("bad endpoints {lo}, {hi}")));
        }
        match lo.cmp(&hi) {
            Ordering::Greater => Err(Error::InvalidInterval(format!("{lo} > {hi}"))),
            Ordering::Equal if !(lo_closed && hi_closed) => Err(Error::InvalidInterval(
                "a degenerate interval must be closed at both ends".into(),
            )),
            _ => Ok(IntervalE::NonEmpty(Bounds {
                lo,
                hi,
                lo_closed,
                hi_closed,
            })),
        }
    }

    pub fn empty() -> Self {
        IntervalE::Empty
    }

    /// `[a, b]`. Panics if `a > b`.
    pub fn closed(a: Rational, b: Rational) -> Self {
        Self::new(a.into(), b.into(), true, true).expect("closed interval needs a <= b")
    }

    /// `(a, b)`. Panics if `a >= b`.
    pub fn open(a: Rational, b: Rational) -> Self {
        assert!(a < b, "open interval needs a < b");
        Self::new(a.into(), b.into(), false, false).unwrap()
    }

    pub fn closed_open(a: Rational, b: Rational) -> Self {
        assert!(a < b, "half-open interval needs a < b");
        Self::new(a.into(), b.into(), true, false).unwrap()
    }

    pub fn open_closed(a: Rational, b: Rational) -> Self {
        assert!(a < b, "half-open interval needs a < b");
        Self::new(a.into(), b.into(), false, true).unwrap()
    }

    pub fn point(x: Rational) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn real_line() -> Self {
        Self::new(Ext::NegInf, Ext::PosInf, false, false).unwrap()
    }

    pub fn at_least(a: Rational) -> Self {
        Self::new(a.into(), Ext::PosInf, true, false).unwrap()
    }

    pub fn greater_than(a: Rational) -> Self {
        Self::new(a.into(), Ext::PosInf, false, false).unwrap()
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IntervalE::Empty)
    }

    pub fn bounds(&self) -> Option<&Bounds> {
        match self {
            IntervalE::Empty => None,
            IntervalE::NonEmpty(b) => Some(b),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let Some(b) = self.bounds() else {
            return false;
        };
        let x = Ext::Finite(x.clone());
        let above = match b.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => b.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&b.hi) {
            Ordering::Less => true,
            Ordering::Equal => b.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Float membership test, used when checking sampled values against a hull.
    pub fn contains_f64(&self, x: f64) -> bool {
        let Some(b) = self.bounds() else {
            return false;
        };
        let (lo, hi) = (b.lo.to_f64(), b.hi.to_f64());
        (lo < x || b.lo_closed && lo == x) && (x < hi || b.hi_closed && x == hi)
    }

    pub fn intersect(&self, other: &IntervalE) -> IntervalE {
        let (Some(a), Some(b)) = (self.bounds(), other.bounds()) else {
            return IntervalE::Empty;
        };
        let (lo, lo_closed) = match a.lo.cmp(&b.lo) {
            Ordering::Greater => (a.lo.clone(), a.lo_closed),
            Ordering::Less => (b.lo.clone(), b.lo_closed),
            Ordering::Equal => (a.lo.clone(), a.lo_closed && b.lo_closed),
        };
        let (hi, hi_closed) = match a.hi.cmp(&b.hi) {
            Ordering::Less => (a.hi.clone(), a.hi_closed),
            Ordering::Greater => (b.hi.clone(), b.hi_closed),
            Ordering::Equal => (a.hi.clone(), a.hi_closed && b.hi_closed),
        };
        Self::new(lo, hi, lo_closed, hi_closed).unwrap_or(IntervalE::Empty)
    }

    pub fn intersects(&self, other: &IntervalE) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Whether `other` is a subset of `self`.
    pub fn contains_interval(&self, other: &IntervalE) -> bool {
        let Some(inner) = other.bounds() else {
            return true;
        };
        let Some(outer) = self.bounds() else {
            return false;
        };
        let lo_ok = match outer.lo.cmp(&inner.lo) {
            Ordering::Less => true,
            Ordering::Equal => outer.lo_closed || !inner.lo_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match inner.hi.cmp(&outer.hi) {
            Ordering::Less => true,
            Ordering::Equal => outer.hi_closed || !inner.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// Length, or `None` when unbounded. The empty interval has length 0.
    pub fn length(&self) -> Option<Rational> {
        match self.bounds() {
            None => Some(Rational::zero()),
            Some(b) => match (&b.lo, &b.hi) {
                (Ext::Finite(l), Ext::Finite(h)) => Some(h - l),
                _ => None,
            },
        }
    }
}

impl fmt::Display for IntervalE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalE::Empty => f.write_str("{}"),
            IntervalE::NonEmpty(b) if b.lo == b.hi => write!(f, "{{{}}}", b.lo),
            IntervalE::NonEmpty(b) => write!(
                f,
                "{}{}, {}{}",
                if b.lo_closed { '[' } else { '(' },
                b.lo,
                b.hi,
                if b.hi_closed { ']' } else { ')' }
            ),
        }
    }
}

/// Sorts closed-left before open-left at equal lower endpoints.
fn lower_key(b: &Bounds) -> (&Ext, bool) {
    (&b.lo, !b.lo_closed)
}

/// A finite union of intervals in canonical form: sorted, pairwise disjoint,
/// and no two parts could be merged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Bounds>,
}

impl IntervalSet {
    /// Canonical union of `sets`. Empty members are ignored.
    ///
    /// Two touching intervals merge only when at least one of the touching
    /// endpoints is closed: `(0,1) ∪ [1,2] = (0,2]` but `(0,1) ∪ (1,2)` keeps
    /// two parts.
    pub fn union<'a, I>(sets: I) -> Self
    where
        I: IntoIterator<Item = &'a IntervalE>,
    {
        let mut items: Vec<Bounds> = sets.into_iter().filter_map(|s| s.bounds().cloned()).collect();
        items.sort_by(|a, b| lower_key(a).cmp(&lower_key(b)));
        let mut parts: Vec<Bounds> = Vec::with_capacity(items.len());
        for next in items {
            if let Some(cur) = parts.last_mut() {
                let joins = match next.lo.cmp(&cur.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => cur.hi_closed || next.lo_closed,
                    Ordering::Greater => false,
                };
                if joins {
                    if cur.lo == next.lo {
                        cur.lo_closed |= next.lo_closed;
                    }
                    match next.hi.cmp(&cur.hi) {
                        Ordering::Greater => {
                            cur.hi = next.hi;
                            cur.hi_closed = next.hi_closed;
                        }
                        Ordering::Equal => cur.hi_closed |= next.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            parts.push(next);
        }
        IntervalSet { parts }
    }

    /// `[outer_lo, outer_hi] \ (inner_lo, inner_hi)`.
    pub fn hollow(
        outer_lo: Rational,
        outer_hi: Rational,
        inner_lo: Rational,
        inner_hi: Rational,
    ) -> Result<Self> {
        if !(outer_lo <= inner_lo && inner_lo < inner_hi && inner_hi <= outer_hi) {
            return Err(Error::NotNested(format!(
                "({inner_lo}, {inner_hi}) must sit inside [{outer_lo}, {outer_hi}]"
            )));
        }
        let left = IntervalE::closed(outer_lo, inner_lo);
        let right = IntervalE::closed(inner_hi, outer_hi);
        Ok(Self::union([&left, &right]))
    }

    pub fn parts(&self) -> Vec<IntervalE> {
        self.parts.iter().cloned().map(IntervalE::NonEmpty).collect()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_single_interval(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.parts
            .iter()
            .any(|b| IntervalE::NonEmpty(b.clone()).contains(x))
    }

    pub fn contains_interval(&self, j: &IntervalE) -> bool {
        j.is_empty()
            || self
                .parts
                .iter()
                .any(|b| IntervalE::NonEmpty(b.clone()).contains_interval(j))
    }

    /// Total length, or `None` if some part is unbounded.
    pub fn measure(&self) -> Option<Rational> {
        self.parts.iter().try_fold(Rational::zero(), |acc, b| {
            IntervalE::NonEmpty(b.clone()).length().map(|l| acc + l)
        })
    }

    /// True when the parts are sorted, disjoint and unmergeable.
    pub fn is_canonical(&self) -> bool {
        self.parts.windows(2).all(|w| match w[0].hi.cmp(&w[1].lo) {
            Ordering::Less => true,
            Ordering::Equal => !w[0].hi_closed && !w[1].lo_closed,
            Ordering::Greater => false,
        })
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.parts().iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

/// Whether `x` lies in every member of `family`. When true the union of the
/// family is an interval.
pub fn test_common_point(family: &[IntervalE], x: &Rational) -> bool {
    !family.is_empty() && family.iter().all(|a| a.contains(x))
}

/// Whether every two members of `family` intersect.
pub fn test_pairwise(family: &[IntervalE]) -> bool {
    if family.is_empty() || family.iter().any(IntervalE::is_empty) {
        return false;
    }
    family
        .iter()
        .enumerate()
        .all(|(i, a)| family[i + 1..].iter().all(|b| a.intersects(b)))
}

/// Whether every member of `family` meets the interval `j`, where `j` must be
/// a subset of the union of the family.
pub fn test_bridge(family: &[IntervalE], j: &IntervalE) -> Result<bool> {
    let union = IntervalSet::union(family);
    if !union.contains_interval(j) {
        return Err(Error::BridgeNotSubset);
    }
    Ok(!family.is_empty() && family.iter().all(|a| a.intersects(j)))
}

/// Chain connectivity: any two members are linked by a chain of pairwise
/// intersecting members. Decided on the intersection graph.
pub fn test_connected(family: &[IntervalE]) -> bool {
    if family.is_empty() {
        return false;
    }
    let mut graph = UnGraph::<(), ()>::with_capacity(family.len(), 0);
    let nodes: Vec<_> = family.iter().map(|_| graph.add_node(())).collect();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if family[i].intersects(&family[j]) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    connected_components(&graph) == 1
}

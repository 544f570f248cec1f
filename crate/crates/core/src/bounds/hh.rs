use num_traits::{Signed, Zero};

use super::func::Func1D;
use super::poly::PiecewisePoly;
use crate::error::{Error, Result};
use crate::pointmass1d::System1D;
use crate::rational::{Rational, Scalar};

/// Node weights `w₀…wₙ` on a partition `c₀ < … < cₙ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionWeights {
    pub partition: Vec<Rational>,
    pub weights: Vec<Rational>,
    /// `Σ wᵢcᵢ`, equal to the first moment of the underlying measure.
    pub mean: Rational,
}

impl PartitionWeights {
    /// `Σ wᵢ f(cᵢ)`.
    pub fn upper<T: Scalar>(&self, f: impl Fn(&Rational) -> T) -> T {
        self.partition
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (c, w)| acc + T::from_rational(w) * f(c))
    }
}

fn check_partition(partition: &[Rational]) -> Result<()> {
    if partition.len() < 2 || partition.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPartition);
    }
    Ok(())
}

/// Solves each cell's mass/moment system for `(Rᵢ₋₁, Lᵢ)` and sums the
/// contributions at shared nodes.
fn assemble(partition: Vec<Rational>, cells: Vec<(Rational, Rational)>) -> PartitionWeights {
    let mut weights = vec![Rational::zero(); partition.len()];
    for (i, (mass, moment)) in cells.into_iter().enumerate() {
        let (lo, hi) = (&partition[i], &partition[i + 1]);
        let l = (moment - &mass * lo) / (hi - lo);
        weights[i] += mass - &l;
        weights[i + 1] += l;
    }
    let mean = partition.iter().zip(&weights).map(|(c, w)| c * w).sum();
    PartitionWeights {
        partition,
        weights,
        mean,
    }
}

/// Weights for a probability density on `[c₀, cₙ]`.
pub fn hh_weights_density(partition: &[Rational], density: &PiecewisePoly) -> Result<PartitionWeights> {
    check_partition(partition)?;
    let (lo, hi) = (&partition[0], &partition[partition.len() - 1]);
    if !density.covers(lo, hi) {
        return Err(Error::InvalidPoly(format!("density does not cover [{lo}, {hi}]")));
    }
    if let Some(x) = density.find_negative(lo, hi) {
        return Err(Error::NegativeDensity(x.to_string()));
    }
    let total = density.integral(lo, hi)?;
    if total != Rational::from_integer(1.into()) {
        return Err(Error::MassNotOne(total.to_string()));
    }
    let cells = partition
        .windows(2)
        .map(|w| Ok((density.integral(&w[0], &w[1])?, density.integral_moment(&w[0], &w[1], 1)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(partition.to_vec(), cells))
}

/// Assigns each point to the first cell `[cᵢ₋₁, cᵢ]` that contains it, so a
/// point on an interior node goes to the cell on its left.
pub fn natural_assignment(partition: &[Rational], s: &System1D) -> Result<Vec<Vec<usize>>> {
    check_partition(partition)?;
    let n = partition.len() - 1;
    let mut cells = vec![Vec::new(); n];
    for (i, (x, _)) in s.points().iter().enumerate() {
        if x < &partition[0] || x > &partition[n] {
            return Err(Error::NotAPartition(format!("point {x} lies outside the partition range")));
        }
        let k = partition[1..].partition_point(|c| c < x).min(n - 1);
        cells[k].push(i);
    }
    Ok(cells)
}

/// Weights for a normalized discrete system; `assignment[k]` lists the point
/// indices placed in cell `[c_k, c_{k+1}]`.
pub fn hh_weights_discrete(
    partition: &[Rational],
    s: &System1D,
    assignment: &[Vec<usize>],
) -> Result<PartitionWeights> {
    check_partition(partition)?;
    let total = s.total_mass();
    if total != Rational::from_integer(1.into()) {
        return Err(Error::NotNormalized(total.to_string()));
    }
    if assignment.len() != partition.len() - 1 {
        return Err(Error::NotAPartition(format!(
            "{} cells but {} index sets",
            partition.len() - 1,
            assignment.len()
        )));
    }
    let mut seen = vec![false; s.len()];
    let mut cells = Vec::with_capacity(assignment.len());
    for (k, members) in assignment.iter().enumerate() {
        let (mut mass, mut moment) = (Rational::zero(), Rational::zero());
        for &i in members {
            if i >= s.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotAPartition(format!("index {i} is out of range or repeated")));
            }
            let (x, m) = &s.points()[i];
            if x < &partition[k] || x > &partition[k + 1] {
                return Err(Error::PointOutsideCell { point: i, cell: k });
            }
            mass += m;
            moment += m * x;
        }
        cells.push((mass, moment));
    }
    if let Some(i) = seen.iter().position(|v| !v) {
        return Err(Error::NotAPartition(format!("index {i} is not assigned")));
    }
    Ok(assemble(partition.to_vec(), cells))
}

/// Equispaced-node averages: `inner` over the interior nodes
/// `a + i(b−a)/n, i = 1..n−1` (from `n = 2`), `outer` over all nodes
/// `i = 0..n` (from `n = 1`). Entries are `(n, average)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HhSequences<T> {
    pub inner: Vec<(usize, T)>,
    pub outer: Vec<(usize, T)>,
}

pub fn hh_sequences<T: Scalar>(f: impl Fn(&T) -> T, a: &T, b: &T, n_max: usize) -> HhSequences<T> {
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    let (fa, fb) = (f(a), f(b));
    for n in 1..=n_max {
        let nn = T::from_usize(n);
        let mut interior = T::zero();
        for i in 1..n {
            let x = a.clone() + (b.clone() - a.clone()) * T::from_usize(i) / nn.clone();
            interior = interior + f(&x);
        }
        if n >= 2 {
            inner.push((n, interior.clone() / T::from_usize(n - 1)));
        }
        outer.push((n, (interior + fa.clone() + fb.clone()) / T::from_usize(n + 1)));
    }
    HhSequences { inner, outer }
}

/// Two-point bounds for a mixture supported on `[a₁,b₁] \ (a₀,b₀)` with mean `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Squeeze {
    pub lower: Rational,
    pub upper: Rational,
    /// `(p₀, q₀)` on the inner pair and `(p₁, q₁)` on the outer pair.
    pub inner_weights: (Rational, Rational),
    pub outer_weights: (Rational, Rational),
}

/// `inner = (a₀, b₀)`, `outer = (a₁, b₁)`; `values` are `f` at
/// `[a₀, b₀, a₁, b₁]`.
pub fn squeeze_bounds(
    inner: (&Rational, &Rational),
    outer: (&Rational, &Rational),
    values: [&Rational; 4],
    c: &Rational,
) -> Result<Squeeze> {
    let ((a0, b0), (a1, b1)) = (inner, outer);
    if !(a1 <= a0 && a0 <= b0 && b0 <= b1) {
        return Err(Error::NotNested(format!("[{a0}, {b0}] ⊄ [{a1}, {b1}]")));
    }
    if !(a0 < c && c < b0) {
        return Err(Error::CNotInterior);
    }
    let weights = |a: &Rational, b: &Rational| ((b - c) / (b - a), (c - a) / (b - a));
    let (p0, q0) = weights(a0, b0);
    let (p1, q1) = weights(a1, b1);
    Ok(Squeeze {
        lower: &p0 * values[0] + &q0 * values[1],
        upper: &p1 * values[2] + &q1 * values[3],
        inner_weights: (p0, q0),
        outer_weights: (p1, q1),
    })
}

/// `(f(a)+f(b))/2 − (p f(a) + q f(b) − f(pa + qb))/2`.
pub fn sharpened_hh_upper(f: &Func1D, a: f64, b: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange(p.to_string()));
    }
    if !(a < b) {
        return Err(Error::EmptyInterval);
    }
    let q = 1.0 - p;
    let (fa, fb) = (f.eval(a), f.eval(b));
    Ok((fa + fb) / 2.0 - (p * fa + q * fb - f.eval(p * a + q * b)) / 2.0)
}

/// Exact counterpart of [`sharpened_hh_upper`] for rational-valued `f`.
pub fn sharpened_hh_upper_exact(
    f: impl Fn(&Rational) -> Rational,
    a: &Rational,
    b: &Rational,
    p: &Rational,
) -> Result<Rational> {
    if !(p.is_positive() && p < &Rational::from_integer(1.into())) {
        return Err(Error::POutOfRange(p.to_string()));
    }
    if a >= b {
        return Err(Error::EmptyInterval);
    }
    let q = Rational::from_integer(1.into()) - p;
    let two = Rational::from_integer(2.into());
    let (fa, fb) = (f(a), f(b));
    let mid = f(&(p * a + &q * b));
    Ok((&fa + &fb) / &two - (p * &fa + &q * &fb - mid) / two)
}

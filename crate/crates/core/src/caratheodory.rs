//! Carathéodory support reduction and the decomposition of a point-mass
//! system in Rⁿ into sub-systems of at most `n + 1` points that share its
//! barycenter.
//!
//! Everything is generic over [`Scalar`]: `Rational` runs exactly, `f64`
//! uses relative zero tests (`FLOAT_TOL`) and scaled partial pivoting.

use crate::error::{Error, Result};
use crate::rational::Scalar;

/// Pivot threshold relative to the row's largest entry, float mode only.
const PIVOT_TOL: f64 = 1e-12;

/// Point masses in Rⁿ. Duplicate positions are kept apart: point identity
/// is its index.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemND<T> {
    dim: usize,
    points: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> SystemND<T> {
    pub fn new(dim: usize, points: Vec<(Vec<T>, T)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySystem);
        }
        if let Some((pos, _)) = points.iter().find(|(pos, _)| pos.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: pos.len(),
            });
        }
        if points.iter().any(|(_, m)| !m.is_positive()) {
            return Err(Error::NonPositiveMass);
        }
        Ok(SystemND { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(Vec<T>, T)] {
        &self.points
    }

    pub fn normalized_masses(&self) -> Vec<T> {
        let total = self.points.iter().fold(T::zero(), |acc, (_, m)| acc + m.clone());
        self.points.iter().map(|(_, m)| m.clone() / total.clone()).collect()
    }

    pub fn barycenter(&self) -> Vec<T> {
        combine(&self.points, &self.normalized_masses())
    }
}

/// `Σ wₛ aₛ` over the positions of `points`.
fn combine<T: Scalar>(points: &[(Vec<T>, T)], weights: &[T]) -> Vec<T> {
    let dim = points.first().map_or(0, |(p, _)| p.len());
    let mut out = vec![T::zero(); dim];
    for ((pos, _), w) in points.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(pos) {
            *o = o.clone() + w.clone() * x.clone();
        }
    }
    out
}

/// `(L0, L1)`: number of non-zero entries and sum of absolute values.
pub fn norms<T: Scalar>(v: &[T]) -> (usize, T) {
    let l0 = v.iter().filter(|x| !x.is_zero()).count();
    let l1 = v.iter().fold(T::zero(), |acc, x| acc + x.abs());
    (l0, l1)
}

fn support<T: Scalar>(w: &[T]) -> Vec<usize> {
    (0..w.len()).filter(|&i| !w[i].is_zero()).collect()
}

fn negligible_pivot<T: Scalar>(x: &T, row_scale: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.as_f64().abs() <= PIVOT_TOL * row_scale
    }
}

/// A non-zero null vector of the `rows x cols` matrix (`cols > rows`), by
/// Gauss-Jordan elimination with scaled partial pivoting.
fn null_vector<T: Scalar>(mut m: Vec<Vec<T>>, cols: usize) -> Vec<T> {
    let rows = m.len();
    let scales: Vec<f64> = m
        .iter()
        .map(|r| r.iter().map(|x| x.as_f64().abs()).fold(0.0, f64::max))
        .collect();
    let mut scales = scales;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !negligible_pivot(&m[i][col], scales[i]))
            .max_by(|&a, &b| {
                let ra = m[a][col].as_f64().abs() / scales[a].max(f64::MIN_POSITIVE);
                let rb = m[b][col].as_f64().abs() / scales[b].max(f64::MIN_POSITIVE);
                // earliest row wins ties
                ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
            });
        let Some(p) = best else { continue };
        m.swap(r, p);
        scales.swap(r, p);
        let inv = T::one() / m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone();
            for k in 0..cols {
                let delta = factor.clone() * m[r][k].clone();
                m[i][k] = m[i][k].clone() - delta;
            }
            m[i][col] = T::zero();
        }
        pivots.push((r, col));
        r += 1;
    }
    let free = (0..cols)
        .find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))
        .expect("more columns than rows leaves a free column");
    let mut v = vec![T::zero(); cols];
    v[free] = T::one();
    for &(row, col) in &pivots {
        v[col] = -m[row][free].clone();
    }
    v
}

/// Moves `weights` along affine dependences until at most `dim + 1` entries
/// are non-zero, preserving `Σ wₛ aₛ`, `Σ wₛ` and `w ≥ 0`.
///
/// Each round takes the first `dim + 2` support points, finds `γ` with
/// `Σ γₛ aₛ = 0` and `Σ γₛ = 0`, and steps to whichever of `w ∓ tγ` first zeroes
/// the lowest-indexed coordinate.
pub fn reduce_support<T: Scalar>(points: &[(Vec<T>, T)], weights: &[T], dim: usize) -> Vec<T> {
    let mut w = weights.to_vec();
    loop {
        let supp = support(&w);
        if supp.len() <= dim + 1 {
            return w;
        }
        let cols: Vec<usize> = supp[..dim + 2].to_vec();
        let mut matrix: Vec<Vec<T>> = (0..dim)
            .map(|d| cols.iter().map(|&s| points[s].0[d].clone()).collect())
            .collect();
        matrix.push(vec![T::one(); cols.len()]);
        let gamma = null_vector(matrix, cols.len());

        // (step, zeroed coordinate) for w - tγ (sign = 1) and w + tγ (sign = -1)
        let extreme = |sign: bool| -> Option<(T, usize)> {
            let mut best: Option<(T, usize)> = None;
            for (k, g) in gamma.iter().enumerate() {
                let g = if sign { g.clone() } else { -g.clone() };
                if !g.is_positive() || negligible_pivot(&g, 1.0) {
                    continue;
                }
                let t = w[cols[k]].clone() / g;
                let better = match &best {
                    None => true,
                    Some((bt, _)) => t < *bt,
                };
                if better {
                    best = Some((t, cols[k]));
                }
            }
            best
        };
        let (t, idx, sign) = match (extreme(true), extreme(false)) {
            (Some((t1, i1)), Some((t2, i2))) => {
                if i1 <= i2 {
                    (t1, i1, T::one())
                } else {
                    (t2, i2, -T::one())
                }
            }
            (Some((t, i)), None) => (t, i, T::one()),
            (None, Some((t, i))) => (t, i, -T::one()),
            (None, None) => unreachable!("a zero-sum non-zero vector has both signs"),
        };
        for (k, &s) in cols.iter().enumerate() {
            let next = w[s].clone() - sign.clone() * t.clone() * gamma[k].clone();
            w[s] = if s == idx || next.is_negligible(&T::one()) || next.is_negative() {
                T::zero()
            } else {
                next
            };
        }
        w[idx] = T::zero();
    }
}

/// Convex weights over the positions of `s`, supported on at most `n + 1`
/// points, reproducing `target` (the barycenter of `s`).
pub fn caratheodory_represent<T: Scalar>(s: &SystemND<T>, target: &[T]) -> Result<Vec<T>> {
    if target.len() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            got: target.len(),
        });
    }
    let start = s.normalized_masses();
    let bary = combine(&s.points, &start);
    if !vectors_close(&bary, target) {
        return Err(Error::BarycenterMismatch);
    }
    Ok(reduce_support(&s.points, &start, s.dim))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdComponent<T> {
    /// Convex weights over the source points (length `k`).
    pub weights: Vec<T>,
    pub varpi: T,
}

/// `Σ varpiᵢ · weightsᵢ` equals the normalized mass vector; every component
/// balances at the source barycenter.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionND<T> {
    pub components: Vec<NdComponent<T>>,
}

/// Peels components of support at most `n + 1` off the system until no mass
/// remains.
///
/// Each round takes a Carathéodory representation `λ` of the barycenter over
/// the residual support and removes `t λ` with `t = min wₛ / λₛ`, so at least
/// one point leaves the residual. This yields `⌈k/(n+1)⌉ ≤ m ≤ k - n`.
pub fn decompose_nd<T: Scalar>(s: &SystemND<T>) -> ReductionND<T> {
    let n = s.dim;
    let mut residual = s.normalized_masses();
    if s.len() <= n + 1 {
        return ReductionND {
            components: vec![NdComponent {
                weights: residual,
                varpi: T::one(),
            }],
        };
    }
    let mut components = Vec::new();
    loop {
        let supp = support(&residual);
        if supp.is_empty() {
            break;
        }
        let mass = supp.iter().fold(T::zero(), |acc, &i| acc + residual[i].clone());
        if supp.len() <= n + 1 {
            let weights = residual.iter().map(|x| x.clone() / mass.clone()).collect();
            components.push(NdComponent { weights, varpi: mass });
            break;
        }
        let start: Vec<T> = residual.iter().map(|x| x.clone() / mass.clone()).collect();
        let lambda = reduce_support(&s.points, &start, n);
        let lsupp = support(&lambda);
        let (t, _) = lsupp
            .iter()
            .map(|&i| (residual[i].clone() / lambda[i].clone(), i))
            .fold(None::<(T, usize)>, |best, cand| match best {
                Some(b) if b.0 <= cand.0 => Some(b),
                _ => Some(cand),
            })
            .expect("representation has non-empty support");
        for &i in &lsupp {
            let next = residual[i].clone() - t.clone() * lambda[i].clone();
            let tiny = (residual[i].clone() / lambda[i].clone() - t.clone()).is_negligible(&t);
            residual[i] = if tiny || next.is_negative() { T::zero() } else { next };
        }
        components.push(NdComponent { weights: lambda, varpi: t });
    }
    ReductionND { components }
}

fn close<T: Scalar>(a: &T, b: &T) -> bool {
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    (a.clone() - b.clone()).is_negligible(&scale)
}

fn vectors_close<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(x, y))
}

/// Named contract checks of a reduction against its source system.
pub fn check_reduction<T: Scalar>(s: &SystemND<T>, r: &ReductionND<T>) -> Vec<(&'static str, bool)> {
    let (n, k, m) = (s.dim, s.len(), r.components.len());
    let bary = s.barycenter();
    let masses = s.normalized_masses();

    let shapes = r.components.iter().all(|c| c.weights.len() == k);
    if !shapes {
        return vec![("shape", false)];
    }
    let simplex = r.components.iter().all(|c| {
        let (l0, l1) = norms(&c.weights);
        (1..=n + 1).contains(&l0) && close(&l1, &T::one()) && c.weights.iter().all(|w| !w.is_negative())
    });
    let varpi_sum = r.components.iter().fold(T::zero(), |acc, c| acc + c.varpi.clone());
    let varpi_ok = close(&varpi_sum, &T::one()) && r.components.iter().all(|c| c.varpi.is_positive());
    let balance = (0..k).all(|i| {
        let total = r
            .components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.varpi.clone() * c.weights[i].clone());
        close(&total, &masses[i])
    });
    let barycenters = r
        .components
        .iter()
        .all(|c| vectors_close(&combine(&s.points, &c.weights), &bary));
    let count = if k > n {
        m * (n + 1) >= k && m <= k - n
    } else {
        m == 1
    };
    vec![
        ("shape", true),
        ("support_and_l1", simplex),
        ("varpi_sum", varpi_ok),
        ("mass_balance", balance),
        ("component_barycenters", barycenters),
        ("component_count_bounds", count),
    ]
}

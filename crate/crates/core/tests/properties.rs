use barydecomp_core::bounds::{
    hh_weights_density, hh_weights_discrete, jensen_gap_bound, natural_assignment, squeeze_bounds, Func1D,
    PiecewisePoly,
};
use barydecomp_core::caratheodory::{check_reduction, decompose_nd, reduce_support, SystemND};
use barydecomp_core::convexity::{
    f2_star, gap_set, is_convex_at, is_convex_on, weighted_implies_pointwise_check, TabulatedFunction,
};
use barydecomp_core::exec::{self, map};
use barydecomp_core::interval::{IntervalE, IntervalSet};
use barydecomp_core::pointmass1d::{
    check_decomposition, check_transport, decompose_pairs, recompose, refine_pair, transport, verify_sum_identity,
    System1D,
};
use barydecomp_core::rational::{int, rat, Ext, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn system_strategy(max: usize) -> impl Strategy<Value = System1D> {
    prop::collection::vec((-40i64..=40, 1i64..=4, 1i64..=12, 1i64..=5), 1..=max).prop_map(|pts| {
        System1D::new(pts.into_iter().map(|(x, dx, m, dm)| (rat(x, dx), rat(m, dm)))).unwrap()
    })
}

fn mean(s: &System1D) -> Rational {
    s.points().iter().map(|(x, m)| x * m).sum::<Rational>() / s.total_mass()
}

/// Tabulation on distinct integer positions.
fn table_strategy(max: usize) -> impl Strategy<Value = TabulatedFunction> {
    prop::collection::btree_map(-15i64..=15, -20i64..=20, 1..=max).prop_map(|m| {
        let (d, v): (Vec<_>, Vec<_>) = m.into_iter().map(|(x, y)| (int(x), int(y))).unzip();
        TabulatedFunction::new(d, v).unwrap()
    })
}

fn interval_strategy() -> impl Strategy<Value = IntervalE> {
    (-10i64..=10, 0i64..=6, any::<bool>(), any::<bool>()).prop_map(|(lo, len, lc, hc)| {
        let (lc, hc) = if len == 0 { (true, true) } else { (lc, hc) };
        IntervalE::new(Ext::Finite(int(lo)), Ext::Finite(int(lo + len)), lc, hc).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn decomposition_contract(s in system_strategy(12)) {
        let d = decompose_pairs(&s);
        for (name, pass) in check_decomposition(&s, &d) {
            prop_assert!(pass, "{name} failed for {s:?}");
        }
        prop_assert_eq!(recompose(&d).unwrap(), s);
    }

    #[test]
    fn sum_identity_holds_exactly(s in system_strategy(10), seed in any::<u64>(), g in -50i64..=50) {
        let f = |x: &Rational| -> Option<Rational> {
            let h = (x.numer().to_string().len() as u64 * 31 + x.denom().to_string().len() as u64) ^ seed;
            Some(rat((h % 97) as i64 - 48, 1 + (h % 5) as i64) + x)
        };
        let d = decompose_pairs(&s);
        let (lhs, rhs) = verify_sum_identity(&d, f, int(g)).unwrap();
        let direct: Rational = s.points().iter().map(|(x, m)| m * f(x).unwrap()).sum::<Rational>()
            / s.total_mass() + int(g);
        prop_assert_eq!(&lhs, &direct);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn refinement_columns_sum_back(
        a in -20i64..=0, width in 1i64..=20,
        thetas in prop::collection::vec((1i64..=15, 1i64..=9), 1..=5),
    ) {
        let (a, b) = (int(a), int(a + width));
        let total: i64 = thetas.iter().map(|t| t.1).sum();
        let targets: Vec<(Rational, Rational)> = thetas
            .iter()
            .map(|&(t, w)| {
                let theta = rat(t, 16);
                (&theta * &a + (Rational::one() - &theta) * &b, rat(w, total))
            })
            .collect();
        let p: Rational = thetas.iter().map(|&(t, w)| rat(t, 16) * rat(w, total)).sum();
        let q = Rational::one() - &p;
        let parts = refine_pair(&a, &b, &p, &q, &targets).unwrap();
        let sp: Rational = parts.iter().map(|x| x.0.clone()).sum();
        let sq: Rational = parts.iter().map(|x| x.1.clone()).sum();
        prop_assert_eq!(sp, p);
        prop_assert_eq!(sq, q);
        for ((pi, qi), (ci, _)) in parts.iter().zip(&targets) {
            prop_assert_eq!(&((pi * &a + qi * &b) / (pi + qi)), ci);
        }
    }

    #[test]
    fn transport_marginals(
        inner in system_strategy(5),
        left in prop::collection::vec((1i64..=10, 1i64..=6), 1..=4),
        right in prop::collection::vec((1i64..=10, 1i64..=6), 1..=4),
    ) {
        let inner = inner.normalized();
        let c = mean(&inner);
        let (lo, hi) = (inner.min_position().clone(), inner.max_position().clone());
        let left: Vec<(Rational, Rational)> = left.iter().map(|&(d, m)| (&lo - int(d), int(m))).collect();
        let right: Vec<(Rational, Rational)> = right.iter().map(|&(d, m)| (&hi + int(d), int(m))).collect();
        let moment = |pts: &[(Rational, Rational)]| -> Rational {
            pts.iter().map(|(x, m)| m * (x - &c)).sum::<Rational>()
        };
        let scale = -moment(&left) / moment(&right);
        let outer = System1D::new(
            left.into_iter().chain(right.into_iter().map(|(x, m)| (x, m * &scale))),
        )
        .unwrap()
        .normalized();
        prop_assert_eq!(mean(&outer), c);
        let lambda = transport(&outer, &inner).unwrap();
        for (name, pass) in check_transport(&outer, &inner, &lambda) {
            prop_assert!(pass, "{name}");
        }
        for (row, (_, p)) in lambda.iter().zip(outer.points()) {
            prop_assert_eq!(&row.iter().cloned().sum::<Rational>(), p);
        }
        for (j, (b, q)) in inner.points().iter().enumerate() {
            let col: Rational = lambda.iter().map(|r| r[j].clone()).sum();
            let moment: Rational = lambda.iter().zip(outer.points()).map(|(r, (a, _))| &r[j] * a).sum();
            prop_assert_eq!(&col, q);
            prop_assert_eq!(&(moment / col), b);
        }
    }

    #[test]
    fn caratheodory_reduction(
        dim in 1usize..=3,
        pts in prop::collection::vec((prop::collection::vec(-5i64..=5, 3), 1i64..=9), 1..=9),
    ) {
        let pts: Vec<(Vec<Rational>, Rational)> = pts
            .into_iter()
            .map(|(x, m)| (x[..dim].iter().map(|&v| int(v)).collect(), int(m)))
            .collect();
        let s = SystemND::new(dim, pts.clone()).unwrap();
        let r = decompose_nd(&s);
        for (name, pass) in check_reduction(&s, &r) {
            prop_assert!(pass, "{name}");
        }
        let lam = s.normalized_masses();
        let w = reduce_support(&pts, &lam, dim);
        prop_assert!(w.iter().filter(|x| !x.is_zero()).count() <= dim + 1);
        prop_assert!(w.iter().all(|x| *x >= Rational::zero()));
        prop_assert_eq!(w.iter().cloned().sum::<Rational>(), Rational::one());
        for d in 0..dim {
            let got: Rational = pts.iter().zip(&w).map(|((x, _), wi)| &x[d] * wi).sum();
            prop_assert_eq!(got, s.barycenter()[d].clone());
        }
    }

    #[test]
    fn union_is_canonical_and_exact(family in prop::collection::vec(interval_strategy(), 0..=6)) {
        let u = IntervalSet::union(family.iter());
        prop_assert!(u.is_canonical());
        for k in -24..=36 {
            let x = rat(k, 2);
            prop_assert_eq!(u.contains(&x), family.iter().any(|i| i.contains(&x)), "at {}", x);
        }
        let sum: Rational = family.iter().map(|i| i.length().unwrap()).sum();
        prop_assert!(u.measure().unwrap() <= sum);
    }

    #[test]
    fn uniform_partition_weights(cuts in prop::collection::btree_set(1i64..=59, 0..=6), lo in -5i64..=5) {
        let (a, b) = (int(lo), int(lo + 6));
        let mut partition = vec![a.clone()];
        partition.extend(cuts.iter().map(|&k| &a + rat(k, 10)));
        partition.push(b.clone());
        let w = hh_weights_density(&partition, &PiecewisePoly::uniform(a.clone(), b.clone()).unwrap()).unwrap();
        prop_assert!(w.weights.iter().all(|x| *x > Rational::zero()));
        prop_assert_eq!(w.weights.iter().cloned().sum::<Rational>(), Rational::one());
        prop_assert_eq!(&w.mean, &((&a + &b) / int(2)));
        // Upper bound for a convex integrand: mean of x² over [a, b].
        let exact = (&a * &a + &a * &b + &b * &b) / int(3);
        prop_assert!(w.upper(|x: &Rational| x * x) >= exact);
    }

    #[test]
    fn discrete_partition_weights(s in system_strategy(10), cuts in prop::collection::btree_set(1i64..=9, 0..=4)) {
        let s = System1D::new(s.points().iter().map(|(x, m)| (x.clone() / int(80) + rat(1, 2), m.clone())))
            .unwrap()
            .normalized();
        let mut partition = vec![Rational::zero()];
        partition.extend(cuts.iter().map(|&k| rat(k, 10)));
        partition.push(Rational::one());
        let cells = natural_assignment(&partition, &s).unwrap();
        let w = hh_weights_discrete(&partition, &s, &cells).unwrap();
        prop_assert_eq!(w.weights.iter().cloned().sum::<Rational>(), Rational::one());
        prop_assert_eq!(&w.mean, &mean(&s));
        let jensen: Rational = s.points().iter().map(|(x, m)| m * x * x).sum();
        prop_assert!(w.upper(|x: &Rational| x * x) >= jensen);
    }

    #[test]
    fn squeeze_orders_convex_values(a1 in -10i64..=-1, a0 in 0i64..=3, w0 in 1i64..=4, b1x in 0i64..=6, c in 1i64..=99) {
        let (a1, a0) = (int(a1), int(a0));
        let b0 = &a0 + int(w0);
        let b1 = &b0 + int(b1x);
        let c = &a0 + (&b0 - &a0) * rat(c, 100);
        let sq = |x: &Rational| x * x;
        let out = squeeze_bounds((&a0, &b0), (&a1, &b1), [&sq(&a0), &sq(&b0), &sq(&a1), &sq(&b1)], &c).unwrap();
        prop_assert!(out.lower <= out.upper);
        prop_assert!(sq(&c) <= out.lower);
    }

    #[test]
    fn convex_tables_are_convex_everywhere(t in table_strategy(8), k in -3i64..=3) {
        let d = t.domain().to_vec();
        let v = d.iter().map(|x| x * x + int(k) * x).collect();
        let f = TabulatedFunction::new(d.clone(), v).unwrap();
        prop_assert!(is_convex_on(&f, false).holds);
        for c in &d {
            prop_assert!(is_convex_at(&f, c, false).unwrap().holds);
            let h = f2_star(&f, c).unwrap();
            prop_assert!(&h.finite_values[0] >= f.value_at(c).unwrap());
        }
    }

    #[test]
    fn hull_grows_with_the_domain(t in table_strategy(9), drop in any::<prop::sample::Index>(), k in 0i64..=8) {
        prop_assume!(t.len() >= 3);
        let skip = drop.index(t.len() - 2) + 1; // keep both endpoints
        let (d, v): (Vec<_>, Vec<_>) = t
            .domain()
            .iter()
            .zip(t.values())
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, (x, y))| (x.clone(), y.clone()))
            .unzip();
        let sub = TabulatedFunction::new(d, v).unwrap();
        let (lo, hi) = (&t.domain()[0], &t.domain()[t.len() - 1]);
        let c = lo + (hi - lo) * rat(k, 8);
        let small = f2_star(&sub, &c).unwrap().hull;
        let big = f2_star(&t, &c).unwrap().hull;
        prop_assert!(big.contains_interval(&small));
    }

    #[test]
    fn gap_set_contains_zero(t in table_strategy(8), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=3)) {
        let b: Vec<Rational> = picks.iter().map(|i| t.domain()[i.index(t.len())].clone()).collect();
        prop_assert!(gap_set(&t, &b).unwrap().contains(&Rational::zero()));
        for c in &b {
            prop_assert!(weighted_implies_pointwise_check(&t, c).unwrap());
        }
    }

    #[test]
    fn jensen_gap_envelope(
        a in -2.0f64..2.0, width in 0.1f64..2.0,
        xs in prop::collection::vec((0.0f64..=1.0, 0.01f64..1.0), 1..=8),
    ) {
        let b = a + width;
        let square: fn(f64) -> f64 = |x| x * x;
        for (f, name) in [(square, "square"), (f64::exp as fn(f64) -> f64, "exp")] {
            let bound = jensen_gap_bound(&Func1D::named(name).unwrap(), a, b).unwrap();
            let total: f64 = xs.iter().map(|p| p.1).sum();
            let m = xs.iter().map(|(t, w)| w * (a + t * width)).sum::<f64>() / total;
            let gap = xs.iter().map(|(t, w)| w * f(a + t * width)).sum::<f64>() / total - f(m.clamp(a, b));
            prop_assert!(gap <= bound.gap + 1e-12);
            prop_assert!(gap >= -1e-12);
        }
    }
}

#[test]
fn strategies_agree_on_decompositions() {
    let systems: Vec<System1D> = (0..200)
        .map(|i: i64| System1D::new((0..=(i % 9)).map(|k| (int((k * 7 + i) % 23 - 11), int(1 + (k * i) % 5)))).unwrap())
        .collect();
    let seq = map(exec::Strategy::Sequential, &systems, decompose_pairs);
    let par = map(exec::Strategy::Parallel, &systems, decompose_pairs);
    assert_eq!(seq, par);
}
